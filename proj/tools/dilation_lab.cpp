#include <iostream>

#include "dilab/cli.hpp"

int main(int argc, char** argv) { return dilab::cli::run(argc, argv, std::cout, std::cerr); }
