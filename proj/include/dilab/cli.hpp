#pragma once

#include <iosfwd>

namespace dilab::cli {

/// Entry point of the dilation-lab tool. Returns the process exit code:
/// 0 success, 1 a check or assertion failed, 2 bad input or usage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dilab::cli
