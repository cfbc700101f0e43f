#pragma once

// Top-level report emitted by the command-line tool.

#include <string>
#include <vector>

#include "dilab/verify.hpp"

namespace dilab {

inline constexpr int kReportSchemaVersion = 1;

struct Report {
  std::string command;
  ordered_json config = ordered_json::object();
  ordered_json results = ordered_json::array();
  std::vector<std::string> warnings;
  bool pass = true;

  void add(const CheckReport& r) {
    results.push_back(to_json(r));
    pass = pass && r.pass;
  }
};

ordered_json to_json(const Report& r);

/// "json" or "markdown". Both renderings end with a newline.
std::string render(const Report& r, const std::string& format);

std::string render_markdown(const Report& r);

}  // namespace dilab
