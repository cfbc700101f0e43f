#include "dilab/report.hpp"

#include <sstream>
#include <stdexcept>

namespace dilab {

ordered_json to_json(const Report& r) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = r.command;
  j["config"] = r.config;
  j["results"] = r.results;
  j["warnings"] = r.warnings;
  j["pass"] = r.pass;
  return j;
}

namespace {

std::string cell(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void key_values(std::ostringstream& out, const std::string& title, const ordered_json& obj) {
  if (!obj.is_object() || obj.empty()) return;
  out << "\n" << title << "\n\n| key | value |\n|---|---|\n";
  for (const auto& [k, v] : obj.items()) out << "| " << k << " | " << cell(v) << " |\n";
}

}  // namespace

std::string render_markdown(const Report& r) {
  std::ostringstream out;
  out << "# dilation-lab " << r.command << "\n\n";
  out << "Overall: **" << (r.pass ? "PASS" : "FAIL") << "** (schema " << kReportSchemaVersion << ")\n";
  key_values(out, "## Configuration", r.config);
  for (const auto& res : r.results) {
    out << "\n## " << cell(res.value("name", ordered_json("result")));
    if (res.contains("pass")) out << ": " << (res["pass"].get<bool>() ? "pass" : "FAIL");
    out << "\n";
    for (const auto& [k, v] : res.items()) {
      if (k == "name" || k == "pass") continue;
      if (v.is_object()) {
        key_values(out, "### " + k, v);
      } else if (v.is_array() && !v.empty() && v.front().is_string()) {
        out << "\n### " << k << "\n\n";
        for (const auto& s : v) out << "- " << s.get<std::string>() << "\n";
      } else if (!(v.is_array() && v.empty())) {
        out << "\n### " << k << "\n\n```\n" << v.dump() << "\n```\n";
      }
    }
  }
  if (!r.warnings.empty()) {
    out << "\n## Warnings\n\n";
    for (const auto& w : r.warnings) out << "- " << w << "\n";
  }
  return out.str();
}

std::string render(const Report& r, const std::string& format) {
  if (format == "json") return to_json(r).dump(2) + "\n";
  if (format == "markdown") return render_markdown(r);
  throw std::invalid_argument("unknown report format '" + format + "'");
}

}  // namespace dilab
