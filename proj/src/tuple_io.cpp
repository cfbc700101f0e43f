#include "dilab/tuple_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dilab {

using nlohmann::json;

json matrix_to_json(const Mat<cd>& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double finite_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw TupleFormatError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw TupleFormatError(where + ": entry is not finite");
  return v;
}

}  // namespace

Mat<cd> matrix_from_json(const json& j, Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw TupleFormatError("matrix must have " + std::to_string(rows) + " rows");
  Mat<cd> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw TupleFormatError("row " + std::to_string(r) + " must have " + std::to_string(cols) + " entries");
    for (Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      const std::string where = "entry (" + std::to_string(r) + ", " + std::to_string(c) + ")";
      if (!e.is_array() || e.size() != 2) throw TupleFormatError(where + ": expected an [re, im] pair");
      m(r, c) = cd(finite_number(e[0], where), finite_number(e[1], where));
    }
  }
  return m;
}

json to_json(const TupleFile& f) {
  json j;
  j["n"] = f.tuple.size();
  j["dim"] = f.tuple.dim();
  if (f.name) j["name"] = *f.name;
  if (f.description) j["description"] = *f.description;
  json mats = json::array();
  for (const auto& m : f.tuple) mats.push_back(matrix_to_json(m));
  j["matrices"] = std::move(mats);
  return j;
}

TupleFile tuple_file_from_json(const json& j) {
  if (!j.is_object()) throw TupleFormatError("tuple file must be a JSON object");
  for (const char* key : {"n", "dim", "matrices"})
    if (!j.contains(key)) throw TupleFormatError(std::string("missing field '") + key + "'");
  if (!j["n"].is_number_integer() || !j["dim"].is_number_integer())
    throw TupleFormatError("'n' and 'dim' must be integers");
  const long n = j["n"].get<long>();
  const long dim = j["dim"].get<long>();
  if (n < 1) throw TupleFormatError("'n' must be at least 1");
  if (dim < 1) throw TupleFormatError("'dim' must be at least 1");
  const json& mats = j["matrices"];
  if (!mats.is_array() || static_cast<long>(mats.size()) != n)
    throw TupleFormatError("'matrices' must hold exactly n matrices");
  std::vector<Mat<cd>> ops;
  for (long i = 0; i < n; ++i) {
    try {
      ops.push_back(matrix_from_json(mats[static_cast<std::size_t>(i)], dim, dim));
    } catch (const TupleFormatError& e) {
      throw TupleFormatError("matrix " + std::to_string(i) + ": " + e.what());
    }
  }
  TupleFile f{Tuple(std::move(ops)), std::nullopt, std::nullopt};
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw TupleFormatError("'name' must be a string");
    f.name = j["name"].get<std::string>();
  }
  if (j.contains("description")) {
    if (!j["description"].is_string()) throw TupleFormatError("'description' must be a string");
    f.description = j["description"].get<std::string>();
  }
  return f;
}

std::string serialize(const TupleFile& f, int indent) { return to_json(f).dump(indent); }

TupleFile parse_tuple_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw TupleFormatError(std::string("malformed JSON: ") + e.what());
  }
  return tuple_file_from_json(j);
}

TupleFile read_tuple_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TupleFormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_tuple_file(ss.str());
  } catch (const TupleFormatError& e) {
    throw TupleFormatError(path + ": " + e.what());
  }
}

void write_tuple_file(const std::string& path, const TupleFile& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << serialize(f) << "\n";
}

}  // namespace dilab
