#pragma once

// JSON tuple files:
//   { "n": 2, "dim": 2, "name": "...", "description": "...",
//     "matrices": [ [[[re, im], ...], ...], ... ] }
// with matrices[i][row][col] an [re, im] pair. Doubles are written in their
// shortest round-trip form, so parse(serialize(T)) == T bit for bit.

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dilab/operator_tuple.hpp"

namespace dilab {

class TupleFormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TupleFile {
  Tuple tuple;
  std::optional<std::string> name;
  std::optional<std::string> description;
};

nlohmann::json matrix_to_json(const Mat<cd>& m);
Mat<cd> matrix_from_json(const nlohmann::json& j, Index rows, Index cols);

nlohmann::json to_json(const TupleFile& f);
TupleFile tuple_file_from_json(const nlohmann::json& j);

std::string serialize(const TupleFile& f, int indent = 2);
TupleFile parse_tuple_file(const std::string& text);

TupleFile read_tuple_file(const std::string& path);
void write_tuple_file(const std::string& path, const TupleFile& f);

}  // namespace dilab
