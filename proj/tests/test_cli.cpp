#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "dilab/cli.hpp"
#include "dilab/random_tuples.hpp"
#include "dilab/tuple_io.hpp"
#include "dilab/tuples.hpp"

using namespace dilab;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dilation-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const Tuple& t) {
  const auto path = (std::filesystem::temp_directory_path() / name).string();
  write_tuple_file(path, TupleFile{t, std::nullopt, std::nullopt});
  return path;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({}).code == 2);
  const auto bad = run_cli({"check", "nosuch"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("dilation-lab:") == 0);
  CHECK(run_cli({"check", "lemma10", "--degree", "1"}).code == 2);
  CHECK(run_cli({"check", "lemma10", "--format", "xml"}).code == 2);
  CHECK(run_cli({"piece", "--input", "/nonexistent/t.json"}).code == 2);
}

TEST_CASE("check reports are deterministic") {
  const auto a = run_cli({"check", "lemma10", "--trials", "5", "--seed", "11"});
  const auto b = run_cli({"check", "lemma10", "--trials", "5", "--seed", "11"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::ordered_json::parse(a.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["pass"] == true);
  CHECK(j["config"]["seed"] == 11);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"schema_version", "command", "config", "results", "warnings", "pass"});
}

TEST_CASE("seed from the environment") {
  ::setenv("DILATION_LAB_SEED", "5", 1);
  const auto a = run_cli({"check", "lemma10", "--trials", "2", "--seed", "99"});
  ::setenv("DILATION_LAB_SEED", "x5", 1);
  const auto bad = run_cli({"check", "lemma10", "--trials", "2"});
  ::unsetenv("DILATION_LAB_SEED");
  REQUIRE(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["config"]["seed"] == 5);
  CHECK(j["config"]["seed_source"] == "DILATION_LAB_SEED");
  CHECK(bad.code == 2);
}

TEST_CASE("markdown output") {
  const auto r = run_cli({"check", "prop6", "--format", "markdown"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# ") == 0);
  CHECK(r.out.find("prop6") != std::string::npos);
}

TEST_CASE("piece, dilate and classify on files") {
  TupleSampler s(60);
  const auto hidden = conjugate(direct_sum(s.commuting_tuple(2, 1), s.random_tuple(2, 2)), s.haar_unitary(3));
  const auto p = run_cli({"piece", "--input", temp_file("dilab_cli_piece.json", hidden)});
  REQUIRE(p.code == 0);
  CHECK(nlohmann::json::parse(p.out)["results"][0]["residuals"]["piece_dim"] == 1);

  const auto small = temp_file("dilab_cli_small.json", scale_to_row_norm(s.random_tuple(2, 2), 0.3));
  // Row norm 0.3 leaves a purity tail of 0.09^9 at degree 8.
  for (const std::string method : {"pure", "schaeffer"}) {
    CAPTURE(method);
    const auto r = run_cli({"dilate", "--input", small, "--method", method, "--degree", "8"});
    CAPTURE(r.err);
    CAPTURE(r.out);
    CHECK(r.code == 0);
  }
  CHECK(run_cli({"dilate", "--input", small, "--method", "symmetric", "--degree", "4"}).code == 2);
  CHECK(run_cli({"dilate", "--input", small, "--method", "cuntz-state"}).code == 2);
  const auto point = temp_file("dilab_cli_point.json", point_tuple<cd>({cd(0.6), cd(0, 0.8)}));
  CHECK(run_cli({"dilate", "--input", point, "--method", "cuntz-state", "--degree", "3"}).code == 0);

  const auto units = temp_file("dilab_cli_units.json", matrix_unit_pair());
  const auto none = run_cli({"classify", "--input", units, "--degree", "3"});
  REQUIRE(none.code == 0);
  CHECK(nlohmann::json::parse(none.out)["results"][0]["verdict"] == "no spherical part");

  const auto z = s.spherical_unitary(2, 2);
  const auto same = run_cli({"classify", "--input", temp_file("dilab_cli_z.json", z), "--input",
                             temp_file("dilab_cli_zu.json", conjugate(z, s.haar_unitary(2)))});
  REQUIRE(same.code == 0);
  CHECK(nlohmann::json::parse(same.out)["results"][0]["verdict"] == "equivalent");
  CHECK(run_cli({"classify", "--input", small}).code == 2);
}

TEST_CASE("dump round trip and refusal") {
  const auto units = temp_file("dilab_cli_dump_in.json", matrix_unit_pair());
  const auto out = (std::filesystem::temp_directory_path() / "dilab_cli_dump.json").string();
  REQUIRE(run_cli({"dilate", "--input", units, "--method", "schaeffer", "--degree", "2", "--dump", out}).code == 0);
  const auto dumped = read_tuple_file(out).tuple;
  CHECK(dumped.size() == 2);
  // Rewriting and re-reading reproduces every bit.
  const auto again = parse_tuple_file(serialize(TupleFile{dumped, std::nullopt, std::nullopt}));
  for (int i = 0; i < 2; ++i) CHECK((dumped[i].array() == again.tuple[i].array()).all());
  const auto refused =
      run_cli({"dilate", "--input", units, "--method", "schaeffer", "--dump", out, "--dump-limit", "100"});
  CHECK(refused.code == 2);
  CHECK(refused.err.find("--dump-limit") != std::string::npos);
}
