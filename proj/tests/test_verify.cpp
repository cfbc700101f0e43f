#include <doctest.h>

#include "dilab/dilation.hpp"
#include "dilab/random_tuples.hpp"
#include "dilab/verify.hpp"

using namespace dilab;

TEST_CASE("creation-tuple check on small spaces") {
  const auto r = check_prop6(2, 3);
  CHECK(r.pass);
  CHECK(r.residuals["window_piece_dim"] == 1 + 2 + 3);
  CHECK(r.residuals["piece_dim"] == 1 + 2 + 3 + 4);
  CHECK(check_prop6(3, 2).pass);
  CHECK_THROWS_AS(check_prop6(1, 3), std::invalid_argument);
}

TEST_CASE("spherical unitary check") {
  TupleSampler s(40);
  const auto r = check_thm15(s.spherical_unitary(2, 2), 3);
  CHECK(r.pass);
  CHECK(r.residuals["piece_dim"] == 2);
  CHECK_THROWS_AS(check_thm15(matrix_unit_pair(), 3), std::invalid_argument);
}

TEST_CASE("pure criterion check") {
  TupleSampler s(41);
  Thm9Options o;
  const auto c = check_thm9(scale_to_row_norm(s.commuting_tuple(2, 2), 0.5), o, "commuting");
  CHECK(c.pass);
  CHECK(c.residuals["criterion_defect_spaces_equal"] == true);
  CHECK(c.residuals["piece_is_standard_dilation"] == true);
  const auto g = check_thm9(scale_to_row_norm(s.random_tuple(2, 2), 0.5), o, "generic");
  CHECK(g.pass);
  CHECK(g.residuals["criterion_defect_spaces_equal"] == false);
}

TEST_CASE("psd block rank check") {
  const auto r = check_lemma10(50, 3, 5);
  CHECK(r.pass);
  CHECK(r.residuals["violations"] == 0);
}

TEST_CASE("chain check is vacuous for one operator") {
  const auto r = proof_chain_check(point_tuple<cd>({cd(0, 1)}), {Vec<cd>::Ones(1)}, 4);
  CHECK(r.pass);
  REQUIRE(!r.notes.empty());
  CHECK(r.notes.front().find("vacuous") != std::string::npos);
}

TEST_CASE("chain check on random spherical unitaries and vectors") {
  TupleSampler s(42);
  for (int k = 0; k < 6; ++k) {
    const int n = s.uniform_int(2, 3);
    const Index d = s.uniform_int(1, 3);
    const auto z = s.spherical_unitary(n, d);
    std::vector<Vec<cd>> h;
    for (int i = 0; i < n; ++i) h.push_back(s.gaussian(d, 1) * s.uniform(0.01, 10.0));
    const auto r = proof_chain_check(z, h, 4);
    CHECK(r.pass);
    CHECK(r.residuals["max_norm_deviation"].get<double>() <= 1e-8);
  }
}

TEST_CASE("chain check preconditions") {
  // h in the kernel of D: h_i = T_i^* g for a common g.
  TupleSampler s(43);
  const auto z = s.spherical_unitary(2, 2);
  const Vec<cd> g = s.gaussian(2, 1);
  std::vector<Vec<cd>> h{z[0].adjoint() * g, z[1].adjoint() * g};
  CHECK_THROWS_AS(proof_chain_check(z, h, 4), std::invalid_argument);
  CHECK_THROWS_AS(proof_chain_check(matrix_unit_pair(), {Vec<cd>::Ones(2), Vec<cd>::Ones(2)}, 4),
                  std::invalid_argument);
}

TEST_CASE("sums and tensor products check") {
  const auto r = check_corollary5(3, 8);
  CHECK(r.pass);
}

TEST_CASE("suites") {
  SuiteConfig c;
  c.trials = 3;
  const auto reports = run_suite("lemma10", c);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].inputs["trials"] == 3);
  CHECK_THROWS_AS(run_suite("nope", c), std::invalid_argument);
  CHECK(suite_names().size() == 6);

  // Failures inside a suite become failed reports.
  c.degree = 1;
  c.trials = 2;
  const auto bad = run_suite("chain", c);
  REQUIRE(bad.size() == 3);
  CHECK(bad[0].pass);
  CHECK_FALSE(bad[1].pass);
  CHECK(bad[1].notes.front().find("error:") == 0);
}

TEST_CASE("report json has fixed field order") {
  const auto j = to_json(check_prop6(2, 2));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"name", "pass", "inputs", "tolerances", "residuals", "notes"});
}
