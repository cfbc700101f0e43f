#pragma once

// Named verification checks built from the library modules. Each check
// returns a report; a failing sub-assertion marks the report as failed but
// never throws out of the check.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dilab/operator_tuple.hpp"

namespace dilab {

using ordered_json = nlohmann::ordered_json;

struct CheckReport {
  std::string name;
  ordered_json inputs = ordered_json::object();
  ordered_json tolerances = ordered_json::object();
  ordered_json residuals = ordered_json::object();
  bool pass = false;
  std::vector<std::string> notes;
};

ordered_json to_json(const CheckReport& r);

/// Commuting piece of the truncated creation tuple on degrees <= M-1 versus
/// the symmetric Fock frame there.
CheckReport check_prop6(int n, int max_degree, double angle_tol = 1e-8, double rank_tol = 1e-9);

/// For a spherical unitary Z: the commuting piece of its minimal isometric
/// dilation (truncated at M) is exactly the embedded original space.
CheckReport check_thm15(const Tuple& z, int max_degree, double angle_tol = 1e-7, double rank_tol = 1e-9,
                        double tol = 1e-10, const std::string& label = "");

struct Thm9Options {
  int max_degree = 5;       // starting truncation degree; raised until pure enough
  int degree_limit = 14;
  double tail_tol = 1e-6;
  double angle_tol = 1e-8;
  double rank_tol = 1e-9;
};

/// Pure tuple T: compares the defect-space criterion
///   closure Delta_T(H) == closure Delta_T(H^c)
/// with whether the commuting piece of the dilation (S (x) I on the
/// symmetric Fock space tensor the defect space) is the standard commuting
/// dilation of T^c, and reports the four defect ranks involved.
CheckReport check_thm9(const Tuple& t, const Thm9Options& opts = {}, const std::string& label = "");

/// Random PSD block matrices [[A, B^*], [B, C]]: rank A == rank [A; B].
CheckReport check_lemma10(int trials, int max_block, std::uint64_t seed, double rank_tol = 1e-9);

/// Chain vectors x_0 = D(h), x_m = sum e_{i_1..i_{m-1}} (x) e_i (x)
/// D(e_j (x) T_{i_1}^* ... T_{i_{m-1}}^* h_ij) for a spherical unitary T,
/// scaled so that ||D(h)|| = 1: unit norms and the two telescoping
/// identities evaluated in the dilation.
CheckReport proof_chain_check(const Tuple& t, const std::vector<Vec<cd>>& h, int max_degree, double norm_tol = 1e-8,
                              double identity_tol = 1e-9, double tol = 1e-10);

/// Random pairs: the commuting piece of a direct sum is the direct sum of
/// pieces, and that of R (x) I_k is the piece of R tensor C^k.
CheckReport check_corollary5(std::uint64_t seed, int trials, double angle_tol = 1e-8, double rank_tol = 1e-9);

struct SuiteConfig {
  int degree = 5;
  double tol = 1e-10;
  double rank_tol = 1e-9;
  std::uint64_t seed = 0;
  int trials = -1;  // negative: the suite's default
  double tail_tol = 1e-6;
};

const std::vector<std::string>& suite_names();

/// Runs a named suite ("prop6", "thm15", "thm9", "lemma10", "chain",
/// "corollary5" or "all"). Throws std::invalid_argument for unknown names.
std::vector<CheckReport> run_suite(const std::string& suite, const SuiteConfig& config);

}  // namespace dilab
