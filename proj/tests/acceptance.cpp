// Acceptance run: one line per criterion, exit status 1 if any fails.
// --known-failures k,... exempts the listed criteria from the exit status.

#include <algorithm>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "dilab/cli.hpp"
#include "dilab/cuntz.hpp"
#include "dilab/dilation_piece.hpp"
#include "dilab/random_tuples.hpp"
#include "dilab/tuple_io.hpp"
#include "dilab/verify.hpp"
#include "oracles.hpp"

using namespace dilab;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

long binomial(long a, long b) {
  long r = 1;
  for (long k = 1; k <= b; ++k) r = r * (a - b + k) / k;
  return r;
}

Outcome creation_piece() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0;
  for (auto [n, m] : {std::pair{2, 4}, std::pair{3, 3}}) {
    const auto r = check_prop6(n, m, 1e-8);
    long expected = 0;
    for (int k = 0; k <= m - 1; ++k) expected += binomial(n + k - 1, k);
    ok = ok && r.pass && r.residuals["window_piece_dim"].get<long>() == expected &&
         r.residuals["window_symmetric_dim"].get<long>() == expected;
    worst = std::max(worst, r.residuals["max_angle"].get<double>());
  }
  const double secs = seconds_since(t0);
  return {ok && worst <= 1e-8 && secs < 10,
          "max angle " + num(worst) + " (<= 1e-8), window dims match binomial sums, " + num(secs) + " s (< 10 s)"};
}

Outcome spherical_piece() {
  const auto t0 = std::chrono::steady_clock::now();
  TupleSampler s(kSeed);
  int passed = 0;
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = s.uniform_int(2, 3);
    const Index d = s.uniform_int(1, 6);
    const auto z = s.spherical_unitary(n, d);
    try {
      const auto r = check_thm15(z, 5, 1e-7);
      if (r.pass && r.residuals["piece_dim"].get<Index>() == d) ++passed;
      worst = std::max(worst, r.residuals["max_angle"].get<double>());
    } catch (const std::exception& e) {
      std::cerr << "  spherical unitary " << k << ": " << e.what() << "\n";
    }
  }
  const double secs = seconds_since(t0);
  return {passed == 20 && secs < 60, std::to_string(passed) + "/20 pieces equal the embedded space, max angle " +
                                         num(worst) + " (<= 1e-7), " + num(secs) + " s (< 60 s)"};
}

Outcome matrix_units() {
  const auto dil = schaeffer_dilation(matrix_unit_pair(), 4);
  const auto dp = dilation_commuting_piece(dil);
  const auto rel = cuntz_residuals(dil, ambient_window(dil, dil.safe_degree));
  const double worst = std::max(rel.isometry, rel.row_sum);
  return {dp.piece.subspace.dim() == 0 && worst <= 1e-12,
          "piece dim " + std::to_string(dp.piece.subspace.dim()) + " (= 0), Cuntz residual " + num(worst) +
              " (<= 1e-12)"};
}

Outcome proof_chain() {
  TupleSampler s(kSeed);
  int passed = 0;
  double norm_dev = 0, ident = 0;
  for (int k = 0; k < 10; ++k) {
    const int n = s.uniform_int(2, 3);
    const Index d = s.uniform_int(1, 4);
    const auto z = s.spherical_unitary(n, d);
    std::vector<Vec<cd>> h;
    for (int i = 0; i < n; ++i) h.push_back(s.gaussian(d, 1));
    const auto r = proof_chain_check(z, h, 5, 1e-8, 1e-9);
    if (r.pass && r.residuals["chain_norms"].size() == 5) ++passed;
    norm_dev = std::max(norm_dev, r.residuals["max_norm_deviation"].get<double>());
    ident = std::max({ident, r.residuals["first_identity_residual"].get<double>(),
                      r.residuals["word_identity_residual"].get<double>()});
  }
  return {passed == 10 && norm_dev <= 1e-8 && ident <= 1e-9,
          std::to_string(passed) + "/10 pairs, norm deviation " + num(norm_dev) + " (<= 1e-8) for m <= 4, identities " +
              num(ident) + " (<= 1e-9)"};
}

Outcome poisson() {
  TupleSampler s(kSeed);
  double worst = 0, tail = 0;
  for (int k = 0; k < 10; ++k) {
    const auto t = s.row_contraction(2, s.uniform_int(1, 4));
    const auto p = poisson_check(t, 0.9, 40, 3, 1e-8);
    worst = std::max(worst, p.max_deviation);
    tail = std::max(tail, p.tail);
  }
  return {worst <= 1e-8, "max deviation " + num(worst) + " (<= 1e-8); largest tail ||Phi_r^41(I)|| " + num(tail)};
}

Outcome pure_commuting() {
  TupleSampler s(kSeed);
  bool ok = true;
  double leak = 0, moment_ratio = 0, norm_gap = 0;
  for (int k = 0; k < 10; ++k) {
    const auto t = scale_to_row_norm(s.commuting_tuple(2, s.uniform_int(1, 4)), s.uniform(0.3, 0.6));
    const auto dil = standard_commuting_dilation_pure(t, 14);
    const double tail = dil.tail_bound;
    // ||Ah||^2 over unit h ranges over the spectrum of A^* A.
    Eigen::SelfAdjointEigenSolver<Mat<cd>> es(dil.embed.adjoint() * dil.embed);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    const bool norms_ok = lo >= 1 - 2 * tail && hi <= 1 + 1e-14;
    norm_gap = std::max(norm_gap, std::max(1 - 2 * tail - lo, hi - 1));
    const double mom = moment_residual(dil, t, 3);
    moment_ratio = std::max(moment_ratio, tail > 0 ? mom / tail : (mom > 0 ? 1e300 : 0.0));
    leak = std::max(leak, dil.leakage);
    ok = ok && norms_ok && dil.leakage <= 1e-10 && mom <= 10 * tail;
  }
  return {ok, "norms within [1 - 2 tail, 1] (worst excess " + num(norm_gap) + "), leakage " + num(leak) +
                  " (<= 1e-10), moments up to " + num(moment_ratio) + " x tail (<= 10)"};
}

Outcome cuntz_states() {
  const double c = 1 / std::sqrt(2.0);
  const std::vector<std::vector<cd>> points{{cd(1), cd(0)}, {cd(c), cd(c)}, {cd(0.6), cd(0, 0.8)}};
  double worst = 0;
  for (const auto& w : points) {
    const auto dil = cuntz_state_rep(w, 4);
    const auto images = adjoint_word_images(dil, 4);
    for (const auto& [a, xa] : images)
      for (const auto& [b, xb] : images) {
        cd want = 1;
        for (int i : a.letters) want *= w[static_cast<std::size_t>(i)];
        for (int i : b.letters) want *= std::conj(w[static_cast<std::size_t>(i)]);
        worst = std::max(worst, std::abs((xa.adjoint() * xb)(0, 0) - want));
      }
  }
  return {worst <= 1e-10, "max vacuum moment error " + num(worst) + " (<= 1e-10) over |a|, |b| <= 4"};
}

Outcome psd_blocks() {
  const auto r = check_lemma10(200, 4, kSeed, 1e-9);
  const auto v = r.residuals["violations"].get<int>();
  return {r.pass && v == 0, std::to_string(v) + " violations in 200 trials"};
}

Outcome sums_and_tensors() {
  const auto r = check_corollary5(kSeed, 50, 1e-8);
  const double angle = std::max(r.residuals["max_sum_angle"].get<double>(), r.residuals["max_tensor_angle"].get<double>());
  return {r.pass && angle <= 1e-8, "max angle " + num(angle) + " (<= 1e-8) over 50 pairs"};
}

double atom_error(const std::vector<std::vector<cd>>& pts, const SphericalAtoms<cd>& got, bool& multiplicities_ok) {
  // Expected multiset: group identical construction points.
  std::vector<std::pair<std::vector<cd>, Index>> want;
  for (const auto& p : pts) {
    bool found = false;
    for (auto& [q, m] : want)
      if (q == p) {
        ++m;
        found = true;
      }
    if (!found) want.emplace_back(p, 1);
  }
  multiplicities_ok = want.size() == got.atoms.size();
  double worst = 0;
  for (const auto& [q, m] : want) {
    double best = std::numeric_limits<double>::infinity();
    Index mult = -1;
    for (const auto& a : got.atoms) {
      double dist = 0;
      for (std::size_t i = 0; i < q.size(); ++i) dist = std::max(dist, std::abs(q[i] - a.point[i]));
      if (dist < best) {
        best = dist;
        mult = a.multiplicity;
      }
    }
    multiplicities_ok = multiplicities_ok && mult == m;
    worst = std::max(worst, best);
  }
  return worst;
}

Outcome classification() {
  TupleSampler s(kSeed);
  int equiv_ok = 0, inequiv_ok = 0, trips_ok = 0;
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = s.uniform_int(2, 3);
    const Index d = s.uniform_int(1, 5);
    std::vector<std::vector<cd>> pts;
    for (Index p = 0; p < d; ++p) pts.push_back(p > 0 && s.uniform_int(0, 2) == 0 ? pts.back() : s.sphere_point(n));
    const auto z = s.spherical_unitary(pts);
    const auto w = conjugate(z, s.haar_unitary(d));
    const auto az = spectral_atoms(z);
    const auto aw = spectral_atoms(w);
    if (equivalent_spherical(az, aw)) ++equiv_ok;

    // Move one point, or change one multiplicity.
    auto moved = pts;
    moved[0] = s.sphere_point(n);
    auto extra = pts;
    extra.push_back(pts[0]);
    if (!equivalent_spherical(az, spectral_atoms(s.spherical_unitary(moved))) &&
        !equivalent_spherical(az, spectral_atoms(s.spherical_unitary(extra))))
      ++inequiv_ok;

    bool mult_ok = false;
    const double err = atom_error(pts, aw, mult_ok);
    worst = std::max(worst, err);
    if (mult_ok && err <= 1e-8) ++trips_ok;
  }
  return {equiv_ok == 20 && inequiv_ok == 20 && trips_ok == 20,
          "equivalent " + std::to_string(equiv_ok) + "/20, inequivalent " + std::to_string(inequiv_ok) +
              "/20, round trips " + std::to_string(trips_ok) + "/20 with atom error " + num(worst) + " (<= 1e-8)"};
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "dilation-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

bool bit_equal(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  for (int i = 0; i < a.size(); ++i)
    if (std::memcmp(a[i].data(), b[i].data(), sizeof(cd) * static_cast<std::size_t>(a[i].size())) != 0) return false;
  return true;
}

Outcome cli_contract() {
  std::string first, second;
  const int c1 = run_cli({"check", "all", "--seed", "1"}, &first);
  const int c2 = run_cli({"check", "all", "--seed", "1"}, &second);
  const bool deterministic = c1 == c2 && !first.empty() && first == second;

  const auto dir = std::filesystem::temp_directory_path();
  const auto contraction = (dir / "dilab_acceptance_t.json").string();
  const auto broken = (dir / "dilab_acceptance_broken.json").string();
  TupleSampler s(kSeed);
  write_tuple_file(contraction, TupleFile{s.row_contraction(2, 2), std::nullopt, std::nullopt});
  {
    std::ofstream(broken) << "{\"n\": 2, \"dim\": ";
  }
  const bool codes = c1 == 0 && run_cli({"check", "prop6"}) == 0 &&
                     run_cli({"dilate", "--input", contraction, "--method", "schaeffer", "--degree", "3", "--tol",
                              "1e-300"}) == 1 &&
                     run_cli({"check", "nosuch"}) == 2 && run_cli({"piece", "--input", broken}) == 2 &&
                     run_cli({"check", "prop6", "--degree", "1"}) == 2;

  bool round_trip = true;
  for (int k = 0; k < 50; ++k) {
    auto ops = s.random_tuple(s.uniform_int(1, 3), s.uniform_int(1, 4)).matrices();
    if (k % 5 == 0) {
      ops[0](0, 0) = cd(-0.0, std::numeric_limits<double>::denorm_min());
      ops[0](ops[0].rows() - 1, 0) = cd(std::numeric_limits<double>::max(), 1e-310);
    }
    const Tuple t(std::move(ops));
    round_trip = round_trip && bit_equal(t, parse_tuple_file(serialize(TupleFile{t, "t", std::nullopt})).tuple);
  }
  std::filesystem::remove(contraction);
  std::filesystem::remove(broken);
  return {deterministic && codes && round_trip, std::string("check all byte-identical: ") +
                                                    (deterministic ? "yes" : "no") + ", exit codes 0/1/2: " +
                                                    (codes ? "yes" : "no") +
                                                    ", bit-exact round trip of 50 files: " + (round_trip ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance criteria");
  std::vector<int> known;
  app.add_option("--known-failures", known, "Criteria whose failure is tolerated in the exit code")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"creation tuple piece is the symmetric Fock space", creation_piece},
      {"spherical unitaries: dilation piece is the original space", spherical_piece},
      {"matrix units: trivial piece and Cuntz relations", matrix_units},
      {"chain vectors and telescoping identities", proof_chain},
      {"Poisson transform at r = 0.9, M = 40", poisson},
      {"pure commuting embedding", pure_commuting},
      {"Cuntz-state vacuum moments", cuntz_states},
      {"PSD block rank property", psd_blocks},
      {"pieces of sums and tensor products", sums_and_tensors},
      {"classification of spherical unitaries", classification},
      {"command-line contract", cli_contract},
  };
  int failed = 0, unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) {
      ++failed;
      if (std::find(known.begin(), known.end(), static_cast<int>(k + 1)) == known.end()) ++unexpected;
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1) << ". " << criteria[k].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria pass"
            << std::endl;
  if (!known.empty()) {
    std::cout << "known failures tolerated:";
    for (int k : known) std::cout << " " << k;
    std::cout << "; unexpected failures: " << unexpected << std::endl;
    return unexpected == 0 ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
