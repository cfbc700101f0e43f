#include "dilab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "dilab/cuntz.hpp"
#include "dilab/report.hpp"
#include "dilab/tuple_io.hpp"

namespace dilab::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string suite;
  std::string method;
  std::vector<std::string> inputs;
  int degree = 5;
  double tol = 1e-10;
  double rank_tol = 1e-9;
  std::uint64_t seed = 0;
  bool seed_from_env = false;
  std::string format = "json";
  std::string output;
  int trials = -1;
  double tail_tol = 1e-6;
  std::string dump;
  double dump_limit = 1e6;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  if (c.command == "check") j["suite"] = c.suite;
  if (c.command == "dilate") j["method"] = c.method;
  if (!c.inputs.empty()) j["inputs"] = c.inputs;
  j["degree"] = c.degree;
  j["tol"] = c.tol;
  j["rank_tol"] = c.rank_tol;
  j["seed"] = c.seed;
  j["seed_source"] = c.seed_from_env ? "DILATION_LAB_SEED" : "option";
  j["format"] = c.format;
  if (c.command == "check") {
    j["trials"] = c.trials;
    j["tail_tol"] = c.tail_tol;
  }
  if (c.command == "dilate") {
    j["tail_tol"] = c.tail_tol;
    if (!c.dump.empty()) j["dump"] = c.dump;
    j["dump_limit"] = c.dump_limit;
  }
  return j;
}

void validate(const RunConfig& c) {
  if (c.degree < 2) throw UsageError("--degree must be at least 2");
  if (!(c.tol > 0) || !(c.rank_tol > 0) || !(c.tail_tol > 0)) throw UsageError("tolerances must be positive");
}

ordered_json matrices_json(const Tuple& t) {
  ordered_json mats = ordered_json::array();
  for (const auto& m : t) {
    ordered_json rows = ordered_json::array();
    for (Index r = 0; r < m.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (Index k = 0; k < m.cols(); ++k) row.push_back({m(r, k).real(), m(r, k).imag()});
      rows.push_back(std::move(row));
    }
    mats.push_back(std::move(rows));
  }
  return mats;
}

Tuple load(const std::string& path) { return read_tuple_file(path).tuple; }

const std::string& single_input(const RunConfig& c) {
  if (c.inputs.size() != 1) throw UsageError(c.command + " needs exactly one --input file");
  return c.inputs.front();
}

// ---------------------------------------------------------------------------

void cmd_piece(const RunConfig& c, Report& rep) {
  const Tuple t = load(single_input(c));
  PieceOptions opts;
  opts.rank_tol = c.rank_tol;
  const auto res = maximal_commuting_piece(t, opts);
  ordered_json r;
  r["name"] = "piece";
  r["pass"] = true;
  r["inputs"] = {{"file", c.inputs.front()}, {"n", t.size()}, {"dim", t.dim()}};
  r["tolerances"] = {{"rank", opts.rank_tol}, {"cross_check", opts.cross_check_tol}};
  r["residuals"] = {{"piece_dim", res.subspace.dim()},
                    {"characterization_gap", res.characterization_gap},
                    {"piece_commutator", res.residual},
                    {"unstable", res.unstable}};
  r["piece"] = matrices_json(res.piece);
  rep.results.push_back(std::move(r));
  rep.warnings.insert(rep.warnings.end(), res.warnings.begin(), res.warnings.end());
  if (res.unstable) rep.warnings.push_back("a rank decision was within a factor of 10 of the threshold");
}

void cmd_dilate(const RunConfig& c, Report& rep) {
  const Tuple t = load(single_input(c));
  DilationResult<cd> dil;
  bool exact = true;
  if (c.method == "pure") {
    dil = pure_embedding(t, c.degree, c.tail_tol, c.rank_tol);
    exact = false;
  } else if (c.method == "symmetric") {
    dil = standard_commuting_dilation_pure(t, c.degree, c.tol, c.tail_tol, c.rank_tol);
    exact = false;
  } else if (c.method == "schaeffer") {
    dil = schaeffer_dilation(t, c.degree, c.tol, c.rank_tol);
    if (dil.ambient_dim() <= 2000) measure_schaeffer_orbit(dil, c.rank_tol);
  } else {
    if (t.dim() != 1) throw PreconditionError("cuntz-state input must be a tuple of 1x1 matrices (a sphere point)");
    std::vector<cd> w;
    for (const auto& m : t) w.push_back(m(0, 0));
    dil = cuntz_state_rep(w, c.degree, c.tol);
  }

  const int moment_len = std::min(dil.safe_degree, 2);
  const double iso = isometry_residual(dil);
  const double dilation = dilation_residual(dil, t);
  const double moments = moment_residual(dil, t, moment_len);
  ordered_json res = {{"embed_isometry", iso}, {"dilation_property", dilation}, {"moments", moments}};
  ordered_json bounds;
  bool pass = true;
  if (exact) {
    bounds = {{"embed_isometry", c.tol}, {"dilation_property", c.tol}, {"moments", c.tol}};
    pass = iso <= c.tol && dilation <= c.tol && moments <= c.tol;
  } else {
    // Truncation errors: the embedding loses the tail, R_i^* E misses the
    // top degree, and moments of length <= L see Phi^{M+1-L}(I).
    const double moment_bound = hermitian_norm(cp_power_identity(t, c.degree + 1 - moment_len)) + c.tol;
    bounds = {{"embed_isometry", dil.tail_bound + c.tol},
              {"dilation_property", std::sqrt(dil.tail_bound) + c.tol},
              {"moments", moment_bound}};
    pass = iso <= dil.tail_bound + c.tol && dilation <= std::sqrt(dil.tail_bound) + c.tol && moments <= moment_bound;
  }
  const Mat<cd> window = ambient_window(dil, dil.safe_degree);
  if (dil.kind != DilationKind::pure_symmetric_fock) {
    const auto rel = cuntz_residuals(dil, window);
    res["window_isometry_relations"] = rel.isometry;
    res["window_row_sum"] = rel.row_sum;
    bounds["window_isometry_relations"] = c.tol;
    pass = pass && rel.isometry <= c.tol;
    if (row_sum_identity_defect(t) <= c.tol && exact) {
      bounds["window_row_sum"] = c.tol;
      pass = pass && rel.row_sum <= c.tol;
    }
  }
  if (dil.kind == DilationKind::pure_symmetric_fock) res["symmetric_leakage"] = dil.leakage;

  ordered_json r;
  r["name"] = "dilate";
  r["pass"] = pass;
  r["inputs"] = {{"file", c.inputs.front()}, {"n", t.size()}, {"dim", t.dim()}, {"method", c.method}};
  r["tolerances"] = bounds;
  r["kind"] = to_string(dil.kind);
  r["ambient_dim"] = dil.ambient_dim();
  r["base_dim"] = dil.base_dim();
  r["fock_dim"] = dil.fock_dim();
  r["defect_rank"] = dil.aux_dim;
  r["truncation_degree"] = c.degree;
  r["safe_degree"] = dil.safe_degree;
  r["window_dim"] = window.cols();
  r["tail_bound"] = dil.tail_bound;
  if (dil.orbit_dim >= 0) r["orbit_dim"] = {{"measured", dil.orbit_dim}, {"expected", dil.orbit_expected}};
  r["residuals"] = res;
  r["moment_word_length"] = moment_len;

  if (!c.dump.empty()) {
    const double entries = static_cast<double>(dil.letters()) * static_cast<double>(dil.ambient_dim()) *
                           static_cast<double>(dil.ambient_dim());
    if (entries > c.dump_limit) {
      std::ostringstream msg;
      msg << "refusing to dump " << static_cast<long long>(entries) << " matrix entries (limit "
          << static_cast<long long>(c.dump_limit) << "); lower --degree or raise --dump-limit";
      throw UsageError(msg.str());
    }
    TupleFile f{materialize(dil, dil.ambient_dim()), "dilation (" + to_string(dil.kind) + ")",
                "dilation of " + c.inputs.front() + " at degree " + std::to_string(c.degree)};
    write_tuple_file(c.dump, f);
    r["dump"] = c.dump;
  }
  rep.results.push_back(std::move(r));
  if (!pass) rep.warnings.push_back("a dilation residual exceeds its bound");
}

ordered_json atoms_json(const SphericalAtoms<cd>& a) {
  ordered_json out = ordered_json::array();
  for (const auto& atom : a.atoms) {
    ordered_json p = ordered_json::array();
    for (const auto& z : atom.point) p.push_back({z.real(), z.imag()});
    out.push_back({{"point", p}, {"multiplicity", atom.multiplicity}});
  }
  return out;
}

struct SphericalPart {
  Tuple piece;
  ordered_json info;
  double atom_tol = 0;
};

SphericalPart spherical_part(const Tuple& t, const RunConfig& c, Report& rep) {
  SphericalPart out;
  if (is_spherical_unitary(t, c.tol)) {
    out.piece = t;
    out.atom_tol = c.tol;
    out.info = {{"route", "input is a spherical unitary"}};
    return out;
  }
  const double rs = row_sum_identity_defect(t);
  if (rs > c.tol)
    throw PreconditionError("input does not satisfy the Cuntz relations: ||sum T_i T_i^* - I|| = " +
                            std::to_string(rs));
  const auto dil = schaeffer_dilation(t, c.degree, c.tol, c.rank_tol);
  DecompositionOptions opts;
  opts.tol = c.tol;
  opts.rank_tol = c.rank_tol;
  opts.piece.rank_tol = c.rank_tol;
  const auto dec = spherical_decomposition(dil, opts);
  out.piece = dec.piece;
  out.atom_tol = opts.piece.cross_check_tol;
  out.info = {{"route", "decomposition of the minimal isometric dilation"},
              {"window_degree", dec.window_degree},
              {"window_dim", dec.window.dim()},
              {"commuting_dim", dec.commuting.dim()},
              {"spherical_dim", dec.spherical.dim()},
              {"residual_dim", dec.residual.dim()},
              {"cuntz_isometry_residual", dec.isometry_residual},
              {"cuntz_row_sum_residual", dec.row_sum_residual},
              {"reducing_residual", dec.reducing_residual},
              {"piece_is_spherical", dec.piece_is_spherical},
              {"scope", "window-exact: the splitting is verified on degrees <= " +
                            std::to_string(dec.window_degree)}};
  rep.warnings.insert(rep.warnings.end(), dec.warnings.begin(), dec.warnings.end());
  if (dec.piece.dim() > 0 && !dec.piece_is_spherical)
    rep.warnings.push_back("commuting piece is not a spherical unitary to tolerance");
  return out;
}

std::optional<SphericalAtoms<cd>> atoms_of(const SphericalPart& p, const RunConfig& c) {
  if (p.piece.dim() == 0) return std::nullopt;
  AtomOptions o;
  o.tol = p.atom_tol;
  o.seed = c.seed;
  return spectral_atoms(p.piece, o);
}

void cmd_classify(const RunConfig& c, Report& rep) {
  if (c.inputs.empty() || c.inputs.size() > 2) throw UsageError("classify needs one or two --input files");
  ordered_json r;
  r["name"] = "classify";
  r["pass"] = true;
  r["inputs"] = c.inputs;
  std::vector<std::optional<SphericalAtoms<cd>>> atoms;
  ordered_json parts = ordered_json::array();
  for (const auto& path : c.inputs) {
    const Tuple t = load(path);
    const auto part = spherical_part(t, c, rep);
    auto a = atoms_of(part, c);
    ordered_json pj = {{"file", path}, {"n", t.size()}, {"dim", t.dim()}, {"spherical_piece_dim", part.piece.dim()}};
    pj["details"] = part.info;
    if (a) {
      pj["atoms"] = atoms_json(*a);
      pj["merge_tol"] = a->merge_tol;
      pj["reconstruction_residual"] = a->reconstruction_residual;
    } else {
      pj["atoms"] = ordered_json::array();
    }
    parts.push_back(std::move(pj));
    atoms.push_back(std::move(a));
  }
  r["parts"] = parts;
  if (atoms.size() == 1) {
    r["verdict"] = atoms[0] ? "spherical part of dimension " + std::to_string(atoms[0]->total_multiplicity())
                            : std::string("no spherical part");
  } else {
    bool same = false;
    if (!atoms[0] && !atoms[1]) same = true;
    if (atoms[0] && atoms[1]) same = equivalent_spherical(*atoms[0], *atoms[1]);
    r["verdict"] = same ? "equivalent" : "inequivalent";
  }
  rep.results.push_back(std::move(r));
}

void cmd_check(const RunConfig& c, Report& rep) {
  SuiteConfig s;
  s.degree = c.degree;
  s.tol = c.tol;
  s.rank_tol = c.rank_tol;
  s.seed = c.seed;
  s.trials = c.trials;
  s.tail_tol = c.tail_tol;
  for (const auto& r : run_suite(c.suite, s)) rep.add(r);
  rep.warnings.push_back(
      "checks are finite-dimensional and truncated; they do not certify the infinite-dimensional statements");
}

std::uint64_t parse_seed(const char* text) {
  std::string s(text);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError("DILATION_LAB_SEED must be a non-negative integer, got '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError("DILATION_LAB_SEED is out of range");
  }
}

void add_common(CLI::App* sc, RunConfig& c) {
  sc->add_option("--degree", c.degree, "truncation degree M (>= 2)")->capture_default_str();
  sc->add_option("--tol", c.tol, "comparison tolerance")->capture_default_str();
  sc->add_option("--rank-tol", c.rank_tol, "rank tolerance")->capture_default_str();
  sc->add_option("--seed", c.seed, "random seed (DILATION_LAB_SEED overrides)")->capture_default_str();
  sc->add_option("--format", c.format, "report format")
      ->check(CLI::IsMember({"json", "markdown"}))
      ->capture_default_str();
  sc->add_option("--output", c.output, "write the report to this file instead of stdout");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Numerical toolkit for isometric and commuting dilations of operator tuples", "dilation-lab"};
  app.require_subcommand(1);

  auto* piece = app.add_subcommand("piece", "maximal commuting piece of a tuple");
  piece->add_option("--input", c.inputs, "tuple file")->required();
  add_common(piece, c);

  auto* dilate = app.add_subcommand("dilate", "build a dilation");
  dilate->add_option("--input", c.inputs, "tuple file")->required();
  dilate->add_option("--method", c.method, "dilation method")
      ->required()
      ->check(CLI::IsMember({"pure", "symmetric", "schaeffer", "cuntz-state"}));
  dilate->add_option("--tail-tol", c.tail_tol, "purity tail bound accepted")->capture_default_str();
  dilate->add_option("--dump", c.dump, "write the dilation matrices to this tuple file");
  dilate->add_option("--dump-limit", c.dump_limit, "largest number of matrix entries to dump")->capture_default_str();
  add_common(dilate, c);

  auto* classify = app.add_subcommand("classify", "spherical part and joint spectrum; equivalence of two inputs");
  classify->add_option("--input", c.inputs, "tuple file (give once or twice)")->required();
  add_common(classify, c);

  auto* check = app.add_subcommand("check", "run verification suites");
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  check->add_option("suite", c.suite, "suite name")->required()->check(CLI::IsMember(suites));
  check->add_option("--trials", c.trials, "number of random trials (suite default when omitted)");
  check->add_option("--tail-tol", c.tail_tol, "purity tail bound accepted")->capture_default_str();
  add_common(check, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "dilation-lab: " << e.what() << "\n";
    return 2;
  }

  try {
    for (auto* sc : {piece, dilate, classify, check})
      if (sc->parsed()) c.command = sc->get_name();
    if (const char* env = std::getenv("DILATION_LAB_SEED")) {
      c.seed = parse_seed(env);
      c.seed_from_env = true;
    }
    validate(c);

    Report rep;
    rep.command = c.command;
    rep.config = config_json(c);
    if (c.command == "piece") cmd_piece(c, rep);
    if (c.command == "dilate") cmd_dilate(c, rep);
    if (c.command == "classify") cmd_classify(c, rep);
    if (c.command == "check") cmd_check(c, rep);
    if (c.command != "check") {
      for (const auto& r : rep.results) rep.pass = rep.pass && r.value("pass", true);
    }

    const std::string text = render(rep, c.format);
    if (c.output.empty()) {
      out << text;
    } else {
      std::ofstream f(c.output);
      if (!f) throw UsageError("cannot write " + c.output);
      f << text;
    }
    return rep.pass ? 0 : 1;
  } catch (const CharacterizationMismatch& e) {
    err << "dilation-lab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "dilation-lab: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace dilab::cli
