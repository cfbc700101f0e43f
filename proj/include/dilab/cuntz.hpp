#pragma once

// Tuples satisfying the Cuntz relations: splitting off the part generated by
// the commuting piece, and classifying finite spherical unitaries by their
// joint spectrum.

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dilab/dilation_piece.hpp"

namespace dilab {

template <typename Scalar = cd>
struct SphericalDecomposition {
  using Real = RealOf<Scalar>;
  Subspace<Scalar> window;     // where the truncated tuple obeys the relations exactly
  Subspace<Scalar> commuting;  // L^c, inside the window
  Subspace<Scalar> spherical;  // L0: word orbit of L^c within the window
  Subspace<Scalar> residual;   // L1: window minus L0
  OperatorTuple<Scalar> piece; // compression to L^c
  bool piece_is_spherical = false;
  Real isometry_residual = 0;  // Cuntz relations on the window
  Real row_sum_residual = 0;
  Real reducing_residual = 0;  // max ||P1 W_i P0||, ||P0 W_i P1|| inside the window
  int window_degree = 0;
  std::vector<std::string> warnings;
};

struct DecompositionOptions {
  double tol = 1e-10;           // Cuntz relations and reducing residuals
  double rank_tol = Tolerances::rank;
  PieceOptions piece{};
};

namespace detail {

/// Closure of span(start) under x -> P_window R_i x.
template <typename Scalar>
Mat<Scalar> window_orbit(const DilationResult<Scalar>& dil, const Mat<Scalar>& window, const Mat<Scalar>& start,
                         RealOf<Scalar> rank_tol) {
  Mat<Scalar> basis = start;
  Mat<Scalar> frontier = start;
  while (frontier.cols() > 0 && basis.cols() < window.cols()) {
    Mat<Scalar> next(dil.ambient_dim(), frontier.cols() * dil.letters());
    for (int i = 0; i < dil.letters(); ++i) next.middleCols(i * frontier.cols(), frontier.cols()) = apply(dil, i, frontier);
    next = window * (window.adjoint() * next);
    project_out(next, basis);
    bool fragile = false;
    frontier = range_above(next, rank_tol, fragile);
    Mat<Scalar> grown(basis.rows(), basis.cols() + frontier.cols());
    grown << basis, frontier;
    basis = std::move(grown);
  }
  return basis;
}

}  // namespace detail

/// Splits the window of a Cuntz-relation dilation into the reducing part
/// generated by the maximal commuting piece and its complement.
template <typename Scalar>
SphericalDecomposition<Scalar> spherical_decomposition(const DilationResult<Scalar>& dil,
                                                       const DecompositionOptions& opts = {}) {
  using Real = RealOf<Scalar>;
  SphericalDecomposition<Scalar> out;
  out.window_degree = dil.safe_degree;
  const Mat<Scalar> q = ambient_window(dil, dil.safe_degree);
  out.window = Subspace<Scalar>::from_frame(q, Real(opts.rank_tol));
  const auto rel = cuntz_residuals(dil, q);
  out.isometry_residual = rel.isometry;
  out.row_sum_residual = rel.row_sum;
  if (rel.isometry > opts.tol || rel.row_sum > opts.tol)
    throw PreconditionError("Cuntz relations fail on the window: isometry residual " +
                            std::to_string(static_cast<double>(rel.isometry)) + ", row-sum residual " +
                            std::to_string(static_cast<double>(rel.row_sum)));

  const auto dp = dilation_commuting_piece(dil, opts.piece);
  const auto lc_full = Subspace<Scalar>::from_frame(dp.ambient_frame(), Real(opts.rank_tol));
  out.commuting = intersection(lc_full, out.window, Real(opts.piece.cross_check_tol));
  if (out.commuting.dim() != lc_full.dim())
    out.warnings.push_back("commuting piece is not contained in the window; using its intersection");
  if (!dp.piece.warnings.empty())
    out.warnings.insert(out.warnings.end(), dp.piece.warnings.begin(), dp.piece.warnings.end());

  Mat<Scalar> l0 = detail::window_orbit(dil, q, out.commuting.frame, Real(opts.rank_tol));
  out.spherical = Subspace<Scalar>::from_frame(l0, Real(opts.rank_tol));
  // Complement inside the window, in ambient coordinates.
  Mat<Scalar> coords = q.adjoint() * l0;
  out.residual = Subspace<Scalar>::from_frame(q * complement_frame(coords), Real(opts.rank_tol));

  for (int i = 0; i < dil.letters(); ++i) {
    const Mat<Scalar> w0 = apply(dil, i, out.spherical.frame);
    const Mat<Scalar> w1 = apply(dil, i, out.residual.frame);
    out.reducing_residual = std::max(out.reducing_residual, op_norm((out.residual.frame.adjoint() * w0).eval()));
    out.reducing_residual = std::max(out.reducing_residual, op_norm((out.spherical.frame.adjoint() * w1).eval()));
  }

  if (out.commuting.dim() > 0) {
    std::vector<Mat<Scalar>> ops;
    for (int i = 0; i < dil.letters(); ++i)
      ops.push_back(out.commuting.frame.adjoint() * apply(dil, i, out.commuting.frame));
    out.piece = OperatorTuple<Scalar>(std::move(ops));
    out.piece_is_spherical = is_spherical_unitary(out.piece, Real(opts.piece.cross_check_tol));
  } else {
    out.piece = OperatorTuple<Scalar>::zero(dil.letters(), 0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Joint spectrum of a finite spherical unitary.

template <typename Scalar = cd>
struct Atom {
  std::vector<Scalar> point;
  Index multiplicity = 0;
};

template <typename Scalar = cd>
struct SphericalAtoms {
  using Real = RealOf<Scalar>;
  int n = 0;
  std::vector<Atom<Scalar>> atoms;  // sorted lexicographically by coordinates
  Real merge_tol = 1e-7;
  Real reconstruction_residual = 0;  // max_i || Z_i - U diag U^* ||
  Mat<Scalar> basis;                 // joint eigenbasis, grouped by atom

  Index total_multiplicity() const {
    Index s = 0;
    for (const auto& a : atoms) s += a.multiplicity;
    return s;
  }
};

struct AtomOptions {
  double tol = 1e-10;            // spherical-unitary precondition
  double merge_tol = 1e-7;       // atom clustering distance
  double gap = 1e-6;             // eigenvalues closer than this form one cluster
  double scalar_tol = 1e-8;      // a cluster must act by scalars to this accuracy
  int max_redraws = 5;
  std::uint64_t seed = 0;
};

namespace detail {

template <typename Scalar>
bool point_less(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

template <typename Scalar>
RealOf<Scalar> point_distance(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  RealOf<Scalar> s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

template <typename Scalar>
struct Cluster {
  Mat<Scalar> frame;
  std::vector<Scalar> point;
};

/// Splits span(u) into joint eigenspaces of z.
template <typename Scalar>
void refine(const OperatorTuple<Scalar>& z, const Mat<Scalar>& u, const AtomOptions& opts, std::mt19937_64& rng,
            std::vector<Cluster<Scalar>>& out) {
  using Real = RealOf<Scalar>;
  const Index k = u.cols();
  std::vector<Mat<Scalar>> local;
  for (const auto& m : z) local.push_back(u.adjoint() * m * u);

  auto scalar_point = [&](std::vector<Scalar>& pt) {
    pt.clear();
    for (int i = 0; i < z.size(); ++i) {
      const Scalar lambda = local[static_cast<std::size_t>(i)].trace() / Real(k);
      pt.push_back(lambda);
      const Mat<Scalar> res = z[i] * u - u * lambda;
      if (op_norm(res) > opts.scalar_tol) return false;
    }
    return true;
  };
  std::vector<Scalar> pt;
  if (scalar_point(pt)) {
    out.push_back({u, pt});
    return;
  }
  std::normal_distribution<Real> gauss(0, 1);
  for (int attempt = 0; attempt <= opts.max_redraws; ++attempt) {
    Mat<Scalar> h = Mat<Scalar>::Zero(k, k);
    for (const auto& m : local) {
      h += Scalar(gauss(rng)) * (m + m.adjoint());
      h += Scalar(gauss(rng)) * (Scalar(0, 1) * (m - m.adjoint()));
    }
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(h);
    const auto& ev = es.eigenvalues();
    std::vector<std::pair<Index, Index>> groups;  // [begin, end) in sorted eigenvalues
    Index begin = 0;
    for (Index j = 1; j <= k; ++j) {
      if (j == k || ev(j) - ev(j - 1) >= opts.gap) {
        groups.emplace_back(begin, j);
        begin = j;
      }
    }
    if (groups.size() == 1) continue;  // no split; draw again
    for (const auto& [b, e] : groups) refine(z, (u * es.eigenvectors().middleCols(b, e - b)).eval(), opts, rng, out);
    return;
  }
  throw std::runtime_error("joint diagonalization did not separate a cluster after " +
                           std::to_string(opts.max_redraws) + " redraws");
}

}  // namespace detail

/// Joint eigenvalues (points of the unit sphere) of a spherical unitary,
/// with multiplicities.
template <typename Scalar>
SphericalAtoms<Scalar> spectral_atoms(const OperatorTuple<Scalar>& z, const AtomOptions& opts = {}) {
  static_assert(Eigen::NumTraits<Scalar>::IsComplex, "spectral atoms need complex scalars");
  using Real = RealOf<Scalar>;
  if (!is_spherical_unitary(z, Real(opts.tol))) throw PreconditionError("tuple is not a spherical unitary");
  std::mt19937_64 rng(opts.seed);
  std::vector<detail::Cluster<Scalar>> clusters;
  detail::refine(z, Mat<Scalar>::Identity(z.dim(), z.dim()).eval(), opts, rng, clusters);

  // Merge clusters whose points are within merge_tol (single linkage).
  const std::size_t c = clusters.size();
  std::vector<std::size_t> parent(c);
  for (std::size_t i = 0; i < c; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = i + 1; j < c; ++j)
      if (detail::point_distance(clusters[i].point, clusters[j].point) <= opts.merge_tol) parent[find(i)] = find(j);

  struct Group {
    std::vector<Scalar> sum;
    Index mult = 0;
    std::vector<Mat<Scalar>> frames;
  };
  std::vector<Group> groups;
  std::vector<long> slot(c, -1);
  for (std::size_t i = 0; i < c; ++i) {
    const std::size_t root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(groups.size());
      groups.push_back({std::vector<Scalar>(static_cast<std::size_t>(z.size()), Scalar(0)), 0, {}});
    }
    auto& g = groups[static_cast<std::size_t>(slot[root])];
    const Index m = clusters[i].frame.cols();
    for (std::size_t k = 0; k < g.sum.size(); ++k) g.sum[k] += Real(m) * clusters[i].point[k];
    g.mult += m;
    g.frames.push_back(clusters[i].frame);
  }

  SphericalAtoms<Scalar> out;
  out.n = z.size();
  out.merge_tol = Real(opts.merge_tol);
  struct Entry {
    Atom<Scalar> atom;
    Mat<Scalar> frame;
  };
  std::vector<Entry> entries;
  for (auto& g : groups) {
    Entry e;
    e.atom.multiplicity = g.mult;
    for (auto& x : g.sum) e.atom.point.push_back(x / Real(g.mult));
    e.frame.resize(z.dim(), g.mult);
    Index at = 0;
    for (const auto& f : g.frames) {
      e.frame.middleCols(at, f.cols()) = f;
      at += f.cols();
    }
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return detail::point_less(a.atom.point, b.atom.point); });

  out.basis.resize(z.dim(), z.dim());
  Index at = 0;
  for (const auto& e : entries) {
    out.atoms.push_back(e.atom);
    out.basis.middleCols(at, e.frame.cols()) = e.frame;
    at += e.frame.cols();
  }
  for (int i = 0; i < z.size(); ++i) {
    Vec<Scalar> diag(z.dim());
    Index pos = 0;
    for (const auto& a : out.atoms)
      for (Index m = 0; m < a.multiplicity; ++m) diag(pos++) = a.point[static_cast<std::size_t>(i)];
    const Mat<Scalar> rebuilt = out.basis * diag.asDiagonal() * out.basis.adjoint();
    out.reconstruction_residual = std::max(out.reconstruction_residual, op_norm((z[i] - rebuilt).eval()));
  }
  if (out.reconstruction_residual > opts.scalar_tol)
    throw std::runtime_error("joint diagonalization residual " +
                             std::to_string(static_cast<double>(out.reconstruction_residual)) + " exceeds tolerance");
  return out;
}

/// Multiset equality of atoms: every atom of a must have exactly one atom of
/// b within tol, with the same multiplicity. Ambiguous matches count as
/// inequivalent.
template <typename Scalar>
bool equivalent_spherical(const SphericalAtoms<Scalar>& a, const SphericalAtoms<Scalar>& b,
                          RealOf<Scalar> tol = 1e-7) {
  if (a.n != b.n || a.atoms.size() != b.atoms.size()) return false;
  std::vector<bool> used(b.atoms.size(), false);
  for (const auto& x : a.atoms) {
    long match = -1;
    int candidates = 0;
    for (std::size_t j = 0; j < b.atoms.size(); ++j) {
      if (detail::point_distance(x.point, b.atoms[j].point) <= tol) {
        ++candidates;
        if (!used[j]) match = static_cast<long>(j);
      }
    }
    if (candidates != 1 || match < 0) return false;
    if (b.atoms[static_cast<std::size_t>(match)].multiplicity != x.multiplicity) return false;
    used[static_cast<std::size_t>(match)] = true;
  }
  return true;
}

}  // namespace dilab
