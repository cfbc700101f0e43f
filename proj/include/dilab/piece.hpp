#pragma once

// Maximal commuting piece of an operator tuple.
//
// Two characterizations are computed independently and cross-checked:
//   * commutator closure K: the smallest R-invariant subspace containing the
//     ranges of all commutators R_i R_j - R_j R_i; the piece lives on K^perp.
//   * adjoint kernel: vectors h with (R_i^* R_j^* - R_j^* R_i^*)(R^a)^* h = 0
//     for every word a.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "dilab/subspace.hpp"
#include "dilab/tuples.hpp"

namespace dilab {

class CharacterizationMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotCoInvariant : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PieceOptions {
  double rank_tol = Tolerances::rank;
  double cross_check_tol = Tolerances::principal_angle;
  int word_bound = -1;  // maximum word length; negative means the dimension
  bool cross_check = true;
};

template <typename Scalar = cd>
struct PieceResult {
  Subspace<Scalar> subspace;
  OperatorTuple<Scalar> piece;
  RealOf<Scalar> residual = 0;             // largest commutator norm of the piece
  RealOf<Scalar> characterization_gap = 0;  // angle between the two characterizations
  bool unstable = false;                    // a rank decision sat near its threshold
  std::vector<std::string> warnings;
};

namespace detail {

template <typename Scalar>
RealOf<Scalar> tuple_scale(const OperatorTuple<Scalar>& r) {
  RealOf<Scalar> s = 1;
  for (const auto& m : r) s = std::max(s, op_norm(m));
  return s * s;
}

/// Removes the span of the orthonormal columns q from the columns of x
/// (classical Gram-Schmidt, applied twice).
template <typename Scalar>
void project_out(Mat<Scalar>& x, const Mat<Scalar>& q) {
  if (q.cols() == 0 || x.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) x.noalias() -= q * (q.adjoint() * x);
}

}  // namespace detail

template <typename Scalar>
struct ClosureResult {
  Subspace<Scalar> subspace;
  bool unstable = false;
};

/// Smallest subspace containing every commutator column and invariant under
/// every R_k. Grows block by block: each new block of directions is pushed
/// through every R_k, re-orthogonalized against the frame, and its range
/// appended, until no R_k produces a new direction.
template <typename Scalar>
ClosureResult<Scalar> commutator_closure_detail(const OperatorTuple<Scalar>& r, RealOf<Scalar> rank_tol) {
  using Real = RealOf<Scalar>;
  const Index d = r.dim();
  ClosureResult<Scalar> out;
  const Real thr = rank_tol * detail::tuple_scale(r);
  const int pairs = r.size() * (r.size() - 1) / 2;
  Mat<Scalar> seeds(d, pairs * d);
  int p = 0;
  for (int i = 0; i < r.size(); ++i)
    for (int j = i + 1; j < r.size(); ++j) seeds.middleCols((p++) * d, d) = r[i] * r[j] - r[j] * r[i];
  Mat<Scalar> basis = range_above(seeds, thr, out.unstable);
  Mat<Scalar> frontier = basis;
  while (frontier.cols() > 0 && basis.cols() < d) {
    Mat<Scalar> next(d, frontier.cols() * r.size());
    for (int k = 0; k < r.size(); ++k) next.middleCols(k * frontier.cols(), frontier.cols()) = r[k] * frontier;
    detail::project_out(next, basis);
    frontier = range_above(next, thr, out.unstable);
    Mat<Scalar> grown(d, basis.cols() + frontier.cols());
    grown << basis, frontier;
    basis = std::move(grown);
  }
  out.subspace = Subspace<Scalar>::from_frame(std::move(basis), rank_tol);
  return out;
}

template <typename Scalar>
Subspace<Scalar> commutator_closure(const OperatorTuple<Scalar>& r, RealOf<Scalar> rank_tol = Tolerances::rank) {
  return commutator_closure_detail(r, rank_tol).subspace;
}

template <typename Scalar>
struct AdjointKernelResult {
  Subspace<Scalar> subspace;
  int words_used = 0;  // longest word length actually stacked
  bool unstable = false;
};

/// Joint kernel of (R_i^* R_j^* - R_j^* R_i^*)(R^a)^* over words a with
/// |a| <= word_bound. Row blocks are generated level by level: the rows for
/// the word (k, a) are the rows for a multiplied on the right by R_k^*. Each
/// level is compressed by an SVD against the rows already collected, which
/// stops as soon as a level adds no new row direction (the row space is then
/// closed under right multiplication by every R_k^*).
template <typename Scalar>
AdjointKernelResult<Scalar> adjoint_kernel(const OperatorTuple<Scalar>& r, RealOf<Scalar> rank_tol = Tolerances::rank,
                                           int word_bound = -1) {
  using Real = RealOf<Scalar>;
  const Index d = r.dim();
  AdjointKernelResult<Scalar> out;
  if (word_bound < 0) word_bound = static_cast<int>(d);
  const Real thr = rank_tol * detail::tuple_scale(r);

  // Rows are stored as columns of their adjoints: rows(X) <-> cols(X^*).
  Mat<Scalar> level(d, 0);
  for (int i = 0; i < r.size(); ++i) {
    for (int j = i + 1; j < r.size(); ++j) {
      Mat<Scalar> c_adj = (r[i].adjoint() * r[j].adjoint() - r[j].adjoint() * r[i].adjoint()).adjoint();
      Mat<Scalar> grown(d, level.cols() + d);
      grown << level, c_adj;
      level = std::move(grown);
    }
  }
  Mat<Scalar> rows = range_above(level, thr, out.unstable);
  Mat<Scalar> frontier = rows;
  int depth = 0;
  while (frontier.cols() > 0 && depth < word_bound && rows.cols() < d) {
    // (Y R_k^*)^* = R_k Y^*.
    Mat<Scalar> next(d, frontier.cols() * r.size());
    for (int k = 0; k < r.size(); ++k) next.middleCols(k * frontier.cols(), frontier.cols()) = r[k] * frontier;
    detail::project_out(next, rows);
    frontier = range_above(next, thr, out.unstable);
    if (frontier.cols() > 0) {
      Mat<Scalar> grown(d, rows.cols() + frontier.cols());
      grown << rows, frontier;
      rows = std::move(grown);
    }
    ++depth;
  }
  out.words_used = depth;
  // Kernel of the stacked row matrix.
  // The row frame is orthonormal, so the threshold is absolute.
  Mat<Scalar> stacked = rows.adjoint();
  auto ker = kernel_above(stacked, Real(rank_tol));
  out.unstable = out.unstable || ker.near_threshold;
  out.subspace = Subspace<Scalar>::from_frame(ker.frame, rank_tol);
  return out;
}

/// Compression Q^* R_i Q of R to a co-invariant subspace, in frame
/// coordinates. Throws NotCoInvariant if ||(I - P) R_i^* Q|| > tol.
template <typename Scalar>
OperatorTuple<Scalar> compress(const OperatorTuple<Scalar>& r, const Subspace<Scalar>& s,
                               RealOf<Scalar> tol = Tolerances::comparison) {
  if (s.ambient_dim != r.dim()) throw std::invalid_argument("subspace does not belong to the tuple's space");
  const Mat<Scalar>& q = s.frame;
  for (int i = 0; i < r.size(); ++i) {
    Mat<Scalar> leak = r[i].adjoint() * q;
    leak -= q * (q.adjoint() * leak);
    const auto norm = op_norm(leak);
    if (norm > tol)
      throw NotCoInvariant("subspace is not co-invariant: leakage " + std::to_string(static_cast<double>(norm)));
  }
  return r.map([&](const Mat<Scalar>& m) -> Mat<Scalar> { return q.adjoint() * m * q; });
}

/// Largest ||(I - P) R_i^* P|| over i.
template <typename Scalar>
RealOf<Scalar> coinvariance_defect(const OperatorTuple<Scalar>& r, const Subspace<Scalar>& s) {
  RealOf<Scalar> worst = 0;
  for (const auto& m : r) {
    Mat<Scalar> leak = m.adjoint() * s.frame;
    leak -= s.frame * (s.frame.adjoint() * leak);
    worst = std::max(worst, op_norm(leak));
  }
  return worst;
}

/// Maximal commuting piece via the adjoint-kernel characterization,
/// cross-checked against the orthogonal complement of the commutator closure.
template <typename Scalar>
PieceResult<Scalar> maximal_commuting_piece(const OperatorTuple<Scalar>& r, const PieceOptions& opts = {}) {
  using Real = RealOf<Scalar>;
  PieceResult<Scalar> out;
  auto ak = adjoint_kernel(r, Real(opts.rank_tol), opts.word_bound);
  out.subspace = ak.subspace;
  out.unstable = ak.unstable;
  if (opts.cross_check) {
    auto closure = commutator_closure_detail(r, Real(opts.rank_tol));
    out.unstable = out.unstable || closure.unstable;
    const auto other = orthogonal_complement(closure.subspace);
    out.characterization_gap = max_principal_angle(ak.subspace, other);
    if (out.characterization_gap > Real(opts.cross_check_tol)) {
      throw CharacterizationMismatch("commuting-piece characterizations disagree: dims " +
                                     std::to_string(ak.subspace.dim()) + " vs " + std::to_string(other.dim()) +
                                     ", angle " + std::to_string(static_cast<double>(out.characterization_gap)) +
                                     "; adjust the rank tolerance");
    }
  }
  if (out.unstable) out.warnings.push_back("a rank decision was within a factor 10 of the rank threshold");
  const Real scale = detail::tuple_scale(r);
  out.piece = out.subspace.dim() == 0 ? OperatorTuple<Scalar>::zero(r.size(), 0)
                                      : compress(r, out.subspace, Real(opts.cross_check_tol) * scale);
  out.residual = out.subspace.dim() == 0 ? Real(0) : commutator_norm(out.piece);
  return out;
}

}  // namespace dilab
