#pragma once

// Subspaces of C^d as orthonormal frames, and principal-angle comparisons.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dilab/linalg.hpp"

namespace dilab {

template <typename Scalar = cd>
struct Subspace {
  Index ambient_dim = 0;
  Mat<Scalar> frame;  // ambient_dim x dim, orthonormal columns
  RealOf<Scalar> tol = Tolerances::rank;

  Index dim() const { return frame.cols(); }
  Mat<Scalar> projector() const { return frame * frame.adjoint(); }

  static Subspace zero(Index ambient) { return {ambient, Mat<Scalar>(ambient, 0), Tolerances::rank}; }
  static Subspace full(Index ambient) { return {ambient, Mat<Scalar>::Identity(ambient, ambient), Tolerances::rank}; }

  /// Span of arbitrary columns, orthonormalized at the given rank tolerance.
  static Subspace span_of(const Mat<Scalar>& columns, RealOf<Scalar> rank_tol = Tolerances::rank) {
    return {columns.rows(), orthonormal_range(columns, rank_tol), rank_tol};
  }

  /// Wraps a frame that is already orthonormal.
  static Subspace from_frame(Mat<Scalar> frame, RealOf<Scalar> tol = Tolerances::rank) {
    const Index rows = frame.rows();
    return {rows, std::move(frame), tol};
  }
};

/// Largest principal angle between two subspaces, in radians. Subspaces of
/// different dimension are at angle pi/2.
template <typename Scalar>
RealOf<Scalar> max_principal_angle(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  using Real = RealOf<Scalar>;
  if (a.ambient_dim != b.ambient_dim) throw std::invalid_argument("subspaces live in different spaces");
  if (a.dim() != b.dim()) return std::numbers::pi_v<Real> / 2;
  if (a.dim() == 0) return 0;
  // Sines of the principal angles are the singular values of (I - P_b) Q_a.
  Mat<Scalar> ra = a.frame - b.frame * (b.frame.adjoint() * a.frame);
  Mat<Scalar> rb = b.frame - a.frame * (a.frame.adjoint() * b.frame);
  const Real s = std::min(Real(1), std::max(op_norm(ra), op_norm(rb)));
  return std::asin(s);
}

/// Dimension-independent gap ||P_a - P_b|| (equal to sin of the largest
/// angle when dimensions agree, 1 otherwise).
template <typename Scalar>
RealOf<Scalar> subspace_gap(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  if (a.dim() != b.dim()) return 1;
  return std::sin(max_principal_angle(a, b));
}

template <typename Scalar>
bool same_subspace(const Subspace<Scalar>& a, const Subspace<Scalar>& b, RealOf<Scalar> angle_tol) {
  return a.dim() == b.dim() && max_principal_angle(a, b) <= angle_tol;
}

/// Is every vector of a (nearly) contained in b?
template <typename Scalar>
RealOf<Scalar> containment_defect(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  if (a.dim() == 0) return 0;
  return op_norm((a.frame - b.frame * (b.frame.adjoint() * a.frame)).eval());
}

template <typename Scalar>
Subspace<Scalar> orthogonal_complement(const Subspace<Scalar>& s) {
  return {s.ambient_dim, complement_frame(s.frame), s.tol};
}

/// a intersected with b: kernel of (I - P_b) restricted to a.
template <typename Scalar>
Subspace<Scalar> intersection(const Subspace<Scalar>& a, const Subspace<Scalar>& b, RealOf<Scalar> rank_tol) {
  if (a.dim() == 0 || b.dim() == 0) return Subspace<Scalar>::zero(a.ambient_dim);
  Mat<Scalar> r = a.frame - b.frame * (b.frame.adjoint() * a.frame);
  // Absolute threshold: r has norm <= 1, and a singular value s of r is the
  // sine of the angle between a direction of a and the subspace b.
  const Mat<Scalar> coords = kernel_above(r, rank_tol).frame;
  return {a.ambient_dim, a.frame * coords, rank_tol};
}

/// Block-diagonal direct sum of subspaces of C^p and C^q inside C^{p+q}.
template <typename Scalar>
Subspace<Scalar> direct_sum(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
  Mat<Scalar> f = Mat<Scalar>::Zero(a.ambient_dim + b.ambient_dim, a.dim() + b.dim());
  f.topLeftCorner(a.ambient_dim, a.dim()) = a.frame;
  f.bottomRightCorner(b.ambient_dim, b.dim()) = b.frame;
  return {a.ambient_dim + b.ambient_dim, std::move(f), std::max(a.tol, b.tol)};
}

/// s (x) C^k, matching the ordering of tensor_with_identity.
template <typename Scalar>
Subspace<Scalar> tensor_identity(const Subspace<Scalar>& s, Index k) {
  Mat<Scalar> f = Mat<Scalar>::Zero(s.ambient_dim * k, s.dim() * k);
  for (Index r = 0; r < s.ambient_dim; ++r)
    for (Index c = 0; c < s.dim(); ++c)
      f.block(r * k, c * k, k, k).diagonal().setConstant(s.frame(r, c));
  return {s.ambient_dim * k, std::move(f), s.tol};
}

/// Image of s under an isometry.
template <typename Scalar>
Subspace<Scalar> image_under(const Mat<Scalar>& isometry, const Subspace<Scalar>& s) {
  if (isometry.cols() != s.ambient_dim) throw std::invalid_argument("isometry does not act on this subspace's space");
  return {isometry.rows(), isometry * s.frame, s.tol};
}

}  // namespace dilab
