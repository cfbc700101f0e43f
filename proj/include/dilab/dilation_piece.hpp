#pragma once

// Maximal commuting piece of a dilation, computed on a reduced space.
//
// For a dilation built from creation operators, a vector whose Fock part has
// a non-symmetric component in some degree m >= 2 fails the adjoint-kernel
// condition: stripping leading letters with (V^a)^* and then applying
// V_i^* V_j^* - V_j^* V_i^* detects asymmetry in every adjacent pair of
// tensor positions, and the base and vacuum contributions never reach those
// degrees. The commuting piece therefore lies in
//     X = base (+) (vacuum, degree 1, symmetric degrees >= 2) (x) aux,
// which is co-invariant. The piece of the compression to X equals the piece
// of the full dilation, and X is much smaller than the ambient space.

#include <vector>

#include "dilab/dilation.hpp"
#include "dilab/piece.hpp"

namespace dilab {

/// Frame (in full-Fock coordinates) of vacuum, degree 1 and the symmetric
/// vectors of degrees >= 2, with the degree of each column.
template <typename Scalar>
std::pair<Mat<Scalar>, std::vector<int>> low_or_symmetric_frame(const TruncatedFock& fock) {
  const auto sym = symmetric_basis<Scalar>(fock);
  const int n = fock.letters();
  const Index low = fock.max_degree() >= 1 ? 1 + n : 1;
  const Index first_sym = sym.degree_begin(std::min(2, fock.max_degree() + 1));
  const Index high = sym.dim() - first_sym;
  Mat<Scalar> g = Mat<Scalar>::Zero(fock.dim(), low + high);
  g.leftCols(low) = Mat<Scalar>::Identity(fock.dim(), low);
  g.rightCols(high) = sym.frame.rightCols(high);
  std::vector<int> degrees;
  for (Index c = 0; c < low; ++c) degrees.push_back(c == 0 ? 0 : 1);
  for (Index c = first_sym; c < sym.dim(); ++c) degrees.push_back(sym.column_degree[static_cast<std::size_t>(c)]);
  return {std::move(g), std::move(degrees)};
}

template <typename Scalar>
struct DilationPiece {
  DilationResult<Scalar> reduced;  // compression of the dilation to X
  Mat<Scalar> lift;                // ambient coordinates of X's coordinates
  PieceResult<Scalar> piece;       // in X coordinates
  /// Piece frame in the ambient coordinates of the original dilation.
  Mat<Scalar> ambient_frame() const { return lift * piece.subspace.frame; }
};

/// Commuting piece of a dilation whose Fock frame is the full truncated
/// Fock space. Symmetric-frame dilations are already commuting on the Fock
/// part and are handled by materializing them directly.
template <typename Scalar>
DilationPiece<Scalar> dilation_commuting_piece(const DilationResult<Scalar>& dil, const PieceOptions& opts = {},
                                               Index max_dense = 6000) {
  DilationPiece<Scalar> out;
  if (dil.fock_dim() != dil.fock.dim()) {
    out.reduced = dil;
    out.lift = Mat<Scalar>::Identity(dil.ambient_dim(), dil.ambient_dim());
  } else {
    auto [g, degrees] = low_or_symmetric_frame<Scalar>(dil.fock);
    out.reduced = restrict_fock(dil, g, degrees);
    out.lift = restriction_lift(dil, g);
  }
  out.piece = maximal_commuting_piece(materialize(out.reduced, max_dense), opts);
  return out;
}

template <typename Real>
struct IntersectionCheck {
  Index piece_dim = 0;         // dim H^c(T)
  Index intersection_dim = 0;  // dim (L^c(R) meet E H)
  Real angle = 0;
  bool pass = false;
};

/// H^c(T), embedded, against L^c(R) intersected with the embedded space.
template <typename Scalar>
IntersectionCheck<RealOf<Scalar>> piece_intersection_check(const OperatorTuple<Scalar>& t,
                                                           const DilationResult<Scalar>& dil,
                                                           RealOf<Scalar> tol = Tolerances::principal_angle,
                                                           const PieceOptions& opts = {}) {
  using Real = RealOf<Scalar>;
  IntersectionCheck<Real> out;
  const auto ht = maximal_commuting_piece(t, opts);
  const auto dp = dilation_commuting_piece(dil, opts);
  const auto lc = Subspace<Scalar>::from_frame(dp.ambient_frame(), Real(opts.rank_tol));
  // The embedding of a pure tuple is isometric only up to its tail, so both
  // embedded spaces are re-orthonormalized.
  const auto eh = Subspace<Scalar>::span_of(dil.embed, Real(opts.rank_tol));
  // Angle tolerance doubles as the intersection cutoff.
  const auto meet = intersection(eh, lc, tol);
  const auto embedded = Subspace<Scalar>::span_of((dil.embed * ht.subspace.frame).eval(), Real(opts.rank_tol));
  out.piece_dim = embedded.dim();
  out.intersection_dim = meet.dim();
  out.angle = max_principal_angle(embedded, meet);
  out.pass = out.piece_dim == out.intersection_dim && out.angle <= tol;
  return out;
}

}  // namespace dilab
