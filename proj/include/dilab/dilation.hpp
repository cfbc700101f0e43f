#pragma once

// Concrete dilations of row contractions on truncated Fock spaces.
//
// Every dilation here lives on an ambient space
//     base (C^{d0})  (+)  Fock frame (x) aux (C^r)
// where the Fock frame is either the truncated full Fock space or a
// co-invariant subspace of it (the symmetric Fock space, for instance).
// The operators act as
//     R_i (h (+) x) = B_i h (+) (vacuum (x) J_i h + (V_i (x) I) x)
// with B_i the base tuple, J_i : C^{d0} -> aux and V_i the creation
// operators compressed to the Fock frame. Ambient coordinates are the base
// first, then Fock frame column p and aux index a at d0 + p*r + a.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dilab/fock.hpp"
#include "dilab/subspace.hpp"
#include "dilab/tuples.hpp"

namespace dilab {

/// A construction was asked for on input that does not meet its hypotheses.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class DilationKind { pure_full_fock, pure_symmetric_fock, schaeffer, cuntz_state };

inline std::string to_string(DilationKind k) {
  switch (k) {
    case DilationKind::pure_full_fock: return "pure-full-fock";
    case DilationKind::pure_symmetric_fock: return "pure-symmetric-fock";
    case DilationKind::schaeffer: return "schaeffer";
    case DilationKind::cuntz_state: return "cuntz-state";
  }
  return "unknown";
}

template <typename Scalar = cd>
struct DilationResult {
  using Real = RealOf<Scalar>;

  DilationKind kind = DilationKind::schaeffer;
  TruncatedFock fock;
  Mat<Scalar> fock_frame;         // full-Fock coordinates of the frame (column 0 is the vacuum); empty when identity_frame is set
  std::vector<int> fock_degrees;  // degree of each frame column
  OperatorTuple<Scalar> fock_ops; // frame^* V_i frame; empty when identity_frame is set
  bool identity_frame = false;    // frame is the whole full Fock space in its own basis
  Index aux_dim = 0;
  Mat<Scalar> aux_frame;          // frame of the defect space in its natural coordinates
  OperatorTuple<Scalar> base_ops; // acts on C^{d0}; dimension 0 for pure embeddings
  std::vector<Mat<Scalar>> inject;  // J_i, aux_dim x d0
  Mat<Scalar> embed;              // ambient x original dimension, isometric
  int safe_degree = 0;
  Real tail_bound = 0;

  // Diagnostics filled by some constructions; negative means not computed.
  Real leakage = 0;
  Index orbit_dim = -1;
  Index orbit_expected = -1;

  int letters() const { return fock.letters(); }
  Index base_dim() const { return base_ops.dim(); }
  Index fock_dim() const { return identity_frame ? fock.dim() : fock_frame.cols(); }
  Index ambient_dim() const { return base_dim() + fock_dim() * aux_dim; }
  Index original_dim() const { return embed.cols(); }
};

namespace detail {

template <typename Scalar>
void check_letter(const DilationResult<Scalar>& dil, int i) {
  if (i < 0 || i >= dil.letters()) throw std::out_of_range("dilation letter out of range");
}

/// For full-Fock frames: index of e_i (x) e^a for every a (or -1).
template <typename Scalar>
std::vector<Index> prepend_table(const DilationResult<Scalar>& dil, int i) {
  std::vector<Index> out;
  if (!dil.identity_frame) return out;
  out.resize(static_cast<std::size_t>(dil.fock.dim()));
  for (Index p = 0; p < dil.fock.dim(); ++p) out[static_cast<std::size_t>(p)] = dil.fock.prepend(i, p);
  return out;
}

}  // namespace detail

/// R_i X for a block of ambient vectors.
template <typename Scalar>
Mat<Scalar> apply(const DilationResult<Scalar>& dil, int i, const Mat<Scalar>& x) {
  detail::check_letter(dil, i);
  const Index d0 = dil.base_dim(), r = dil.aux_dim, f = dil.fock_dim();
  if (x.rows() != dil.ambient_dim()) throw std::invalid_argument("vector block has the wrong ambient dimension");
  Mat<Scalar> out = Mat<Scalar>::Zero(x.rows(), x.cols());
  const auto targets = detail::prepend_table(dil, i);
  const Mat<Scalar> vt = dil.identity_frame ? Mat<Scalar>() : Mat<Scalar>(dil.fock_ops[i].transpose());
  for (Index c = 0; c < x.cols(); ++c) {
    if (d0 > 0) out.col(c).head(d0).noalias() = dil.base_ops[i] * x.col(c).head(d0);
    if (r == 0) continue;
    Eigen::Map<const Mat<Scalar>> z(x.col(c).data() + d0, r, f);
    Eigen::Map<Mat<Scalar>> zo(out.col(c).data() + d0, r, f);
    if (dil.identity_frame) {
      for (Index p = 0; p < f; ++p)
        if (targets[static_cast<std::size_t>(p)] >= 0) zo.col(targets[static_cast<std::size_t>(p)]) = z.col(p);
    } else {
      zo.noalias() = z * vt;
    }
    if (d0 > 0) zo.col(0).noalias() += dil.inject[static_cast<std::size_t>(i)] * x.col(c).head(d0);
  }
  return out;
}

/// R_i^* X for a block of ambient vectors.
template <typename Scalar>
Mat<Scalar> apply_adjoint(const DilationResult<Scalar>& dil, int i, const Mat<Scalar>& x) {
  detail::check_letter(dil, i);
  const Index d0 = dil.base_dim(), r = dil.aux_dim, f = dil.fock_dim();
  if (x.rows() != dil.ambient_dim()) throw std::invalid_argument("vector block has the wrong ambient dimension");
  Mat<Scalar> out = Mat<Scalar>::Zero(x.rows(), x.cols());
  const auto targets = detail::prepend_table(dil, i);
  const Mat<Scalar> vc = dil.identity_frame ? Mat<Scalar>() : Mat<Scalar>(dil.fock_ops[i].conjugate());
  for (Index c = 0; c < x.cols(); ++c) {
    if (d0 > 0) out.col(c).head(d0).noalias() = dil.base_ops[i].adjoint() * x.col(c).head(d0);
    if (r == 0) continue;
    Eigen::Map<const Mat<Scalar>> z(x.col(c).data() + d0, r, f);
    Eigen::Map<Mat<Scalar>> zo(out.col(c).data() + d0, r, f);
    if (dil.identity_frame) {
      for (Index p = 0; p < f; ++p)
        if (targets[static_cast<std::size_t>(p)] >= 0) zo.col(p) = z.col(targets[static_cast<std::size_t>(p)]);
    } else {
      zo.noalias() = z * vc;
    }
    if (d0 > 0) out.col(c).head(d0).noalias() += dil.inject[static_cast<std::size_t>(i)].adjoint() * z.col(0);
  }
  return out;
}

/// Dense matrices of the dilation tuple. Refuses ambient spaces above
/// max_dim, where the structured apply()/apply_adjoint() should be used.
template <typename Scalar>
OperatorTuple<Scalar> materialize(const DilationResult<Scalar>& dil, Index max_dim = 6000) {
  const Index amb = dil.ambient_dim();
  if (amb > max_dim)
    throw std::length_error("ambient dimension " + std::to_string(amb) + " is too large to materialize");
  const Index d0 = dil.base_dim(), r = dil.aux_dim;
  std::vector<Mat<Scalar>> ops;
  for (int i = 0; i < dil.letters(); ++i) {
    Mat<Scalar> m = Mat<Scalar>::Zero(amb, amb);
    if (d0 > 0) m.topLeftCorner(d0, d0) = dil.base_ops[i];
    if (r > 0 && dil.identity_frame) {
      for (Index q = 0; q < dil.fock_dim(); ++q) {
        const Index p = dil.fock.prepend(i, q);
        if (p >= 0) m.block(d0 + p * r, d0 + q * r, r, r).setIdentity();
      }
    } else if (r > 0) {
      const Mat<Scalar>& v = dil.fock_ops[i];
      for (Index p = 0; p < v.rows(); ++p)
        for (Index q = 0; q < v.cols(); ++q)
          if (v(p, q) != Scalar(0))
            m.block(d0 + p * r, d0 + q * r, r, r).diagonal().setConstant(v(p, q));
    }
    if (r > 0) {
      if (d0 > 0) m.block(d0, 0, r, d0) = dil.inject[static_cast<std::size_t>(i)];
    }
    ops.push_back(std::move(m));
  }
  return OperatorTuple<Scalar>(std::move(ops));
}

/// Ambient coordinate columns of the base and of the Fock frame columns of
/// degree <= max_deg.
template <typename Scalar>
Mat<Scalar> ambient_window(const DilationResult<Scalar>& dil, int max_deg) {
  const Index d0 = dil.base_dim(), r = dil.aux_dim;
  std::vector<Index> keep;
  for (Index k = 0; k < d0; ++k) keep.push_back(k);
  for (Index p = 0; p < dil.fock_dim(); ++p)
    if (dil.fock_degrees[static_cast<std::size_t>(p)] <= max_deg)
      for (Index a = 0; a < r; ++a) keep.push_back(d0 + p * r + a);
  Mat<Scalar> w = Mat<Scalar>::Zero(dil.ambient_dim(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) w(keep[c], static_cast<Index>(c)) = Scalar(1);
  return w;
}

/// V_i F for a block of full-Fock vectors, without forming V_i.
template <typename Scalar>
Mat<Scalar> creation_times(const TruncatedFock& fock, int i, const Mat<Scalar>& f) {
  Mat<Scalar> out = Mat<Scalar>::Zero(f.rows(), f.cols());
  for (Index idx = 0; idx < fock.dim(); ++idx) {
    const Index to = fock.prepend(i, idx);
    if (to >= 0) out.row(to) = f.row(idx);
  }
  return out;
}

/// Compresses the dilation to base (+) (G (x) aux), where G has orthonormal
/// columns in the current Fock frame coordinates, starts with the vacuum,
/// and spans a subspace co-invariant under the Fock operators. The result is
/// again a dilation; its embed is the old one expressed in the new frame.
template <typename Scalar>
DilationResult<Scalar> restrict_fock(const DilationResult<Scalar>& dil, const Mat<Scalar>& g,
                                     std::vector<int> degrees) {
  if (g.rows() != dil.fock_dim() || static_cast<Index>(degrees.size()) != g.cols())
    throw std::invalid_argument("Fock restriction frame has the wrong shape");
  if (g.cols() == 0 || std::abs(g(0, 0) - Scalar(1)) > 1e-12)
    throw std::invalid_argument("Fock restriction frame must start with the vacuum");
  DilationResult<Scalar> out = dil;
  out.fock_frame = dil.identity_frame ? g : Mat<Scalar>(dil.fock_frame * g);
  out.identity_frame = false;
  out.fock_degrees = std::move(degrees);
  if (dil.identity_frame) {
    std::vector<Mat<Scalar>> ops;
    for (int i = 0; i < dil.letters(); ++i) ops.push_back(g.adjoint() * creation_times(dil.fock, i, g));
    out.fock_ops = OperatorTuple<Scalar>(std::move(ops));
  } else {
    out.fock_ops = dil.fock_ops.map([&](const Mat<Scalar>& v) -> Mat<Scalar> { return g.adjoint() * v * g; });
  }
  const Index d0 = dil.base_dim(), r = dil.aux_dim;
  out.embed = Mat<Scalar>::Zero(out.ambient_dim(), dil.original_dim());
  out.embed.topRows(d0) = dil.embed.topRows(d0);
  const Mat<Scalar> gc = g.conjugate();
  for (Index c = 0; c < dil.original_dim(); ++c) {
    Eigen::Map<const Mat<Scalar>> z(dil.embed.col(c).data() + d0, r, dil.fock_dim());
    Eigen::Map<Mat<Scalar>> zo(out.embed.col(c).data() + d0, r, g.cols());
    zo.noalias() = z * gc;
  }
  out.orbit_dim = -1;
  out.orbit_expected = -1;
  return out;
}

/// Ambient-coordinate isometry from a restriction back to the original.
template <typename Scalar>
Mat<Scalar> restriction_lift(const DilationResult<Scalar>& original, const Mat<Scalar>& g) {
  const Index d0 = original.base_dim(), r = original.aux_dim;
  Mat<Scalar> lift = Mat<Scalar>::Zero(original.ambient_dim(), d0 + g.cols() * r);
  lift.topLeftCorner(d0, d0).setIdentity();
  for (Index p = 0; p < g.rows(); ++p)
    for (Index q = 0; q < g.cols(); ++q)
      if (g(p, q) != Scalar(0)) lift.block(d0 + p * r, d0 + q * r, r, r).diagonal().setConstant(g(p, q));
  return lift;
}

// ---------------------------------------------------------------------------
// Pure tuples: the embedding h -> sum_a e^a (x) Delta (T^a)^* h.

template <typename Scalar>
struct PureEmbedding {
  DefectData<Scalar> defect;
  TruncatedFock fock;
  Mat<Scalar> embed;  // (fock dim * defect rank) x d
  RealOf<Scalar> tail_bound = 0;
};

/// Builds the embedding without checking purity. The aux coordinates are
/// those of the defect frame.
template <typename Scalar>
PureEmbedding<Scalar> pure_embedding_matrix(const OperatorTuple<Scalar>& t, int max_degree,
                                            RealOf<Scalar> rank_tol = Tolerances::rank) {
  PureEmbedding<Scalar> out;
  out.defect = defect(t, RealOf<Scalar>(Tolerances::comparison), rank_tol);
  out.fock = TruncatedFock(t.size(), max_degree);
  out.tail_bound = hermitian_norm(cp_power_identity(t, max_degree + 1));
  const Index r = out.defect.rank, d = t.dim();
  out.embed = Mat<Scalar>::Zero(out.fock.dim() * r, d);
  if (r == 0) return out;
  // Block for the word a is X_a = frame^* Delta (T^a)^*, and X_{(i,a)} = X_a T_i^*.
  out.embed.topRows(r) = out.defect.frame.adjoint() * out.defect.delta;
  std::vector<Mat<Scalar>> adj;
  for (const auto& m : t) adj.push_back(m.adjoint());
  for (Index idx = 0; idx < out.fock.dim(); ++idx) {
    for (int i = 0; i < t.size(); ++i) {
      const Index child = out.fock.prepend(i, idx);
      if (child < 0) break;
      out.embed.middleRows(child * r, r).noalias() = out.embed.middleRows(idx * r, r) * adj[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

template <typename Scalar>
PureEmbedding<Scalar> checked_pure_embedding(const OperatorTuple<Scalar>& t, int max_degree, RealOf<Scalar> tail_tol,
                                             RealOf<Scalar> rank_tol) {
  if (max_degree < 1) throw PreconditionError("truncation degree must be at least 1");
  if (!is_row_contraction(t, RealOf<Scalar>(Tolerances::comparison)))
    throw PreconditionError("tuple is not a row contraction");
  auto pe = pure_embedding_matrix(t, max_degree, rank_tol);
  if (pe.tail_bound > tail_tol)
    throw PreconditionError("tuple is not pure enough at degree " + std::to_string(max_degree) +
                            ": tail_bound = " + std::to_string(static_cast<double>(pe.tail_bound)) +
                            " exceeds " + std::to_string(static_cast<double>(tail_tol)) + "; raise the degree");
  if (pe.defect.rank == 0) throw PreconditionError("defect rank is zero");
  return pe;
}

/// Embedding into (truncated full Fock) (x) defect space; the dilation is
/// V_i (x) I.
template <typename Scalar>
DilationResult<Scalar> pure_embedding(const OperatorTuple<Scalar>& t, int max_degree,
                                      RealOf<Scalar> tail_tol = 1e-6, RealOf<Scalar> rank_tol = Tolerances::rank) {
  auto pe = checked_pure_embedding(t, max_degree, tail_tol, rank_tol);
  DilationResult<Scalar> out;
  out.kind = DilationKind::pure_full_fock;
  out.fock = pe.fock;
  out.identity_frame = true;
  for (Index idx = 0; idx < pe.fock.dim(); ++idx) out.fock_degrees.push_back(pe.fock.degree_of(idx));
  out.aux_dim = pe.defect.rank;
  out.aux_frame = pe.defect.frame;
  out.base_ops = OperatorTuple<Scalar>::zero(t.size(), 0);
  out.inject.assign(static_cast<std::size_t>(t.size()), Mat<Scalar>(out.aux_dim, 0));
  out.embed = std::move(pe.embed);
  out.safe_degree = max_degree - 1;
  out.tail_bound = pe.tail_bound;
  return out;
}

/// Dimension of span{ R^a X : |a| <= max_len } for a block X of ambient
/// vectors.
template <typename Scalar>
Index orbit_dimension(const DilationResult<Scalar>& dil, const Mat<Scalar>& x, int max_len,
                      RealOf<Scalar> rank_tol = Tolerances::rank) {
  Mat<Scalar> basis = orthonormal_range(x, rank_tol);
  Mat<Scalar> frontier = basis;
  for (int len = 1; len <= max_len && frontier.cols() > 0 && basis.cols() < dil.ambient_dim(); ++len) {
    Mat<Scalar> next(dil.ambient_dim(), frontier.cols() * dil.letters());
    for (int i = 0; i < dil.letters(); ++i) next.middleCols(i * frontier.cols(), frontier.cols()) = apply(dil, i, frontier);
    for (int pass = 0; pass < 2; ++pass) next -= basis * (basis.adjoint() * next);
    frontier = Mat<Scalar>(dil.ambient_dim(), 0);
    if (next.cols() > 0) {
      bool fragile = false;
      frontier = range_above(next, rank_tol, fragile);
    }
    Mat<Scalar> grown(basis.rows(), basis.cols() + frontier.cols());
    grown << basis, frontier;
    basis = std::move(grown);
  }
  return basis.cols();
}

/// The embedding above lands in (symmetric Fock) (x) defect space when T
/// commutes; the dilation is S_i (x) I there.
template <typename Scalar>
DilationResult<Scalar> standard_commuting_dilation_pure(const OperatorTuple<Scalar>& t, int max_degree,
                                                        RealOf<Scalar> tol = Tolerances::comparison,
                                                        RealOf<Scalar> tail_tol = 1e-6,
                                                        RealOf<Scalar> rank_tol = Tolerances::rank) {
  if (!is_commuting(t, tol))
    throw PreconditionError("tuple does not commute: commutator norm " +
                            std::to_string(static_cast<double>(commutator_norm(t))));
  auto pe = checked_pure_embedding(t, max_degree, tail_tol, rank_tol);
  const auto sym = symmetric_basis<Scalar>(pe.fock);
  const Index r = pe.defect.rank, d = t.dim(), f = pe.fock.dim(), g = sym.dim();

  DilationResult<Scalar> out;
  out.kind = DilationKind::pure_symmetric_fock;
  out.fock = pe.fock;
  out.fock_frame = sym.frame;
  out.fock_degrees = sym.column_degree;
  std::vector<Mat<Scalar>> ops;
  for (int i = 0; i < t.size(); ++i) ops.push_back(sym.frame.adjoint() * creation_times(pe.fock, i, sym.frame));
  out.fock_ops = OperatorTuple<Scalar>(std::move(ops));
  out.aux_dim = r;
  out.aux_frame = pe.defect.frame;
  out.base_ops = OperatorTuple<Scalar>::zero(t.size(), 0);
  out.inject.assign(static_cast<std::size_t>(t.size()), Mat<Scalar>(r, 0));
  out.embed = Mat<Scalar>::Zero(g * r, d);
  Mat<Scalar> leak(f * r, d);
  const Mat<Scalar> fc = sym.frame.conjugate();
  const Mat<Scalar> ft = sym.frame.transpose();
  for (Index c = 0; c < d; ++c) {
    Eigen::Map<const Mat<Scalar>> z(pe.embed.col(c).data(), r, f);
    Eigen::Map<Mat<Scalar>> zs(out.embed.col(c).data(), r, g);
    zs.noalias() = z * fc;
    Eigen::Map<Mat<Scalar>> zl(leak.col(c).data(), r, f);
    zl = z - zs * ft;
  }
  out.leakage = op_norm(leak);
  out.safe_degree = max_degree - 1;
  out.tail_bound = pe.tail_bound;
  out.orbit_expected = g * r;
  out.orbit_dim = orbit_dimension(out, out.embed, max_degree, rank_tol);
  return out;
}

// ---------------------------------------------------------------------------
// Schaeffer construction.

template <typename Scalar>
struct SchaefferDefect {
  Mat<Scalar> d2;     // [delta_ij I - T_i^* T_j], nd x nd
  Mat<Scalar> d;      // positive square root
  Mat<Scalar> frame;  // orthonormal basis of the range
  Index rank() const { return frame.cols(); }
};

template <typename Scalar>
SchaefferDefect<Scalar> schaeffer_defect(const OperatorTuple<Scalar>& t, RealOf<Scalar> tol = Tolerances::comparison,
                                         RealOf<Scalar> rank_tol = Tolerances::rank) {
  const Mat<Scalar> b = row_operator(t);
  SchaefferDefect<Scalar> out;
  out.d2 = Mat<Scalar>::Identity(b.cols(), b.cols()) - b.adjoint() * b;
  PsdDecomposition<Scalar> pd;
  try {
    pd = psd_decompose(out.d2, tol);
  } catch (const std::invalid_argument&) {
    throw PreconditionError("tuple is not a row contraction");
  }
  out.d = pd.root;
  const Index n = pd.eigenvalues.size();
  Index first = 0;
  while (first < n && pd.eigenvalues(first) <= rank_tol) ++first;
  out.frame = pd.eigenvectors.rightCols(n - first);
  return out;
}

/// Minimal isometric dilation on H (+) (Fock (x) range D):
///   R_i h = T_i h (+) vacuum (x) D(e_i (x) h),   R_i (e^a (x) x) = e_i (x) e^a (x) x.
template <typename Scalar>
DilationResult<Scalar> schaeffer_dilation(const OperatorTuple<Scalar>& t, int max_degree,
                                          RealOf<Scalar> tol = Tolerances::comparison,
                                          RealOf<Scalar> rank_tol = Tolerances::rank) {
  if (max_degree < 1) throw PreconditionError("truncation degree must be at least 1");
  if (!is_row_contraction(t, tol)) throw PreconditionError("tuple is not a row contraction");
  const auto sd = schaeffer_defect(t, tol, rank_tol);
  const Index d = t.dim();
  DilationResult<Scalar> out;
  out.kind = DilationKind::schaeffer;
  out.fock = TruncatedFock(t.size(), max_degree);
  out.identity_frame = true;
  for (Index idx = 0; idx < out.fock.dim(); ++idx) out.fock_degrees.push_back(out.fock.degree_of(idx));
  out.aux_dim = sd.rank();
  out.aux_frame = sd.frame;
  out.base_ops = t;
  for (int i = 0; i < t.size(); ++i)
    out.inject.push_back(sd.frame.adjoint() * sd.d.middleCols(i * d, d));
  out.embed = Mat<Scalar>::Zero(out.ambient_dim(), d);
  out.embed.topRows(d).setIdentity();
  out.safe_degree = max_degree - 1;
  return out;
}

/// Fills orbit_dim for a Schaeffer dilation: minimality means the words in
/// R applied to H span the whole truncated space.
template <typename Scalar>
void measure_schaeffer_orbit(DilationResult<Scalar>& dil, RealOf<Scalar> rank_tol = Tolerances::rank) {
  dil.orbit_expected = dil.ambient_dim();
  dil.orbit_dim = orbit_dimension(dil, dil.embed, dil.fock.max_degree() + 1, rank_tol);
}

/// D(h_1, ..., h_n) through the antisymmetric vectors
/// h_ij = T_j^* h_i - T_i^* h_j:  sum_i e_i (x) sum_j T_j h_ij.
/// Valid for spherical unitaries, where D is a projection.
template <typename Scalar>
Vec<Scalar> schaeffer_defect_action(const OperatorTuple<Scalar>& t, const std::vector<Vec<Scalar>>& h,
                                    RealOf<Scalar> tol = Tolerances::comparison) {
  if (static_cast<int>(h.size()) != t.size()) throw std::invalid_argument("need one vector per operator");
  if (!is_spherical_unitary(t, tol)) throw PreconditionError("defect formula needs a spherical unitary");
  const Index d = t.dim();
  const int n = t.size();
  Vec<Scalar> out = Vec<Scalar>::Zero(n * d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec<Scalar> hij = t[j].adjoint() * h[static_cast<std::size_t>(i)] - t[i].adjoint() * h[static_cast<std::size_t>(j)];
      out.segment(i * d, d) += t[j] * hij;
    }
  }
  return out;
}

/// Stacks (h_1, ..., h_n) into one vector of C^{nd}.
template <typename Scalar>
Vec<Scalar> stack(const std::vector<Vec<Scalar>>& h) {
  Index total = 0;
  for (const auto& v : h) total += v.size();
  Vec<Scalar> out(total);
  Index at = 0;
  for (const auto& v : h) {
    out.segment(at, v.size()) = v;
    at += v.size();
  }
  return out;
}

/// Representation of the Cuntz relations generated by the state sending
/// words to products of coordinates of the sphere point w: the Schaeffer
/// dilation of the one-dimensional tuple w, whose defect space is the
/// orthogonal complement of conj(w).
template <typename Scalar>
DilationResult<Scalar> cuntz_state_rep(const std::vector<Scalar>& w, int max_degree,
                                       RealOf<Scalar> tol = Tolerances::comparison) {
  RealOf<Scalar> norm2 = 0;
  for (const auto& x : w) norm2 += std::norm(x);
  if (w.empty() || std::abs(norm2 - 1) > tol)
    throw PreconditionError("point is not on the unit sphere: sum |w_i|^2 = " + std::to_string(static_cast<double>(norm2)));
  auto out = schaeffer_dilation(point_tuple(w), max_degree, tol);
  out.kind = DilationKind::cuntz_state;
  if (out.aux_dim != static_cast<Index>(w.size()) - 1)
    throw std::runtime_error("defect space of a sphere point has unexpected rank");
  return out;
}

// ---------------------------------------------------------------------------
// Residuals of the dilation invariants.

template <typename Scalar>
RealOf<Scalar> isometry_residual(const DilationResult<Scalar>& dil) {
  const Index k = dil.original_dim();
  return op_norm((dil.embed.adjoint() * dil.embed - Mat<Scalar>::Identity(k, k)).eval());
}

/// max_i || R_i^* E - E T_i^* ||.
template <typename Scalar>
RealOf<Scalar> dilation_residual(const DilationResult<Scalar>& dil, const OperatorTuple<Scalar>& t) {
  RealOf<Scalar> worst = 0;
  for (int i = 0; i < t.size(); ++i)
    worst = std::max(worst, op_norm((apply_adjoint(dil, i, dil.embed) - dil.embed * t[i].adjoint()).eval()));
  return worst;
}

/// || E^* R_i E - T_i ||, the compression of each generator.
template <typename Scalar>
RealOf<Scalar> compression_residual(const DilationResult<Scalar>& dil, const OperatorTuple<Scalar>& t) {
  RealOf<Scalar> worst = 0;
  for (int i = 0; i < t.size(); ++i)
    worst = std::max(worst, op_norm((dil.embed.adjoint() * apply(dil, i, dil.embed) - t[i]).eval()));
  return worst;
}

/// (R^a)^* E for every word with |a| <= max_len, keyed by word.
template <typename Scalar>
std::map<MultiIndex, Mat<Scalar>> adjoint_word_images(const DilationResult<Scalar>& dil, int max_len) {
  std::map<MultiIndex, Mat<Scalar>> out;
  out.emplace(MultiIndex{}, dil.embed);
  for (int len = 1; len <= max_len; ++len) {
    for (const auto& a : enumerate_indices(dil.letters(), len)) {
      // (R^{b i})^* = R_i^* (R^b)^*.
      MultiIndex prefix(std::vector<int>(a.letters.begin(), a.letters.end() - 1));
      out.emplace(a, apply_adjoint(dil, a.letters.back(), out.at(prefix)));
    }
  }
  return out;
}

/// max over |a|, |b| <= max_len of || E^* R^a (R^b)^* E - T^a (T^b)^* ||.
template <typename Scalar>
RealOf<Scalar> moment_residual(const DilationResult<Scalar>& dil, const OperatorTuple<Scalar>& t, int max_len) {
  const auto images = adjoint_word_images(dil, max_len);
  std::map<MultiIndex, Mat<Scalar>> words;
  for (const auto& [a, x] : images) words.emplace(a, apply_word(t, a));
  RealOf<Scalar> worst = 0;
  for (const auto& [a, xa] : images)
    for (const auto& [b, xb] : images) {
      const Mat<Scalar> got = xa.adjoint() * xb;
      const Mat<Scalar> want = words.at(a) * words.at(b).adjoint();
      worst = std::max(worst, op_norm((got - want).eval()));
    }
  return worst;
}

template <typename Real>
struct CuntzResiduals {
  Real isometry = 0;  // max_ij || Q^* (R_i^* R_j - delta_ij I) Q ||
  Real row_sum = 0;   // || Q^* (sum R_i R_i^* - I) Q ||
};

/// Cuntz relations restricted to the columns of the orthonormal block q.
template <typename Scalar>
CuntzResiduals<RealOf<Scalar>> cuntz_residuals(const DilationResult<Scalar>& dil, const Mat<Scalar>& q) {
  CuntzResiduals<RealOf<Scalar>> out;
  const Index k = q.cols();
  std::vector<Mat<Scalar>> images;
  for (int j = 0; j < dil.letters(); ++j) images.push_back(apply(dil, j, q));
  for (int i = 0; i < dil.letters(); ++i)
    for (int j = 0; j < dil.letters(); ++j) {
      Mat<Scalar> g = images[static_cast<std::size_t>(i)].adjoint() * images[static_cast<std::size_t>(j)];
      if (i == j) g -= Mat<Scalar>::Identity(k, k);
      out.isometry = std::max(out.isometry, op_norm(g));
    }
  Mat<Scalar> s = Mat<Scalar>::Zero(k, k);
  for (int i = 0; i < dil.letters(); ++i) {
    const Mat<Scalar> a = apply_adjoint(dil, i, q);
    s += a.adjoint() * a;
  }
  out.row_sum = op_norm((s - Mat<Scalar>::Identity(k, k)).eval());
  return out;
}

// ---------------------------------------------------------------------------
// Poisson transform.

template <typename Real>
struct PoissonReport {
  Real max_deviation = 0;           // over |a|, |b| <= word_len
  Real identity_deviation = 0;      // a = b = empty
  Real first_order_deviation = 0;   // a = (i), b = empty, max over i
  Real tail = 0;                    // || Phi_r^{M+1}(I) ||
  std::string method;               // "explicit" or "gram"
  bool pass = false;
};

/// Compares psi_r(V^a (V^b)^*) = A_r^* (V^a (V^b)^* (x) I) A_r, with A_r the
/// pure embedding of rT at degree M, against r^{|a|+|b|} T^a (T^b)^*.
///
/// When the Fock space is small, A_r is built explicitly. Otherwise the same
/// quantity is evaluated through (rT)^a G_K ((rT)^b)^*, where
/// G_K = sum_{m<=K} Phi_r^m(Delta_r^2) and K = M - max(|a|, |b|) is the
/// number of Fock degrees shared by (V^a)^* A_r and (V^b)^* A_r.
template <typename Scalar>
PoissonReport<RealOf<Scalar>> poisson_check(const OperatorTuple<Scalar>& t, RealOf<Scalar> r, int max_degree,
                                            int word_len, RealOf<Scalar> tol, Index explicit_limit = 4000) {
  using Real = RealOf<Scalar>;
  if (!(r > 0 && r < 1)) throw PreconditionError("Poisson parameter r must lie in (0, 1)");
  if (!is_row_contraction(t, Real(Tolerances::comparison))) throw PreconditionError("tuple is not a row contraction");
  if (word_len > max_degree) throw PreconditionError("word length exceeds the truncation degree");
  PoissonReport<Real> out;
  const auto rt = t.scaled(Scalar(r));
  out.tail = hermitian_norm(cp_power_identity(rt, max_degree + 1));
  const Index d = t.dim();

  std::map<MultiIndex, Mat<Scalar>> words;
  for (const auto& a : enumerate_words_up_to(t.size(), word_len)) words.emplace(a, apply_word(rt, a));

  auto record = [&](const MultiIndex& a, const MultiIndex& b, const Mat<Scalar>& got) {
    const Real dev = op_norm((got - words.at(a) * words.at(b).adjoint()).eval());
    out.max_deviation = std::max(out.max_deviation, dev);
    if (a.empty() && b.empty()) out.identity_deviation = dev;
    if (a.length() == 1 && b.empty()) out.first_order_deviation = std::max(out.first_order_deviation, dev);
  };

  const TruncatedFock fock(t.size(), max_degree);
  const Index rank_bound = d;
  if (fock.dim() * rank_bound <= explicit_limit) {
    out.method = "explicit";
    auto pe = pure_embedding_matrix(rt, max_degree);
    DilationResult<Scalar> dil;
    dil.kind = DilationKind::pure_full_fock;
    dil.fock = pe.fock;
    dil.identity_frame = true;
    for (Index idx = 0; idx < fock.dim(); ++idx) dil.fock_degrees.push_back(fock.degree_of(idx));
    dil.aux_dim = pe.defect.rank;
    dil.base_ops = OperatorTuple<Scalar>::zero(t.size(), 0);
    dil.inject.assign(static_cast<std::size_t>(t.size()), Mat<Scalar>(dil.aux_dim, 0));
    dil.embed = pe.embed;
    const auto images = adjoint_word_images(dil, word_len);
    for (const auto& [a, xa] : images)
      for (const auto& [b, xb] : images) record(a, b, xa.adjoint() * xb);
  } else {
    out.method = "gram";
    const auto dd = defect(rt);
    Mat<Scalar> term = dd.delta * dd.delta;
    std::vector<Mat<Scalar>> partial;  // partial[K] = G_K
    partial.push_back(term);
    for (int m = 1; m <= max_degree; ++m) {
      term = cp_map(rt, term);
      partial.push_back(partial.back() + term);
    }
    for (const auto& [a, wa] : words)
      for (const auto& [b, wb] : words) {
        const int k = max_degree - std::max(a.length(), b.length());
        record(a, b, wa * partial[static_cast<std::size_t>(k)] * wb.adjoint());
      }
  }
  out.pass = out.max_deviation <= tol;
  return out;
}

}  // namespace dilab
