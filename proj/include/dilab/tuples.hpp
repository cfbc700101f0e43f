#pragma once

// Pointwise predicates and constructors for operator tuples.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "dilab/fock.hpp"
#include "dilab/operator_tuple.hpp"

namespace dilab {

/// Sum of T_i X T_i^*.
template <typename Scalar>
Mat<Scalar> cp_map(const OperatorTuple<Scalar>& t, const Mat<Scalar>& x) {
  Mat<Scalar> out = Mat<Scalar>::Zero(t.dim(), t.dim());
  for (const auto& m : t) out.noalias() += m * x * m.adjoint();
  return out;
}

/// Sum of T_i T_i^*.
template <typename Scalar>
Mat<Scalar> row_sum(const OperatorTuple<Scalar>& t) {
  return cp_map(t, Mat<Scalar>::Identity(t.dim(), t.dim()).eval());
}

/// Row operator [T_1 ... T_n] of shape d x nd.
template <typename Scalar>
Mat<Scalar> row_operator(const OperatorTuple<Scalar>& t) {
  const Index d = t.dim();
  Mat<Scalar> b(d, d * t.size());
  for (int i = 0; i < t.size(); ++i) b.middleCols(i * d, d) = t[i];
  return b;
}

template <typename Scalar>
bool is_row_contraction(const OperatorTuple<Scalar>& t, RealOf<Scalar> tol = Tolerances::comparison) {
  if (t.dim() == 0) return true;
  Mat<Scalar> g = row_sum(t) - Mat<Scalar>::Identity(t.dim(), t.dim());
  g = (g + g.adjoint()).eval() / RealOf<Scalar>(2);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() <= tol;
}

template <typename Scalar>
struct DefectData {
  Mat<Scalar> delta;
  Index rank = 0;
  Mat<Scalar> frame;  // orthonormal basis of the closed range of delta
};

/// Defect operator (I - sum T_i T_i^*)^{1/2}. Rank is decided on the
/// eigenvalues of the square, with the shared relative rank threshold.
template <typename Scalar>
DefectData<Scalar> defect(const OperatorTuple<Scalar>& t, RealOf<Scalar> tol = Tolerances::comparison,
                          RealOf<Scalar> rank_tol = Tolerances::rank) {
  const Index d = t.dim();
  Mat<Scalar> gap = Mat<Scalar>::Identity(d, d) - row_sum(t);
  PsdDecomposition<Scalar> pd;
  try {
    pd = psd_decompose(gap, tol);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("tuple is not a row contraction");
  }
  DefectData<Scalar> out;
  out.delta = pd.root;
  // Absolute threshold: the identity sets the scale of I - sum T T^*.
  const Index n = pd.eigenvalues.size();
  Index first = 0;
  while (first < n && pd.eigenvalues(first) <= rank_tol) ++first;
  out.frame = pd.eigenvectors.rightCols(n - first);
  out.rank = out.frame.cols();
  return out;
}

template <typename Scalar>
RealOf<Scalar> commutator_norm(const OperatorTuple<Scalar>& t) {
  RealOf<Scalar> worst = 0;
  for (int i = 0; i < t.size(); ++i)
    for (int j = i + 1; j < t.size(); ++j)
      worst = std::max(worst, op_norm((t[i] * t[j] - t[j] * t[i]).eval()));
  return worst;
}

template <typename Scalar>
bool is_commuting(const OperatorTuple<Scalar>& t, RealOf<Scalar> tol = Tolerances::comparison) {
  return commutator_norm(t) <= tol;
}

/// T_{a_1} ... T_{a_m}; identity for the empty word.
template <typename Scalar>
Mat<Scalar> apply_word(const OperatorTuple<Scalar>& t, const MultiIndex& a) {
  Mat<Scalar> out = Mat<Scalar>::Identity(t.dim(), t.dim());
  for (int letter : a.letters) {
    if (letter < 0 || letter >= t.size()) throw std::out_of_range("word letter outside the tuple");
    out = (out * t[letter]).eval();
  }
  return out;
}

/// Phi^m(I) where Phi(X) = sum T_i X T_i^*.
template <typename Scalar>
Mat<Scalar> cp_power_identity(const OperatorTuple<Scalar>& t, int m) {
  Mat<Scalar> x = Mat<Scalar>::Identity(t.dim(), t.dim());
  for (int k = 0; k < m; ++k) x = cp_map(t, x);
  return x;
}

template <typename Real>
struct PurityReport {
  bool pure = false;
  std::vector<Real> decay;  // decay[m] = ||Phi^m(I)||, m = 0..m_max
};

template <typename Scalar>
PurityReport<RealOf<Scalar>> is_pure(const OperatorTuple<Scalar>& t, int m_max = 40,
                                     RealOf<Scalar> tol = Tolerances::comparison) {
  PurityReport<RealOf<Scalar>> out;
  Mat<Scalar> x = Mat<Scalar>::Identity(t.dim(), t.dim());
  out.decay.push_back(t.dim() == 0 ? 0 : 1);
  for (int m = 1; m <= m_max; ++m) {
    x = cp_map(t, x);
    out.decay.push_back(hermitian_norm(x));
  }
  out.pure = out.decay.back() <= tol;
  return out;
}

template <typename Scalar>
RealOf<Scalar> normality_defect(const Mat<Scalar>& m) {
  return op_norm((m * m.adjoint() - m.adjoint() * m).eval());
}

/// max_{i,j} ||T_i T_j^* - T_j^* T_i||.
template <typename Scalar>
RealOf<Scalar> fuglede_putnam_defect(const OperatorTuple<Scalar>& t) {
  RealOf<Scalar> worst = 0;
  for (int i = 0; i < t.size(); ++i)
    for (int j = 0; j < t.size(); ++j)
      worst = std::max(worst, op_norm((t[i] * t[j].adjoint() - t[j].adjoint() * t[i]).eval()));
  return worst;
}

template <typename Scalar>
RealOf<Scalar> row_sum_identity_defect(const OperatorTuple<Scalar>& t) {
  return op_norm((row_sum(t) - Mat<Scalar>::Identity(t.dim(), t.dim())).eval());
}

/// Commuting normal tuple with sum T_i T_i^* = I. Also requires the
/// commuting family {T_i, T_j^*} that normality and commutativity imply.
template <typename Scalar>
bool is_spherical_unitary(const OperatorTuple<Scalar>& t, RealOf<Scalar> tol = Tolerances::comparison) {
  if (t.dim() == 0) return false;
  if (!is_commuting(t, tol)) return false;
  for (const auto& m : t)
    if (normality_defect(m) > tol) return false;
  if (row_sum_identity_defect(t) > tol) return false;
  return fuglede_putnam_defect(t) <= tol;
}

template <typename Scalar>
OperatorTuple<Scalar> direct_sum(const OperatorTuple<Scalar>& a, const OperatorTuple<Scalar>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("direct sum needs tuples of equal length");
  std::vector<Mat<Scalar>> ops;
  const Index da = a.dim(), db = b.dim();
  for (int i = 0; i < a.size(); ++i) {
    Mat<Scalar> m = Mat<Scalar>::Zero(da + db, da + db);
    m.topLeftCorner(da, da) = a[i];
    m.bottomRightCorner(db, db) = b[i];
    ops.push_back(std::move(m));
  }
  return OperatorTuple<Scalar>(std::move(ops));
}

/// T_i (x) I_k, Kronecker product with the identity on the right.
template <typename Scalar>
OperatorTuple<Scalar> tensor_with_identity(const OperatorTuple<Scalar>& t, Index k) {
  if (k < 1) throw std::invalid_argument("tensor factor dimension must be positive");
  const Index d = t.dim();
  return t.map([&](const Mat<Scalar>& m) -> Mat<Scalar> {
    Mat<Scalar> out = Mat<Scalar>::Zero(d * k, d * k);
    for (Index r = 0; r < d; ++r)
      for (Index c = 0; c < d; ++c)
        if (m(r, c) != Scalar(0)) out.block(r * k, c * k, k, k).diagonal().setConstant(m(r, c));
    return out;
  });
}

/// Scalar tuple (t_1, ..., t_n) acting on C^1.
template <typename Scalar>
OperatorTuple<Scalar> point_tuple(const std::vector<Scalar>& w) {
  std::vector<Mat<Scalar>> ops;
  for (const auto& x : w) ops.push_back(Mat<Scalar>::Constant(1, 1, x));
  return OperatorTuple<Scalar>(std::move(ops));
}

/// diag over several points of C^n: T_i = diag(w^(1)_i, ..., w^(k)_i).
template <typename Scalar>
OperatorTuple<Scalar> diagonal_tuple(const std::vector<std::vector<Scalar>>& points) {
  if (points.empty()) throw std::invalid_argument("need at least one point");
  const int n = static_cast<int>(points.front().size());
  const Index k = static_cast<Index>(points.size());
  std::vector<Mat<Scalar>> ops;
  for (int i = 0; i < n; ++i) {
    Mat<Scalar> m = Mat<Scalar>::Zero(k, k);
    for (Index p = 0; p < k; ++p) m(p, p) = points[static_cast<std::size_t>(p)].at(static_cast<std::size_t>(i));
    ops.push_back(std::move(m));
  }
  return OperatorTuple<Scalar>(std::move(ops));
}

/// U T_i U^*.
template <typename Scalar>
OperatorTuple<Scalar> conjugate(const OperatorTuple<Scalar>& t, const Mat<Scalar>& u) {
  return t.map([&](const Mat<Scalar>& m) -> Mat<Scalar> { return u * m * u.adjoint(); });
}

/// The 2x2 pair of matrix units R_1 = E_12, R_2 = E_21: a noncommuting
/// tuple with R_1 R_1^* + R_2 R_2^* = I and trivial commuting piece.
template <typename Scalar = cd>
OperatorTuple<Scalar> matrix_unit_pair() {
  Mat<Scalar> r1 = Mat<Scalar>::Zero(2, 2), r2 = Mat<Scalar>::Zero(2, 2);
  r1(0, 1) = Scalar(1);
  r2(1, 0) = Scalar(1);
  return OperatorTuple<Scalar>({r1, r2});
}

}  // namespace dilab
