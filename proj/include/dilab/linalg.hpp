#pragma once

// Dense linear-algebra helpers shared by every module: Hermitian square
// roots, numerical rank, orthonormal ranges and kernels.

#include <algorithm>
#include <limits>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dilab {

using Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

using cd = std::complex<double>;

/// Default tolerances. A single rank rule is shared by all modules so that
/// rank claims made by different operations are consistent.
struct Tolerances {
  static constexpr double comparison = 1e-10;
  static constexpr double rank = 1e-9;
  static constexpr double principal_angle = 1e-8;
};

/// Singular/eigen values at or below this are treated as zero.
/// Relative to the largest value, with a floor of 1 so that an all-noise
/// spectrum is not promoted to full rank.
template <typename Real>
Real rank_threshold(Real largest, Real tol) {
  return tol * std::max(largest, Real(1));
}

/// Values within a factor 10 of the threshold make a rank decision fragile.
template <typename Real>
bool near_threshold(Real value, Real threshold) {
  return value > threshold / Real(10) && value < threshold * Real(10);
}

/// Above this size (smaller dimension) rank decisions use a column-pivoted
/// QR instead of a Jacobi SVD. Eigen 3.4.0's divide-and-conquer SVD is not
/// used: its deflation step fails on the structured matrices built here.
inline constexpr Index kJacobiLimit = 64;

/// Spectral norm. Zero for empty matrices.
template <typename Derived>
RealOf<typename Derived::Scalar> op_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Real = RealOf<Scalar>;
  if (m.size() == 0) return 0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Mat<Scalar> a = m;
  const Real scale = a.cwiseAbs().maxCoeff();
  if (scale == 0) return 0;
  a /= scale;
  if (std::min(a.rows(), a.cols()) <= kJacobiLimit) {
    Eigen::JacobiSVD<Mat<Scalar>> svd(a);
    return scale * svd.singularValues()(0);
  }
  // Largest eigenvalue of the smaller Gram matrix.
  const Mat<Scalar> g = a.rows() < a.cols() ? Mat<Scalar>(a * a.adjoint()) : Mat<Scalar>(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(g, Eigen::EigenvaluesOnly);
  return scale * std::sqrt(std::max(es.eigenvalues().maxCoeff(), Real(0)));
}

/// Orthonormal basis adapted to the column space of m, with a size for each
/// basis direction in decreasing order: singular values (Jacobi SVD) or the
/// diagonal of a column-pivoted QR. With `full` the basis spans the whole
/// row space C^rows; sizes beyond min(rows, cols) are zero.
template <typename Scalar>
struct RankReveal {
  Mat<Scalar> basis;
  Vec<RealOf<Scalar>> sizes;

  Index count_above(RealOf<Scalar> thr) const {
    Index r = 0;
    while (r < sizes.size() && sizes(r) > thr) ++r;
    return r;
  }
  bool fragile(RealOf<Scalar> thr) const {
    for (Index i = 0; i < sizes.size(); ++i)
      if (near_threshold(sizes(i), thr)) return true;
    return false;
  }
};

template <typename Scalar>
RankReveal<Scalar> rank_reveal(const Mat<Scalar>& m, bool full) {
  using Real = RealOf<Scalar>;
  RankReveal<Scalar> out;
  const Index rows = m.rows(), k = std::min(m.rows(), m.cols());
  const Index width = full ? rows : k;
  out.sizes = Vec<Real>::Zero(width);
  if (k == 0) {
    out.basis = full ? Mat<Scalar>(Mat<Scalar>::Identity(rows, rows)) : Mat<Scalar>(rows, 0);
    return out;
  }
  if (k <= kJacobiLimit) {
    Eigen::JacobiSVD<Mat<Scalar>> svd(m, full ? Eigen::ComputeFullU : Eigen::ComputeThinU);
    out.basis = svd.matrixU();
    out.sizes.head(k) = svd.singularValues();
    return out;
  }
  Eigen::ColPivHouseholderQR<Mat<Scalar>> qr(m);
  out.basis = qr.householderQ() * Mat<Scalar>::Identity(rows, width);
  out.sizes.head(k) = qr.matrixR().diagonal().head(k).cwiseAbs();
  return out;
}

/// Largest eigenvalue magnitude of a Hermitian matrix; cheaper than op_norm.
template <typename Derived>
RealOf<typename Derived::Scalar> hermitian_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Scalar>
Mat<Scalar> adjoint_of(const Mat<Scalar>& m) {
  return m.adjoint();
}

/// Eigendecomposition of a Hermitian PSD matrix with clamping of slightly
/// negative eigenvalues. Eigenvalues below -tol are rejected.
template <typename Scalar>
struct PsdDecomposition {
  Vec<RealOf<Scalar>> eigenvalues;  // ascending, clamped to >= 0
  Mat<Scalar> eigenvectors;
  Mat<Scalar> root;  // positive square root

  /// Orthonormal frame of the range, counting eigenvalues above the rank
  /// threshold (eigenvalues of the matrix itself, not of its root).
  Mat<Scalar> range_frame(RealOf<Scalar> rank_tol) const {
    const Index n = eigenvalues.size();
    if (n == 0) return Mat<Scalar>(0, 0);
    const RealOf<Scalar> thr = rank_threshold(eigenvalues.maxCoeff(), rank_tol);
    Index first = 0;
    while (first < n && eigenvalues(first) <= thr) ++first;
    return eigenvectors.rightCols(n - first);
  }

  Index rank(RealOf<Scalar> rank_tol) const { return range_frame(rank_tol).cols(); }
};

template <typename Scalar>
PsdDecomposition<Scalar> psd_decompose(const Mat<Scalar>& m, RealOf<Scalar> tol) {
  using Real = RealOf<Scalar>;
  PsdDecomposition<Scalar> out;
  const Index n = m.rows();
  if (n == 0) {
    out.eigenvalues.resize(0);
    out.eigenvectors.resize(0, 0);
    out.root.resize(0, 0);
    return out;
  }
  Mat<Scalar> herm = (m + m.adjoint()) / Real(2);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(herm);
  if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigendecomposition failed");
  out.eigenvalues = es.eigenvalues();
  if (out.eigenvalues(0) < -tol) {
    throw std::invalid_argument("matrix is not positive semidefinite: eigenvalue " +
                                std::to_string(static_cast<double>(out.eigenvalues(0))));
  }
  // Eigenvalues at rounding level are zero; their square roots would be
  // of order sqrt(eps) and spoil projections.
  const Real floor = Real(4 * n) * std::numeric_limits<Real>::epsilon() *
                     std::max(Real(1), out.eigenvalues.cwiseAbs().maxCoeff());
  out.eigenvalues = (out.eigenvalues.array() <= floor).select(Real(0), out.eigenvalues);
  out.eigenvectors = es.eigenvectors();
  out.root = out.eigenvectors * out.eigenvalues.cwiseSqrt().asDiagonal() * out.eigenvectors.adjoint();
  return out;
}

/// Orthonormal range of the columns of x, keeping directions of size above
/// the absolute threshold thr. Wide or tall matrices of low rank are first
/// compressed with a random sketch x * Omega (fixed seed); the sketch is
/// accepted only when x - Q Q^* x has Frobenius norm at most thr / 10,
/// otherwise its width doubles. Sets `fragile` when a kept or dropped size
/// lies within a factor 10 of thr.
template <typename Scalar>
Mat<Scalar> range_above(const Mat<Scalar>& x, RealOf<Scalar> thr, bool& fragile) {
  using Real = RealOf<Scalar>;
  const Index k = std::min(x.rows(), x.cols());
  if (k == 0) return Mat<Scalar>(x.rows(), 0);
  auto finish = [&](const RankReveal<Scalar>& rr) -> Index {
    if (rr.fragile(thr)) fragile = true;
    return rr.count_above(thr);
  };
  if (k > kJacobiLimit) {
    std::mt19937_64 gen(0x5eed);
    std::normal_distribution<Real> normal;
    for (Index width = 32; 2 * width <= k; width *= 2) {
      Mat<Scalar> omega(x.cols(), width);
      for (Index j = 0; j < omega.size(); ++j) omega.data()[j] = Scalar(normal(gen));
      const Mat<Scalar> y = x * omega;
      Eigen::HouseholderQR<Mat<Scalar>> qr(y);
      const Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(x.rows(), width);
      const Mat<Scalar> coeffs = q.adjoint() * x;
      if ((x - q * coeffs).norm() > thr / Real(10)) continue;
      const auto small = rank_reveal(coeffs, false);
      return q * small.basis.leftCols(finish(small));
    }
  }
  const auto rr = rank_reveal(x, false);
  return rr.basis.leftCols(finish(rr));
}

/// Numerical rank: directions of size above rank_threshold(||m||, rank_tol).
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& m, RealOf<typename Derived::Scalar> rank_tol) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return 0;
  Mat<Scalar> a = m;
  const auto rr = rank_reveal(a, false);
  return rr.count_above(rank_threshold(op_norm(a), rank_tol));
}

/// Orthonormal basis of the column space.
template <typename Scalar>
Mat<Scalar> orthonormal_range(const Mat<Scalar>& m, RealOf<Scalar> rank_tol) {
  if (m.cols() == 0 || m.rows() == 0) return Mat<Scalar>(m.rows(), 0);
  const auto rr = rank_reveal(m, false);
  return rr.basis.leftCols(rr.count_above(rank_threshold(op_norm(m), rank_tol)));
}

/// Null space of m together with a flag for fragile rank decisions.
template <typename Scalar>
struct KernelResult {
  Mat<Scalar> frame;
  bool near_threshold = false;
};

/// Null space of m, dropping directions of size above the absolute
/// threshold thr.
template <typename Scalar>
KernelResult<Scalar> kernel_above(const Mat<Scalar>& m, RealOf<Scalar> thr) {
  const Index n = m.cols();
  KernelResult<Scalar> out;
  if (m.rows() == 0 || n == 0) {
    out.frame = Mat<Scalar>::Identity(n, n);
    return out;
  }
  // ker m is the orthogonal complement of the range of m^*.
  const auto rr = rank_reveal(Mat<Scalar>(m.adjoint()), true);
  const Index r = rr.count_above(thr);
  out.near_threshold = rr.fragile(thr);
  out.frame = rr.basis.rightCols(n - r);
  return out;
}

template <typename Scalar>
KernelResult<Scalar> kernel_frame(const Mat<Scalar>& m, RealOf<Scalar> rank_tol) {
  return kernel_above(m, rank_threshold(op_norm(m), rank_tol));
}

/// Orthonormal basis of the orthogonal complement of span(frame), where
/// frame already has orthonormal columns.
template <typename Scalar>
Mat<Scalar> complement_frame(const Mat<Scalar>& frame) {
  const Index n = frame.rows();
  const Index k = frame.cols();
  if (k == 0) return Mat<Scalar>::Identity(n, n);
  if (k >= n) return Mat<Scalar>(n, 0);
  Eigen::HouseholderQR<Mat<Scalar>> qr(frame);
  Mat<Scalar> q = qr.householderQ() * Mat<Scalar>::Identity(n, n);
  return q.rightCols(n - k);
}

}  // namespace dilab
