#include "dilab/random_tuples.hpp"

#include <cmath>

#include "dilab/tuples.hpp"

namespace dilab {

double row_norm(const Tuple& t) {
  if (t.dim() == 0) return 0;
  return std::sqrt(hermitian_norm(row_sum(t)));
}

Tuple scale_to_row_contraction(const Tuple& t, double margin) {
  return t.scaled(cd(1.0 / (row_norm(t) + margin)));
}

Tuple scale_to_row_norm(const Tuple& t, double target) {
  const double r = row_norm(t);
  if (r == 0) return t;
  return t.scaled(cd(target / r));
}

int TupleSampler::uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

double TupleSampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

Mat<cd> TupleSampler::gaussian(Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat<cd> m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) {
      const double re = g(rng_);
      const double im = g(rng_);
      m(r, c) = cd(re, im);
    }
  return m;
}

Mat<cd> TupleSampler::haar_unitary(Index d) {
  Eigen::HouseholderQR<Mat<cd>> qr(gaussian(d, d));
  Mat<cd> q = qr.householderQ() * Mat<cd>::Identity(d, d);
  const Mat<cd> r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

std::vector<cd> TupleSampler::sphere_point(int n) {
  const Vec<cd> v = gaussian(n, 1);
  const double nv = v.norm();
  std::vector<cd> out;
  for (int i = 0; i < n; ++i) out.push_back(v(i) / nv);
  return out;
}

std::vector<cd> TupleSampler::ball_point(int n, double rmin, double rmax) {
  auto p = sphere_point(n);
  const double r = uniform(rmin, rmax);
  for (auto& x : p) x *= r;
  return p;
}

Tuple TupleSampler::random_tuple(int n, Index d) {
  std::vector<Mat<cd>> ops;
  for (int i = 0; i < n; ++i) ops.push_back(gaussian(d, d));
  return Tuple(std::move(ops));
}

Tuple TupleSampler::row_contraction(int n, Index d, double margin) {
  return scale_to_row_contraction(random_tuple(n, d), margin);
}

Tuple TupleSampler::commuting_tuple(int n, Index d, int degree, double margin) {
  const Mat<cd> a = gaussian(d, d) / std::sqrt(static_cast<double>(d));
  std::vector<Mat<cd>> powers{Mat<cd>::Identity(d, d)};
  for (int k = 1; k <= degree; ++k) powers.push_back(powers.back() * a);
  std::vector<Mat<cd>> ops;
  for (int i = 0; i < n; ++i) {
    const Mat<cd> c = gaussian(degree + 1, 1);
    Mat<cd> m = Mat<cd>::Zero(d, d);
    for (int k = 0; k <= degree; ++k) m += c(k) * powers[static_cast<std::size_t>(k)];
    ops.push_back(std::move(m));
  }
  return scale_to_row_contraction(Tuple(std::move(ops)), margin);
}

Tuple TupleSampler::spherical_unitary(int n, Index d) {
  std::vector<std::vector<cd>> points;
  for (Index k = 0; k < d; ++k) points.push_back(sphere_point(n));
  return spherical_unitary(points);
}

Tuple TupleSampler::spherical_unitary(const std::vector<std::vector<cd>>& points) {
  const auto diag = diagonal_tuple(points);
  return conjugate(diag, haar_unitary(diag.dim()));
}

}  // namespace dilab
