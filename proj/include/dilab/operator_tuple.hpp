#pragma once

#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dilab/linalg.hpp"

namespace dilab {

/// n square matrices acting on a common space of dimension dim.
/// dim may be 0 (the compression of a tuple to the zero subspace).
template <typename Scalar_ = cd>
class OperatorTuple {
 public:
  using Scalar = Scalar_;
  using Real = RealOf<Scalar>;
  using Matrix = Mat<Scalar>;

  OperatorTuple() = default;

  explicit OperatorTuple(std::vector<Matrix> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("operator tuple needs at least one operator");
    const Index d = ops_.front().rows();
    for (const auto& m : ops_) {
      if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("operator tuple entries must share one square shape");
    }
  }

  OperatorTuple(std::initializer_list<Matrix> ops) : OperatorTuple(std::vector<Matrix>(ops)) {}

  static OperatorTuple zero(int n, Index dim) {
    return OperatorTuple(std::vector<Matrix>(static_cast<std::size_t>(n), Matrix::Zero(dim, dim)));
  }

  int size() const { return static_cast<int>(ops_.size()); }
  Index dim() const { return ops_.empty() ? 0 : ops_.front().rows(); }

  const Matrix& operator[](int i) const { return ops_[static_cast<std::size_t>(i)]; }
  const std::vector<Matrix>& matrices() const { return ops_; }

  auto begin() const { return ops_.begin(); }
  auto end() const { return ops_.end(); }

  friend bool operator==(const OperatorTuple& a, const OperatorTuple& b) {
    if (a.size() != b.size() || a.dim() != b.dim()) return false;
    for (int i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

  template <typename F>
  OperatorTuple map(F&& f) const {
    std::vector<Matrix> out;
    out.reserve(ops_.size());
    for (const auto& m : ops_) out.push_back(f(m));
    return OperatorTuple(std::move(out));
  }

  OperatorTuple scaled(Scalar s) const {
    return map([s](const Matrix& m) -> Matrix { return s * m; });
  }

 private:
  std::vector<Matrix> ops_;
};

using Tuple = OperatorTuple<cd>;

}  // namespace dilab
