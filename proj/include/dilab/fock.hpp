#pragma once

// Truncated full and symmetric Fock spaces over C^n.
//
// Basis vectors e^a of the full Fock space are indexed by words a over the
// alphabet {0, ..., n-1} of length <= M. Ordering is graded lexicographic with
// the vacuum (empty word) first. Letters are 0-based throughout the library.

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <stdexcept>
#include <vector>

#include "dilab/operator_tuple.hpp"

namespace dilab {

struct MultiIndex {
  std::vector<int> letters;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> l) : letters(std::move(l)) {}
  MultiIndex(std::initializer_list<int> l) : letters(l) {}

  int length() const { return static_cast<int>(letters.size()); }
  bool empty() const { return letters.empty(); }

  /// Word with `letter` prepended: e_letter (x) e^a.
  MultiIndex prepended(int letter) const {
    MultiIndex out;
    out.letters.reserve(letters.size() + 1);
    out.letters.push_back(letter);
    out.letters.insert(out.letters.end(), letters.begin(), letters.end());
    return out;
  }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// All n^m words of length m in lexicographic order.
inline std::vector<MultiIndex> enumerate_indices(int n, int m) {
  if (n <= 0) throw std::invalid_argument("letter count must be positive");
  if (m < 0) throw std::invalid_argument("degree must be non-negative");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(m), 0);
  while (true) {
    out.emplace_back(cur);
    int pos = m - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == n - 1) {
      cur[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
  }
  return out;
}

/// All words of length <= max_len, graded lexicographic.
inline std::vector<MultiIndex> enumerate_words_up_to(int n, int max_len) {
  std::vector<MultiIndex> out;
  for (int m = 0; m <= max_len; ++m) {
    auto level = enumerate_indices(n, m);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

/// Binomial C(n+m-1, m): dimension of the m-th symmetric tensor power of C^n.
inline Index symmetric_dim(int n, int m) {
  long double r = 1;
  for (int k = 1; k <= m; ++k) r = r * (n - 1 + k) / k;
  return static_cast<Index>(std::llround(r));
}

class TruncatedFock {
 public:
  TruncatedFock() = default;

  TruncatedFock(int n, int max_degree) : n_(n), max_degree_(max_degree) {
    if (n < 1) throw std::invalid_argument("letter count must be positive");
    if (max_degree < 0) throw std::invalid_argument("truncation degree must be non-negative");
    offsets_.push_back(0);
    Index level = 1;
    for (int m = 0; m <= max_degree; ++m) {
      powers_.push_back(level);
      offsets_.push_back(offsets_.back() + level);
      level *= n;
    }
  }

  int letters() const { return n_; }
  int max_degree() const { return max_degree_; }
  Index dim() const { return offsets_.back(); }

  Index degree_offset(int m) const { return offsets_[static_cast<std::size_t>(m)]; }
  Index degree_dim(int m) const { return powers_[static_cast<std::size_t>(m)]; }

  int degree_of(Index idx) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), idx);
    return static_cast<int>(it - offsets_.begin()) - 1;
  }

  Index index_of(const MultiIndex& a) const {
    const int m = a.length();
    if (m > max_degree_) throw std::out_of_range("word longer than truncation degree");
    Index rank = 0;
    for (int letter : a.letters) {
      if (letter < 0 || letter >= n_) throw std::out_of_range("letter out of range");
      rank = rank * n_ + letter;
    }
    return degree_offset(m) + rank;
  }

  MultiIndex index_at(Index idx) const {
    const int m = degree_of(idx);
    Index rank = idx - degree_offset(m);
    std::vector<int> letters(static_cast<std::size_t>(m));
    for (int k = m - 1; k >= 0; --k) {
      letters[static_cast<std::size_t>(k)] = static_cast<int>(rank % n_);
      rank /= n_;
    }
    return MultiIndex(std::move(letters));
  }

  /// Index of e_letter (x) e^a, or -1 when a already has the top degree.
  Index prepend(int letter, Index idx) const {
    const int m = degree_of(idx);
    if (m >= max_degree_) return -1;
    const Index rank = idx - degree_offset(m);
    return degree_offset(m + 1) + letter * degree_dim(m) + rank;
  }

  friend bool operator==(const TruncatedFock& a, const TruncatedFock& b) {
    return a.n_ == b.n_ && a.max_degree_ == b.max_degree_;
  }

 private:
  int n_ = 0;
  int max_degree_ = 0;
  std::vector<Index> offsets_;
  std::vector<Index> powers_;
};

/// Left creation operators V_i e^a = e_i (x) e^a; top-degree vectors are
/// annihilated.
template <typename Scalar = cd>
OperatorTuple<Scalar> creation_tuple(const TruncatedFock& space) {
  std::vector<Mat<Scalar>> ops;
  for (int i = 0; i < space.letters(); ++i) {
    Mat<Scalar> v = Mat<Scalar>::Zero(space.dim(), space.dim());
    for (Index idx = 0; idx < space.dim(); ++idx) {
      const Index to = space.prepend(i, idx);
      if (to >= 0) v(to, idx) = Scalar(1);
    }
    ops.push_back(std::move(v));
  }
  return OperatorTuple<Scalar>(std::move(ops));
}

/// Projection onto the vacuum.
template <typename Scalar = cd>
Mat<Scalar> vacuum_projection(const TruncatedFock& space) {
  Mat<Scalar> e = Mat<Scalar>::Zero(space.dim(), space.dim());
  e(0, 0) = Scalar(1);
  return e;
}

/// Columns of the identity selecting the basis vectors of degree <= max_deg.
template <typename Scalar = cd>
Mat<Scalar> degree_window(const TruncatedFock& space, int max_deg) {
  max_deg = std::min(max_deg, space.max_degree());
  const Index k = max_deg < 0 ? 0 : space.degree_offset(max_deg + 1);
  return Mat<Scalar>::Identity(space.dim(), k);
}

/// Unitary swapping tensor factors pos and pos+1 (0-based) of the degree-m
/// component; identity on the other degrees.
template <typename Scalar = cd>
Mat<Scalar> transposition_operator(const TruncatedFock& space, int m, int pos) {
  if (m < 2 || m > space.max_degree() || pos < 0 || pos + 1 >= m)
    throw std::out_of_range("transposition outside the degree");
  Mat<Scalar> u = Mat<Scalar>::Identity(space.dim(), space.dim());
  for (Index idx = space.degree_offset(m); idx < space.degree_offset(m + 1); ++idx) {
    MultiIndex a = space.index_at(idx);
    std::swap(a.letters[static_cast<std::size_t>(pos)], a.letters[static_cast<std::size_t>(pos + 1)]);
    u(idx, idx) = Scalar(0);
    u(space.index_of(a), idx) = Scalar(1);
  }
  return u;
}

/// Orthonormal frame of the symmetric Fock space inside the truncated full
/// Fock space. Column k of `frame` is the normalized sum of all distinct
/// rearrangements of a nondecreasing word; columns are graded by degree and
/// lexicographic within a degree.
template <typename Scalar = cd>
struct SymmetricBasis {
  TruncatedFock parent;
  Mat<Scalar> frame;
  std::vector<int> column_degree;
  std::vector<Index> degree_dims;

  Index dim() const { return frame.cols(); }

  /// Column range [begin, end) of degree m.
  Index degree_begin(int m) const {
    Index s = 0;
    for (int k = 0; k < m; ++k) s += degree_dims[static_cast<std::size_t>(k)];
    return s;
  }

  /// Frame columns of degree <= max_deg.
  Mat<Scalar> window(int max_deg) const { return frame.leftCols(degree_begin(std::min(max_deg, parent.max_degree()) + 1)); }
};

template <typename Scalar = cd>
SymmetricBasis<Scalar> symmetric_basis(const TruncatedFock& space) {
  using Real = RealOf<Scalar>;
  SymmetricBasis<Scalar> out;
  out.parent = space;
  const int n = space.letters();
  Index total = 0;
  for (int m = 0; m <= space.max_degree(); ++m) {
    out.degree_dims.push_back(symmetric_dim(n, m));
    total += out.degree_dims.back();
  }
  out.frame = Mat<Scalar>::Zero(space.dim(), total);
  Index col0 = 0;
  for (int m = 0; m <= space.max_degree(); ++m) {
    std::map<std::vector<int>, Index> column_of;
    for (const auto& a : enumerate_indices(n, m)) {
      auto key = a.letters;
      if (!std::is_sorted(key.begin(), key.end())) continue;
      column_of.emplace(key, col0 + static_cast<Index>(column_of.size()));
    }
    for (Index idx = space.degree_offset(m); idx < space.degree_offset(m + 1); ++idx) {
      auto key = space.index_at(idx).letters;
      std::sort(key.begin(), key.end());
      out.frame(idx, column_of.at(key)) = Scalar(1);
    }
    for (Index c = col0; c < col0 + out.degree_dims[static_cast<std::size_t>(m)]; ++c) {
      out.frame.col(c) /= Real(out.frame.col(c).norm());
      out.column_degree.push_back(m);
    }
    col0 += out.degree_dims[static_cast<std::size_t>(m)];
  }
  return out;
}

/// Compression S_i = P V_i P of a creation tuple to the symmetric frame,
/// in frame coordinates.
template <typename Scalar = cd>
OperatorTuple<Scalar> compressed_tuple(const OperatorTuple<Scalar>& v, const SymmetricBasis<Scalar>& sym) {
  if (v.dim() != sym.parent.dim() || v.size() != sym.parent.letters())
    throw std::invalid_argument("symmetric frame does not belong to this tuple's Fock space");
  return v.map([&](const Mat<Scalar>& m) -> Mat<Scalar> { return sym.frame.adjoint() * m * sym.frame; });
}

}  // namespace dilab
