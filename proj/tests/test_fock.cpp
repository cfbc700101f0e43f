#include <doctest.h>

#include "dilab/fock.hpp"
#include "dilab/tuples.hpp"
#include "oracles.hpp"

using namespace dilab;

TEST_CASE("fock dimensions and ordering") {
  const TruncatedFock f(2, 3);
  CHECK(f.dim() == 15);
  CHECK(TruncatedFock(3, 3).dim() == 40);
  CHECK(TruncatedFock(1, 4).dim() == 5);
  CHECK(f.index_of(MultiIndex{}) == 0);
  CHECK(f.degree_of(0) == 0);
  CHECK(f.degree_of(14) == 3);

  const auto words = oracle::words_up_to(2, 3);
  REQUIRE(static_cast<Index>(words.size()) == f.dim());
  for (Index idx = 0; idx < f.dim(); ++idx) {
    CHECK(f.index_at(idx).letters == words[static_cast<std::size_t>(idx)]);
    CHECK(f.index_of(f.index_at(idx)) == idx);
  }
}

TEST_CASE("enumeration errors") {
  CHECK_THROWS_AS(enumerate_indices(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_indices(2, -1), std::invalid_argument);
  CHECK(enumerate_indices(3, 0).size() == 1);
  CHECK(enumerate_indices(3, 2).size() == 9);
  CHECK_THROWS_AS(TruncatedFock(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(TruncatedFock(2, 2).index_of(MultiIndex{0, 0, 0}), std::out_of_range);
  CHECK_THROWS_AS(TruncatedFock(2, 2).index_of(MultiIndex{2}), std::out_of_range);
}

TEST_CASE("prepend agrees with word concatenation") {
  const TruncatedFock f(3, 3);
  for (Index idx = 0; idx < f.dim(); ++idx)
    for (int i = 0; i < 3; ++i) {
      const Index to = f.prepend(i, idx);
      if (f.degree_of(idx) == 3) {
        CHECK(to == -1);
      } else {
        CHECK(f.index_at(to) == f.index_at(idx).prepended(i));
      }
    }
}

TEST_CASE("creation operators match the word oracle") {
  for (auto [n, m] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{1, 4}}) {
    const auto v = creation_tuple<cd>(TruncatedFock(n, m));
    const auto ref = oracle::creation(n, m);
    for (int i = 0; i < n; ++i) CHECK((v[i] - ref[static_cast<std::size_t>(i)]).norm() == 0.0);
  }
}

TEST_CASE("creation operators are isometric below the top degree") {
  const TruncatedFock f(2, 4);
  const auto v = creation_tuple<cd>(f);
  const Mat<cd> w = degree_window<cd>(f, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Mat<cd> g = w.adjoint() * v[i].adjoint() * v[j] * w;
      const Mat<cd> want = i == j ? Mat<cd>(Mat<cd>::Identity(w.cols(), w.cols())) : Mat<cd>(Mat<cd>::Zero(w.cols(), w.cols()));
      CHECK((g - want).norm() == doctest::Approx(0.0));
    }
  // I - sum V V^* is the vacuum projection.
  CHECK((Mat<cd>::Identity(f.dim(), f.dim()) - row_sum(v) - vacuum_projection<cd>(f)).norm() == 0.0);
}

TEST_CASE("symmetric dimensions") {
  CHECK(symmetric_dim(2, 3) == 4);
  CHECK(symmetric_dim(3, 2) == 6);
  CHECK(symmetric_dim(3, 5) == 21);
  CHECK(symmetric_dim(4, 0) == 1);
  CHECK(symmetric_basis<cd>(TruncatedFock(3, 3)).dim() == 1 + 3 + 6 + 10);
}

TEST_CASE("symmetric frame spans the symmetric tensors") {
  for (auto [n, m] : {std::pair{2, 4}, std::pair{3, 3}, std::pair{1, 3}}) {
    const auto sym = symmetric_basis<cd>(TruncatedFock(n, m));
    CHECK(sym.frame.allFinite());
    const Mat<cd> gram = sym.frame.adjoint() * sym.frame;
    CHECK((gram - Mat<cd>::Identity(sym.dim(), sym.dim())).norm() < 1e-13);
    const Mat<cd> proj = sym.frame * sym.frame.adjoint();
    CHECK((proj - oracle::symmetrizer(n, m)).norm() < 1e-13);
    for (Index c = 0; c < sym.dim(); ++c) {
      const int deg = sym.column_degree[static_cast<std::size_t>(c)];
      CHECK(c >= sym.degree_begin(deg));
      CHECK(c < sym.degree_begin(deg + 1));
    }
  }
}

TEST_CASE("transpositions fix exactly the symmetric vectors") {
  const TruncatedFock f(2, 3);
  const auto sym = symmetric_basis<cd>(f);
  const Mat<cd> u = transposition_operator<cd>(f, 3, 1);
  CHECK((u * u.adjoint() - Mat<cd>::Identity(f.dim(), f.dim())).norm() < 1e-14);
  CHECK((u * sym.frame - sym.frame).norm() < 1e-14);
  CHECK_THROWS_AS(transposition_operator<cd>(f, 1, 0), std::out_of_range);
}

TEST_CASE("compressed creation tuple commutes on the symmetric window") {
  const TruncatedFock f(3, 3);
  const auto sym = symmetric_basis<cd>(f);
  const auto s = compressed_tuple(creation_tuple<cd>(f), sym);
  // Commutators vanish on degrees <= M - 2, where both products stay inside.
  const Mat<cd> w = Mat<cd>::Identity(sym.dim(), sym.degree_begin(2));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(((s[i] * s[j] - s[j] * s[i]) * w).norm() < 1e-13);
  CHECK_THROWS_AS(compressed_tuple(creation_tuple<cd>(TruncatedFock(2, 3)), sym), std::invalid_argument);
}
