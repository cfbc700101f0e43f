#include <doctest.h>

#include "dilab/piece.hpp"
#include "dilab/random_tuples.hpp"
#include "oracles.hpp"

using namespace dilab;

namespace {

double oracle_angle(const Tuple& t, const Subspace<cd>& s) {
  const auto ref = oracle::commuting_piece(t.matrices(), static_cast<int>(t.dim()));
  return oracle::angle(s.frame, ref);
}

}  // namespace

TEST_CASE("commuting tuples are their own piece") {
  TupleSampler s(2);
  const auto t = s.commuting_tuple(3, 4);
  const auto p = maximal_commuting_piece(t);
  CHECK(p.subspace.dim() == 4);
  CHECK(p.residual < 1e-12);
}

TEST_CASE("matrix units have trivial piece") {
  const auto p = maximal_commuting_piece(matrix_unit_pair());
  CHECK(p.subspace.dim() == 0);
  CHECK(p.piece.dim() == 0);
  CHECK(p.piece.size() == 2);
}

TEST_CASE("generic tuples have trivial piece") {
  TupleSampler s(9);
  for (int k = 0; k < 5; ++k) CHECK(maximal_commuting_piece(s.random_tuple(2, 3)).subspace.dim() == 0);
  // A single 1x1 tuple always commutes.
  CHECK(maximal_commuting_piece(s.random_tuple(2, 1)).subspace.dim() == 1);
}

TEST_CASE("hidden commuting block is recovered") {
  TupleSampler s(4);
  const auto c = s.commuting_tuple(2, 2);
  const auto g = s.random_tuple(2, 2);
  const Mat<cd> u = s.haar_unitary(4);
  const auto t = conjugate(direct_sum(c, g), u);
  const auto p = maximal_commuting_piece(t);
  REQUIRE(p.subspace.dim() == 2);
  const Mat<cd> want = u.leftCols(2);
  CHECK(max_principal_angle(p.subspace, Subspace<cd>::from_frame(want)) < 1e-9);
  CHECK(oracle_angle(t, p.subspace) < 1e-8);
  CHECK(p.residual < 1e-10);
}

TEST_CASE("piece agrees with the literal word-stacking definition") {
  TupleSampler s(21);
  for (int k = 0; k < 8; ++k) {
    const int n = s.uniform_int(2, 3);
    Tuple t;
    switch (k % 3) {
      case 0: t = s.random_tuple(n, s.uniform_int(1, 4)); break;
      case 1: t = s.commuting_tuple(n, s.uniform_int(1, 4)); break;
      default:
        t = conjugate(direct_sum(s.commuting_tuple(n, 1), s.random_tuple(n, 2)), s.haar_unitary(3));
    }
    const auto p = maximal_commuting_piece(t);
    const auto ref = oracle::commuting_piece(t.matrices(), static_cast<int>(t.dim()));
    CHECK(p.subspace.dim() == ref.cols());
    CHECK(oracle::angle(p.subspace.frame, ref) < 1e-8);
  }
}

TEST_CASE("piece of a nilpotent pair with a common kernel vector") {
  // T1 = E_12 + E_23-type shifts that fail to commute except on e_1.
  Mat<cd> a = Mat<cd>::Zero(3, 3), b = Mat<cd>::Zero(3, 3);
  a(0, 1) = 1;
  b(1, 2) = 1;
  const Tuple t({a, b});
  const auto p = maximal_commuting_piece(t);
  const auto ref = oracle::commuting_piece(t.matrices(), 3);
  CHECK(p.subspace.dim() == ref.cols());
  CHECK(oracle::angle(p.subspace.frame, ref) < 1e-12);
}

TEST_CASE("two characterizations agree") {
  TupleSampler s(13);
  const auto t = conjugate(direct_sum(s.commuting_tuple(3, 2), s.random_tuple(3, 3)), s.haar_unitary(5));
  const auto ak = adjoint_kernel(t);
  const auto cl = commutator_closure(t);
  CHECK(max_principal_angle(ak.subspace, orthogonal_complement(cl)) < 1e-9);
  CHECK(ak.subspace.dim() == 2);
}

TEST_CASE("compression requires co-invariance") {
  const auto r = matrix_unit_pair();
  Mat<cd> e1 = Mat<cd>::Zero(2, 1);
  e1(0, 0) = 1;
  CHECK_THROWS_AS(compress(r, Subspace<cd>::from_frame(e1)), NotCoInvariant);
  CHECK(coinvariance_defect(r, Subspace<cd>::from_frame(e1)) == doctest::Approx(1.0));
}

TEST_CASE("piece of sums and of tensor products") {
  TupleSampler s(17);
  const auto r = conjugate(direct_sum(s.commuting_tuple(2, 1), s.random_tuple(2, 2)), s.haar_unitary(3));
  const auto t = s.commuting_tuple(2, 2);
  const auto pr = maximal_commuting_piece(r);
  const auto pt = maximal_commuting_piece(t);
  const auto ps = maximal_commuting_piece(direct_sum(r, t));
  CHECK(max_principal_angle(ps.subspace, direct_sum(pr.subspace, pt.subspace)) < 1e-8);
  const auto pk = maximal_commuting_piece(tensor_with_identity(r, 2));
  CHECK(max_principal_angle(pk.subspace, tensor_identity(pr.subspace, 2)) < 1e-8);
}

TEST_CASE("subspace helpers") {
  const Mat<cd> i3 = Mat<cd>::Identity(3, 3);
  const auto a = Subspace<cd>::from_frame(i3.leftCols(2));
  const auto b = Subspace<cd>::from_frame(i3.rightCols(2));
  const auto c = intersection(a, b, 1e-9);
  CHECK(c.dim() == 1);
  CHECK(std::abs(std::abs(c.frame(1, 0)) - 1) < 1e-14);
  CHECK(max_principal_angle(a, b) == doctest::Approx(std::acos(0.0)));
  CHECK(max_principal_angle(a, a) == 0.0);
  CHECK(orthogonal_complement(a).dim() == 1);
}
