#include <doctest.h>

#include "dilab/cuntz.hpp"
#include "dilab/random_tuples.hpp"

using namespace dilab;

TEST_CASE("matrix units: no spherical part") {
  const auto dil = schaeffer_dilation(matrix_unit_pair(), 4);
  const auto dec = spherical_decomposition(dil);
  CHECK(dec.commuting.dim() == 0);
  CHECK(dec.spherical.dim() == 0);
  CHECK(dec.residual.dim() == dec.window.dim());
  CHECK(dec.isometry_residual <= 1e-12);
  CHECK(dec.row_sum_residual <= 1e-12);
}

TEST_CASE("spherical unitary: the piece is the original space") {
  TupleSampler s(30);
  const auto z = s.spherical_unitary(2, 2);
  const auto dil = schaeffer_dilation(z, 4);
  const auto dec = spherical_decomposition(dil);
  REQUIRE(dec.commuting.dim() == 2);
  CHECK(dec.piece_is_spherical);
  const auto embedded = Subspace<cd>::from_frame(dil.embed);
  CHECK(max_principal_angle(dec.commuting, embedded) < 1e-8);
  // The dilation is minimal, so the orbit of the piece fills the window.
  CHECK(dec.spherical.dim() == dec.window.dim());
  CHECK(dec.residual.dim() == 0);
  CHECK(dec.reducing_residual < 1e-10);
}

TEST_CASE("cuntz state with a hidden spherical part") {
  // Direct sum of a sphere point and the matrix units, conjugated.
  TupleSampler s(31);
  const double c = 1 / std::sqrt(2.0);
  const auto t = conjugate(direct_sum(point_tuple<cd>({cd(c), cd(0, c)}), matrix_unit_pair()), s.haar_unitary(3));
  const auto dil = schaeffer_dilation(t, 4);
  const auto dec = spherical_decomposition(dil);
  CHECK(dec.commuting.dim() == 1);
  CHECK(dec.piece_is_spherical);
  const auto atoms = spectral_atoms(dec.piece, AtomOptions{.tol = 1e-8});
  REQUIRE(atoms.atoms.size() == 1);
  CHECK(std::abs(atoms.atoms[0].point[0] - cd(c)) < 1e-8);
  CHECK(std::abs(atoms.atoms[0].point[1] - cd(0, c)) < 1e-8);
}

TEST_CASE("decomposition requires the Cuntz relations") {
  TupleSampler s(32);
  const auto dil = schaeffer_dilation(s.row_contraction(2, 2), 3);
  CHECK_THROWS_AS(spherical_decomposition(dil), PreconditionError);
}

TEST_CASE("atoms of a diagonal spherical unitary") {
  const double c = 1 / std::sqrt(2.0);
  const std::vector<std::vector<cd>> pts{{cd(0, 1), cd(0)}, {cd(c), cd(c)}, {cd(c), cd(c)}, {cd(0.6), cd(0, 0.8)}};
  const auto z = diagonal_tuple(pts);
  const auto a = spectral_atoms(z);
  REQUIRE(a.atoms.size() == 3);
  CHECK(a.total_multiplicity() == 4);
  // Sorted lexicographically by coordinates (real part, then imaginary).
  CHECK(std::abs(a.atoms[0].point[0] - cd(0, 1)) < 1e-12);
  CHECK(a.atoms[1].multiplicity == 1);
  CHECK(std::abs(a.atoms[1].point[0] - cd(0.6)) < 1e-12);
  CHECK(a.atoms[2].multiplicity == 2);
  CHECK(a.reconstruction_residual < 1e-12);
}

TEST_CASE("atoms survive conjugation") {
  TupleSampler s(33);
  for (int k = 0; k < 20; ++k) {
    const int n = s.uniform_int(2, 3);
    const Index d = s.uniform_int(1, 5);
    std::vector<std::vector<cd>> pts;
    for (Index p = 0; p < d; ++p) pts.push_back(p > 0 && s.uniform_int(0, 2) == 0 ? pts.back() : s.sphere_point(n));
    const auto z = diagonal_tuple(pts);
    const auto w = conjugate(z, s.haar_unitary(d));
    const auto a = spectral_atoms(z);
    const auto b = spectral_atoms(w, AtomOptions{.tol = 1e-9});
    CHECK(equivalent_spherical(a, b));
  }
}

TEST_CASE("distinct points are inequivalent") {
  const auto a = spectral_atoms(point_tuple<cd>({cd(1), cd(0)}));
  const auto b = spectral_atoms(point_tuple<cd>({cd(0), cd(1)}));
  CHECK_FALSE(equivalent_spherical(a, b));
  // Same support, different multiplicity.
  const auto c = spectral_atoms(diagonal_tuple<cd>({{cd(1), cd(0)}, {cd(1), cd(0)}}));
  CHECK_FALSE(equivalent_spherical(a, c));
  CHECK_THROWS_AS(spectral_atoms(matrix_unit_pair()), PreconditionError);
}
