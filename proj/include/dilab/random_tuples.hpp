#pragma once

// Seeded generators for test and verification inputs.

#include <cstdint>
#include <random>
#include <vector>

#include "dilab/operator_tuple.hpp"

namespace dilab {

/// Operator norm of the row [T_1 ... T_n], i.e. ||sum T_i T_i^*||^{1/2}.
double row_norm(const Tuple& t);

/// T / (||row|| + margin): a strict row contraction.
Tuple scale_to_row_contraction(const Tuple& t, double margin = 0.05);

/// T scaled so that ||row|| equals target (zero tuples are returned as is).
Tuple scale_to_row_norm(const Tuple& t, double target);

class TupleSampler {
 public:
  explicit TupleSampler(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() { return rng_; }

  int uniform_int(int lo, int hi);  // inclusive
  double uniform(double lo, double hi);

  /// Entries with independent standard complex Gaussian real and imaginary parts.
  Mat<cd> gaussian(Index rows, Index cols);

  /// Haar-distributed unitary (QR of a Gaussian matrix with phase correction).
  Mat<cd> haar_unitary(Index d);

  /// Uniform point on the unit sphere of C^n.
  std::vector<cd> sphere_point(int n);

  /// Uniform point in the open unit ball of C^n, with norm in [rmin, rmax].
  std::vector<cd> ball_point(int n, double rmin, double rmax);

  /// n independent Gaussian matrices.
  Tuple random_tuple(int n, Index d);

  /// Gaussian tuple scaled to a strict row contraction.
  Tuple row_contraction(int n, Index d, double margin = 0.05);

  /// Commuting tuple: each T_i a random polynomial of degree <= degree in one
  /// Gaussian matrix, then scaled by (||row|| + margin)^{-1}.
  Tuple commuting_tuple(int n, Index d, int degree = 2, double margin = 0.05);

  /// U diag(points) U^* with random sphere points and Haar U.
  Tuple spherical_unitary(int n, Index d);

  /// Spherical unitary with a prescribed joint spectrum and Haar conjugation.
  Tuple spherical_unitary(const std::vector<std::vector<cd>>& points);

 private:
  std::mt19937_64 rng_;
};

}  // namespace dilab
