#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qms/matrix.hpp"

namespace qms {

/// One splitmix64 step.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for the index-th independent stream under `root`. Used for per-trial and
/// per-restart seeds so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  /// Standard complex Gaussian, E|z|^2 = 1.
  cplx complex_normal();
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

ComplexMatrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols);
ComplexMatrix random_hermitian(Rng& rng, std::size_t n);
std::vector<cplx> gaussian_vector(Rng& rng, std::size_t n);
/// Uniform point on the unit sphere of R^k.
std::vector<double> random_unit_vector(Rng& rng, std::size_t k);
/// Haar-distributed isometry C^n -> C^d (d x n, V^*V = I_n), n <= d.
ComplexMatrix haar_isometry(Rng& rng, std::size_t d, std::size_t n);

}  // namespace qms
