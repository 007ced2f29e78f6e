#include "qms/random.hpp"

#include <cmath>

#include "qms/errors.hpp"
#include "qms/linalg.hpp"

namespace qms {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t state = root;
  const std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (index * 0xd1b54a32d192ed03ULL);
  splitmix64(state);
  return splitmix64(state);
}

cplx Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

ComplexMatrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  ComplexMatrix m(rows, cols);
  for (auto& e : m.entries()) e = rng.complex_normal();
  return m;
}

ComplexMatrix random_hermitian(Rng& rng, std::size_t n) {
  const ComplexMatrix g = gaussian_matrix(rng, n, n);
  ComplexMatrix h = g + g.adjoint();
  h *= 0.5;
  for (std::size_t i = 0; i < n; ++i) h(i, i) = h(i, i).real();
  return h;
}

std::vector<cplx> gaussian_vector(Rng& rng, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& e : v) e = rng.complex_normal();
  return v;
}

std::vector<double> random_unit_vector(Rng& rng, std::size_t k) {
  std::vector<double> y(k);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (auto& e : y) {
      e = rng.normal();
      n2 += e * e;
    }
  } while (n2 == 0.0);
  const double n = std::sqrt(n2);
  for (auto& e : y) e /= n;
  return y;
}

ComplexMatrix haar_isometry(Rng& rng, std::size_t d, std::size_t n) {
  require(n >= 1 && n <= d, ErrorKind::dimension_mismatch, "isometry needs 1 <= n <= d");
  return householder_qr(gaussian_matrix(rng, d, n)).q;
}

}  // namespace qms
