#include <doctest.h>

#include <cmath>
#include <memory>

#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/opsys.hpp"
#include "qms/random.hpp"

using namespace qms;

namespace {

// Coordinates of x (x) y in tensor(X, Y).
std::vector<cplx> tensor_coords(const std::vector<cplx>& cx, const std::vector<cplx>& cy) {
  std::vector<cplx> out;
  for (const auto& a : cx)
    for (const auto& b : cy) out.push_back(a * b);
  return out;
}

// Spin-1/2 style operator system: span{1, sigma_1, sigma_3} in M_2 (not an algebra).
OperatorSystem small_system() {
  ComplexMatrix s1{{0.0, 1.0}, {1.0, 0.0}};
  ComplexMatrix s3{{1.0, 0.0}, {0.0, -1.0}};
  return OperatorSystem({ComplexMatrix::identity(2), s1, s3});
}

}  // namespace

TEST_CASE("operator system validation") {
  const OperatorSystem x = small_system();
  CHECK(x.dim() == 3);
  CHECK(x.ambient_dim() == 2);
  CHECK(x.span_residual(ComplexMatrix::identity(2)) <= 1e-12);
  CHECK(x.hermitian_basis().size() == 3);
  ComplexMatrix e01 = ComplexMatrix::unit(2, 0, 1);
  CHECK_THROWS_AS(OperatorSystem({ComplexMatrix::identity(2), e01}), Error);  // not adjoint closed
  CHECK_THROWS_AS(OperatorSystem({ComplexMatrix::unit(2, 0, 0)}), Error);     // no unit
  CHECK_THROWS_AS(OperatorSystem({ComplexMatrix::identity(2), 2.0 * ComplexMatrix::identity(2)}), Error);
  CHECK(small_system().product_closure_residual() > 0.1);
  CHECK(OperatorSystem::full_matrix_algebra(3).product_closure_residual() <= 1e-12);
}

TEST_CASE("amplification") {
  const OperatorSystem x = OperatorSystem::full_matrix_algebra(3);
  const AmplifiedElement one = amplify(x, 1, x.unit_coords());
  CHECK(max_abs_diff(one.realization, ComplexMatrix::identity(3)) <= 1e-15);

  const AmplifiedElement a = random_element(x, 1, 4);
  std::vector<cplx> diag(4 * x.dim(), 0.0);
  std::copy(a.coeffs.begin(), a.coeffs.end(), diag.begin());
  std::copy(a.coeffs.begin(), a.coeffs.end(), diag.begin() + 3 * static_cast<std::ptrdiff_t>(x.dim()));
  CHECK(amplify(x, 2, diag).realization == direct_sum(a.realization, a.realization));

  const OperatorSystem y = small_system();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AmplifiedElement z = random_element(y, 3, seed);
    // Direct block construction of the adjoint.
    ComplexMatrix expected(6, 6);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        ComplexMatrix blk(2, 2);
        for (std::size_t k = 0; k < y.dim(); ++k) blk.axpy(z.coeffs[(j * 3 + i) * y.dim() + k], y.basis()[k]);
        expected.set_block(i * 2, j * 2, blk.adjoint());
      }
    CHECK(max_abs_diff(adjoint(y, z).realization, expected) <= 1e-12);
  }
  CHECK_THROWS_AS(amplify(x, 2, std::vector<cplx>(5)), Error);
}

TEST_CASE("forget_subdivisions") {
  const OperatorSystem x = small_system();
  const std::size_t m = x.dim(), d = x.ambient_dim();
  SUBCASE("n = 1 is the identity relabeling") {
    const AmplifiedElement z = random_element(x, 3, 1);
    const AmplifiedElement f = forget_subdivisions(as_nested(z, 1, m), m);
    CHECK(f.coeffs == z.coeffs);
    CHECK(f.realization == z.realization);
  }
  SUBCASE("index law and exact round trip") {
    const std::size_t s = 2, n = 3;
    Rng rng(8);
    const NestedElement z = amplify_nested(x, s, n, gaussian_vector(rng, s * s * n * n * m));
    const AmplifiedElement f = forget_subdivisions(z, m);
    ComplexMatrix expected(s * n * d, s * n * d);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) {
            std::vector<cplx> c(m);
            for (std::size_t q = 0; q < m; ++q) c[q] = z.coeffs[((i * s + j) * n * n + k * n + l) * m + q];
            expected.set_block((i * n + k) * d, (j * n + l) * d, x.realize(c));
          }
    CHECK(f.realization == expected);
    CHECK(amplify(x, s * n, f.coeffs).realization == f.realization);
    const NestedElement back = add_subdivisions(f, n, m);
    CHECK(back.coeffs == z.coeffs);
  }
  SUBCASE("compatibility with direct sums") {
    const std::size_t n = 2;
    const OperatorSystem mx = matrix_amplification(x, n);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const AmplifiedElement a = random_element(mx, 2, seed);
      const AmplifiedElement b = random_element(mx, 1, seed + 100);
      const AmplifiedElement lhs = forget_subdivisions(as_nested(direct_sum(mx, a, b), n, m), m);
      const AmplifiedElement rhs =
          direct_sum(x, forget_subdivisions(as_nested(a, n, m), m), forget_subdivisions(as_nested(b, n, m), m));
      CHECK(lhs.coeffs == rhs.coeffs);
      CHECK(max_abs_diff(lhs.realization, rhs.realization) <= 1e-14);
    }
  }
  SUBCASE("norms are preserved") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const NestedElement z = amplify_nested(x, 2, 2, gaussian_vector(rng, 16 * m));
      CHECK(operator_norm(forget_subdivisions(z, m).realization) == operator_norm(z.realization));
    }
  }
}

TEST_CASE("quotient norm") {
  const OperatorSystem x = OperatorSystem::full_matrix_algebra(3);
  SUBCASE("scalar matrices") {
    Rng rng(2);
    const AmplifiedElement v = scalar_matrix(x, gaussian_matrix(rng, 2, 2));
    CHECK(quotient_norm(v).value <= 1e-9);
  }
  SUBCASE("Hermitian level one against a grid search") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix h = random_hermitian(rng, 3);
      const double q = quotient_norm(amplify_realization(x, 1, h)).value;
      const double span = 4.0 * operator_norm(h);
      const int steps = 40000;
      double best = 1e300;
      for (int i = 0; i <= steps; ++i) {
        const double lam = -span / 2 + span * i / steps;
        best = std::min(best, operator_norm(h - lam * ComplexMatrix::identity(3)));
      }
      CHECK(q <= best + 1e-9);
      CHECK(q >= best - span / steps);
    }
  }
  SUBCASE("block diagonal elements") {
    Rng rng(4);
    for (int trial = 0; trial < 4; ++trial) {
      const AmplifiedElement a = amplify_realization(x, 1, random_hermitian(rng, 3));
      const AmplifiedElement b = amplify_realization(x, 1, gaussian_matrix(rng, 3, 3));
      const double expected = std::max(quotient_norm(a).value, quotient_norm(b).value);
      const double got = quotient_norm(direct_sum(x, a, b)).value;
      CHECK(got >= expected - 1e-6);
      CHECK(got <= expected + 1e-6);
    }
  }
  SUBCASE("bounded by the norm") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      AmplifiedElement z = random_element(x, 2, seed);
      const double n = operator_norm(z.realization);
      const QuotientResult q = quotient_norm(z);
      CHECK(q.value <= n + 1e-12);
      CHECK(q.value >= 0.0);
      // The value is attained by the returned shift.
      ComplexMatrix shifted = z.realization - kron(q.shift, ComplexMatrix::identity(3));
      CHECK(std::abs(operator_norm(shifted) - q.value) <= 1e-12);
    }
  }
}

TEST_CASE("UCP maps") {
  const OperatorSystem x = OperatorSystem::full_matrix_algebra(3);
  const auto seq = ucp_sample_sequence(x, 40, 77);
  CHECK(seq[0].target_dim == 3);
  CHECK(max_abs_diff(seq[0].values[4], x.basis()[4]) == 0.0);
  CHECK(seq[1].target_dim == 1);
  for (const auto& phi : seq) CHECK(unitality_defect(x, phi) <= 1e-10);
  const auto prefix = ucp_sample_sequence(x, 10, 77);
  for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(prefix[i].values == seq[i].values);

  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix b = gaussian_matrix(rng, 3, 3);
    const ComplexMatrix pos = b * b.adjoint();
    const UcpMap phi = sample_ucp(x, 1 + static_cast<std::size_t>(trial % 5), derive_seed(5, trial));
    const ComplexMatrix img = phi.apply(x.coordinates(pos));
    CHECK(hermitian_eigenvalues(0.5 * (img + img.adjoint())).front() >= -1e-10);
    CHECK(hermitian_defect(img) <= 1e-10);
  }
}

TEST_CASE("slice maps on tensor systems") {
  const OperatorSystem x = small_system();
  const OperatorSystem y = OperatorSystem::full_matrix_algebra(2);
  const OperatorSystem xy = tensor(x, y);
  const UcpMap phi = sample_ucp(y, 2, 9);
  SUBCASE("x (x) 1 maps to x^(+n)") {
    const AmplifiedElement a = random_element(x, 1, 3);
    const AmplifiedElement z = amplify(xy, 1, tensor_coords(a.coeffs, y.unit_coords()));
    const NestedElement out = apply_ucp_right(x, y, z, phi);
    CHECK(max_abs_diff(out.realization, amplify(a.realization, 2)) <= 1e-12);
  }
  SUBCASE("1 (x) y maps to phi(y) (x) 1") {
    const AmplifiedElement b = random_element(y, 1, 4);
    const AmplifiedElement z = amplify(xy, 1, tensor_coords(x.unit_coords(), b.coeffs));
    const NestedElement out = apply_ucp_right(x, y, z, phi);
    CHECK(max_abs_diff(out.realization, kron(phi.apply(b.coeffs), ComplexMatrix::identity(2))) <= 1e-12);
  }
  SUBCASE("contractive and saturating") {
    const auto maps = ucp_sample_sequence(y, 500, 21);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const AmplifiedElement z = random_element(xy, 1 + seed % 2, seed);
      const double nz = operator_norm(z.realization);
      double best = 0.0;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        const double v = operator_norm(apply_ucp_right(x, y, z, maps[i]).realization);
        CHECK(v <= nz + 1e-9);
        best = std::max(best, v);
      }
      CHECK(best >= 0.95 * nz);
    }
  }
}
