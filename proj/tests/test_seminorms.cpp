#include <doctest.h>

#include <cmath>
#include <memory>
#include <string>

#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"
#include "qms/seminorms.hpp"

using namespace qms;

namespace {

SystemPtr full(std::size_t d) { return std::make_shared<const OperatorSystem>(OperatorSystem::full_matrix_algebra(d)); }

ComplexMatrix sigma(int k) {
  if (k == 1) return {{0.0, 1.0}, {1.0, 0.0}};
  if (k == 2) return {{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}};
  return {{1.0, 0.0}, {0.0, -1.0}};
}

// Klein four-group acting on M_2 by conjugation with the Pauli matrices.
SeminormFamily klein_action() {
  return SeminormFamily::action(full(2), {sigma(1), sigma(3), sigma(2)}, {1.0, 2.0, 2.5});
}

SeminormFamily random_commutator(std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  return SeminormFamily::commutator(full(d), random_hermitian(rng, d));
}

}  // namespace

TEST_CASE("commutator seminorm values") {
  const SeminormFamily f = SeminormFamily::commutator(full(2), sigma(3));
  const OperatorSystem& x = f.system();
  // [sigma3, sigma1] = 2 i sigma2
  CHECK(f.eval(amplify_realization(x, 1, sigma(1))) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.eval(amplify_realization(x, 1, ComplexMatrix::identity(2))) <= 1e-14);
  CHECK(f.eval(amplify_realization(x, 1, sigma(3))) <= 1e-14);
  // Direct oracle: ||D z - z D|| on the amplified Hilbert space.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AmplifiedElement z = random_element(x, 3, seed);
    const ComplexMatrix dd = amplify(sigma(3), 3);
    CHECK(f.eval(z) == doctest::Approx(operator_norm(commutator(dd, z.realization))).epsilon(1e-12));
  }
}

TEST_CASE("action seminorm matches an exhaustive loop") {
  const SeminormFamily f = klein_action();
  const std::vector<ComplexMatrix> us{sigma(1), sigma(3), sigma(2)};
  const std::vector<double> len{1.0, 2.0, 2.5};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AmplifiedElement z = random_element(f.system(), 2, seed);
    double expected = 0.0;
    for (std::size_t g = 0; g < us.size(); ++g) {
      const ComplexMatrix w = amplify(us[g], 2);
      expected = std::max(expected, operator_norm(w * z.realization * w.adjoint() - z.realization) / len[g]);
    }
    CHECK(f.eval(z) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("finite metric seminorm") {
  const std::vector<std::vector<double>> rho{{0, 1, 2}, {1, 0, 1.5}, {2, 1.5, 0}};
  const SeminormFamily f = SeminormFamily::finite_metric(rho);
  const std::vector<double> vals{0.3, -1.2, 2.0};
  const AmplifiedElement z = amplify_realization(f.system(), 1, ComplexMatrix::diagonal(std::span<const double>(vals)));
  double expected = 0.0;
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t q = 0; q < 3; ++q)
      if (p != q) expected = std::max(expected, std::abs(vals[p] - vals[q]) / rho[p][q]);
  CHECK(f.eval(z) == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(SeminormFamily::finite_metric({}), Error);
  CHECK_THROWS_AS(SeminormFamily::finite_metric({{0, 1}, {2, 0}}), Error);
  CHECK_THROWS_AS(SeminormFamily::finite_metric({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}), Error);
  CHECK_THROWS_AS(SeminormFamily::finite_metric({{0, 0}, {0, 0}}), Error);
  try {
    SeminormFamily::finite_metric({});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_space);
  }
}

TEST_CASE("operator seminorm axioms for every kind") {
  const SeminormFamily comm = random_commutator(3, 11);
  const SeminormFamily act = klein_action();
  const SeminormFamily stab = SeminormFamily::stabilized(random_commutator(2, 5), 2);
  const SystemPtr t = std::make_shared<const OperatorSystem>(tensor(OperatorSystem::full_matrix_algebra(2),
                                                                    OperatorSystem::full_matrix_algebra(2)));
  Rng rng(3);
  const SeminormFamily d1 = SeminormFamily::commutator(full(2), random_hermitian(rng, 2));
  const SeminormFamily d2 = SeminormFamily::commutator(full(2), random_hermitian(rng, 2));
  const SeminormFamily mx = max_seminorm(SeminormFamily::tensor_left(d1, t, 2), SeminormFamily::tensor_right(2, d2, t));
  for (const SeminormFamily* f : {&comm, &act, &stab, &mx}) {
    const std::string kind = to_string(f->kind());
    CAPTURE(kind);
    const AxiomReport r = check_axioms(*f, 3, 200, 42);
    CHECK(r.cases >= 200);
    CHECK(r.direct_sum_max_residual <= 1e-9);
    CHECK(r.bimodule_violation <= 1e-9);
    CHECK(r.star_residual <= 1e-9);
    CHECK(r.scalar_residual <= 1e-9);
  }
}

TEST_CASE("entrywise bounds") {
  const SeminormFamily f = random_commutator(2, 8);
  for (std::size_t s = 1; s <= 4; ++s) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const EntrywiseReport r = entrywise_bounds_check(f, random_element(f.system(), s, seed));
      CHECK(r.pass);
      CHECK(r.upper_violation <= 1e-9);
      CHECK(r.lower_violation <= 1e-9);
    }
  }
}

TEST_CASE("kernel dimension scales as s^2") {
  // D = diag(1, 1, 2): the commutant is M_2 (+) C, five-dimensional.
  const SeminormFamily comm = SeminormFamily::commutator(full(3), ComplexMatrix::diagonal(std::vector<double>{1, 1, 2}));
  CHECK(kernel_basis(comm, 1).cols() == 5);
  for (std::size_t s = 1; s <= 3; ++s) {
    CHECK(kernel_basis(comm, s).cols() == s * s * 5);
    CHECK(kernel_basis(klein_action(), s).cols() == s * s);
  }
  const SystemPtr t = std::make_shared<const OperatorSystem>(tensor(OperatorSystem::full_matrix_algebra(2),
                                                                    OperatorSystem::full_matrix_algebra(2)));
  CHECK_THROWS_AS(kernel_basis(SeminormFamily::tensor_left(klein_action(), t, 2), 1), Error);
}

TEST_CASE("stabilized family evaluates the base on forgotten subdivisions") {
  const SeminormFamily base = random_commutator(2, 21);
  const SeminormFamily stab = SeminormFamily::stabilized(base, 3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AmplifiedElement z = random_element(stab.system(), 2, seed);
    const AmplifiedElement flat = forget_subdivisions(as_nested(z, 3, base.system().dim()), base.system().dim());
    CHECK(stab.eval(z) == doctest::Approx(base.eval(flat)).epsilon(1e-12));
  }
}

TEST_CASE("tensor seminorm: sampled never exceeds exact") {
  Rng rng(77);
  const SystemPtr x = full(2);
  const OperatorSystem y = OperatorSystem::full_matrix_algebra(3);
  const SystemPtr t = std::make_shared<const OperatorSystem>(tensor(*x, y));
  const SeminormFamily left = SeminormFamily::commutator(x, random_hermitian(rng, 2));
  double worst_excess = -1.0;
  double best_ratio = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const AmplifiedElement z = random_element(*t, 1 + seed % 2, seed);
    const double exact = tensor_seminorm_exact(left, y, z, t);
    CHECK(exact == doctest::Approx(SeminormFamily::tensor_left(left, t, 3).eval(z)).epsilon(1e-12));
    const double sampled = tensor_seminorm_sampled(left, y, z, 100, seed);
    worst_excess = std::max(worst_excess, sampled - exact);
    best_ratio = std::max(best_ratio, sampled / exact);
  }
  CHECK(worst_excess <= 1e-9);
  CHECK(best_ratio >= 0.9);
}

TEST_CASE("max family is the pointwise maximum") {
  const SystemPtr t = std::make_shared<const OperatorSystem>(tensor(OperatorSystem::full_matrix_algebra(2),
                                                                    OperatorSystem::full_matrix_algebra(2)));
  const SeminormFamily a = SeminormFamily::tensor_left(klein_action(), t, 2);
  const SeminormFamily b = SeminormFamily::tensor_right(2, random_commutator(2, 4), t);
  const SeminormFamily m = max_seminorm(a, b);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AmplifiedElement z = random_element(*t, 2, seed);
    CHECK(m.eval(z) == doctest::Approx(std::max(a.eval(z), b.eval(z))).epsilon(1e-14));
  }
}

TEST_CASE("serial and parallel kernels agree") {
  const SeminormFamily f = klein_action();
  const AmplifiedElement z = random_element(f.system(), 3, 9);
  CHECK(kernels::serial::sandwich_max(f.terms(), z.realization) == kernels::omp::sandwich_max(f.terms(), z.realization));
}
