#include <doctest.h>

#include <cmath>
#include <memory>

#include "qms/clifford.hpp"
#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"
#include "qms/triples.hpp"

using namespace qms;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io_error;
}

SystemPtr diag(std::size_t d) { return std::make_shared<const OperatorSystem>(OperatorSystem::diagonal_algebra(d)); }

}  // namespace

TEST_CASE("triple validation") {
  const ComplexMatrix nonherm{{0.0, 1.0}, {0.0, 0.0}};
  CHECK(kind_of([&] { LipschitzTriple::make(diag(2), nonherm, std::nullopt, Parity::odd); }) ==
        ErrorKind::not_hermitian);
  CHECK(kind_of([&] { LipschitzTriple::make(diag(2), pauli(1), pauli(3), Parity::odd); }) ==
        ErrorKind::parity_mismatch);
  CHECK(kind_of([&] { LipschitzTriple::make(diag(2), pauli(1), std::nullopt, Parity::even); }) ==
        ErrorKind::parity_mismatch);
  // sigma_1 commutes with D = sigma_1, so it cannot grade it.
  CHECK(kind_of([&] { LipschitzTriple::make(diag(2), pauli(1), pauli(1), Parity::even); }) ==
        ErrorKind::invalid_triple);
  CHECK(kind_of([&] { LipschitzTriple::make(diag(2), ComplexMatrix::identity(3), std::nullopt, Parity::odd); }) ==
        ErrorKind::dimension_mismatch);

  const LipschitzTriple t = pauli_even_triple();
  CHECK(grading_residual(t) <= 1e-15);
  CHECK(t.parity == Parity::even);
}

TEST_CASE("external product parities and Dirac operators") {
  const LipschitzTriple e1 = random_even_triple(2, false, 1);
  const LipschitzTriple e2 = random_even_triple(2, true, 2);
  const LipschitzTriple o1 = random_odd_triple(3, false, 3);
  const LipschitzTriple o2 = random_odd_triple(2, true, 4);

  const ProductTriple ee = external_product(e1, e2);
  const ProductTriple eo = external_product(e1, o2);
  const ProductTriple oe = external_product(o1, e2);
  const ProductTriple oo = external_product(o1, o2);
  CHECK(ee.parity_case == ParityCase::even_even);
  CHECK(eo.parity_case == ParityCase::even_odd);
  CHECK(oe.parity_case == ParityCase::odd_even);
  CHECK(oo.parity_case == ParityCase::odd_odd);
  CHECK(ee.result.parity == Parity::even);
  CHECK(eo.result.parity == Parity::odd);
  CHECK(oe.result.parity == Parity::odd);
  CHECK(oo.result.parity == Parity::even);

  // Independent constructions of the product operators.
  const auto i = [](std::size_t n) { return ComplexMatrix::identity(n); };
  const ComplexMatrix d_ee = kron(e1.dirac, i(4)) + kron(*e1.grading, e2.dirac);
  CHECK(max_abs_diff(ee.result.dirac, d_ee) <= 1e-14);
  CHECK(max_abs_diff(*ee.result.grading, kron(*e1.grading, *e2.grading)) <= 1e-14);
  const ComplexMatrix d_eo = kron(e1.dirac, i(2)) + kron(*e1.grading, o2.dirac);
  CHECK(max_abs_diff(eo.result.dirac, d_eo) <= 1e-14);
  const ComplexMatrix d_oe = kron(o1.dirac, *e2.grading) + kron(i(3), e2.dirac);
  CHECK(max_abs_diff(oe.result.dirac, d_oe) <= 1e-14);
  const ComplexMatrix d_oo = kron(pauli(1), kron(o1.dirac, i(2))) - kron(pauli(2), kron(i(3), o2.dirac));
  CHECK(max_abs_diff(oo.result.dirac, d_oo) <= 1e-14);
  CHECK(max_abs_diff(*oo.result.grading, kron(pauli(3), i(6))) <= 1e-14);

  for (const ProductTriple* p : {&ee, &eo, &oe, &oo}) CHECK(grading_residual(p->result) <= 1e-10);
  CHECK(even_square_law_residual(ee) <= 1e-12);
}

TEST_CASE("sigma example has spectrum plus or minus sqrt 2") {
  const ProductTriple p = external_product(pauli_even_triple(), pauli_even_triple());
  const std::vector<double> ev = hermitian_eigenvalues(p.result.dirac);
  REQUIRE(ev.size() == 4);
  CHECK(std::abs(ev[0] + std::sqrt(2.0)) <= 1e-10);
  CHECK(std::abs(ev[1] + std::sqrt(2.0)) <= 1e-10);
  CHECK(std::abs(ev[2] - std::sqrt(2.0)) <= 1e-10);
  CHECK(std::abs(ev[3] - std::sqrt(2.0)) <= 1e-10);
  CHECK(max_abs_diff(p.result.dirac * p.result.dirac, 2.0 * ComplexMatrix::identity(4)) <= 1e-14);
}

TEST_CASE("product inequality in all parity cases") {
  const LipschitzTriple even_a = random_even_triple(2, true, 10);
  const LipschitzTriple even_b = random_even_triple(1, false, 11);
  const LipschitzTriple odd_a = random_odd_triple(2, true, 12);
  const LipschitzTriple odd_b = random_odd_triple(3, false, 13);
  const std::vector<ProductTriple> products{external_product(even_a, even_b), external_product(even_a, odd_b),
                                            external_product(odd_a, even_b), external_product(odd_a, odd_b)};
  for (const ProductTriple& p : products) {
    const std::string name = to_string(p.parity_case);
    CAPTURE(name);
    for (std::size_t s = 1; s <= 2; ++s) {
      const ProductInequalityReport r = check_product_inequality(p, s, 25, 100 + s);
      CHECK(r.cases == 25);
      CHECK(r.max_violation <= 1e-9);
      CHECK(r.recovery_residual <= 1e-10);
      CHECK(r.grading_residual <= 1e-10);
      CHECK(r.max_ratio <= 1.0 + 1e-9);
    }
    const AmplifiedElement z = random_element(*p.tensor_system, 2, 5);
    const Factorization f = product_seminorm_factorization(p, z);
    CHECK(std::max(f.left, f.right) <= f.product + 1e-9);
    CHECK(f.product <= f.left + f.right + 1e-9);
  }
}

TEST_CASE("stabilized triple seminorm") {
  const LipschitzTriple t = random_odd_triple(2, true, 31);
  const LipschitzTriple st = stabilize(t, 2);
  CHECK(st.hilbert_dim() == 4);
  const SeminormFamily base = t.seminorm();
  const SeminormFamily lifted = st.seminorm();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const AmplifiedElement z = random_element(*st.algebra, 2, seed);
    const AmplifiedElement flat = forget_subdivisions(as_nested(z, 2, t.algebra->dim()), t.algebra->dim());
    CHECK(lifted.eval(z) == doctest::Approx(base.eval(flat)).epsilon(1e-12));
  }
}
