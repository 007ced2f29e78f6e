#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/metrics.hpp"
#include "qms/models.hpp"
#include "qms/random.hpp"

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

ComplexMatrix power(const ComplexMatrix& a, std::size_t k) {
  ComplexMatrix out = ComplexMatrix::identity(a.rows());
  for (std::size_t i = 0; i < k; ++i) out = out * a;
  return out;
}

}  // namespace

TEST_CASE("Weyl model invariants") {
  for (std::size_t q = 2; q <= 5; ++q) {
    for (std::size_t p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      CAPTURE(q);
      CAPTURE(p);
      const GroupActionModel m(q, p);
      CHECK(m.relation_defect() <= 1e-12);
      CHECK(m.action_defect() <= 1e-10);
      CHECK(m.length_axiom_violation() <= 1e-12);
      CHECK(m.fixed_point_dim() == 1);
      CHECK(max_abs_diff(m.unitary(q + 1), m.shift() * m.clock()) <= 1e-14);
      CHECK(kernel_basis(ergodic_seminorm(m), 1).cols() == 1);
    }
  }
  CHECK(GroupActionModel(4, 2).fixed_point_dim() > 1);
  const GroupActionModel m(4, 1);
  CHECK(m.length(0) == 0.0);
  CHECK(m.length(2 * 4 + 0) == doctest::Approx(std::numbers::pi));       // (2, 0): representative 2
  CHECK(m.length(3 * 4 + 3) == doctest::Approx(std::numbers::pi / 2 * std::sqrt(2.0)));  // (-1, -1)
}

TEST_CASE("ergodic seminorm values") {
  const GroupActionModel m(5, 2);
  const SeminormFamily l = ergodic_seminorm(m);
  const OperatorSystem& x = *m.system();
  CHECK(l.eval(amplify_realization(x, 1, ComplexMatrix::identity(5))) <= 1e-14);
  // alpha_(m,n)(U) = w^m U, so L(U) = max |w^m - 1| / l(m, n).
  double expected = 0.0;
  for (std::size_t g = 1; g < m.group_size(); ++g)
    expected = std::max(expected, std::abs(std::pow(m.omega(), static_cast<double>(g / 5)) - 1.0) / m.length(g));
  CHECK(l.eval(amplify_realization(x, 1, m.clock())) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("spectral projections") {
  for (std::size_t q : {2, 3, 5}) {
    const GroupActionModel m(q, 1);
    const long ql = static_cast<long>(q), pl = 1;
    Rng rng(q);
    const ComplexMatrix x = gaussian_matrix(rng, q, q), y = gaussian_matrix(rng, q, q);
    ComplexMatrix total(q, q);
    std::vector<ComplexMatrix> px, py;
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = 0; b < q; ++b) {
        const ComplexMatrix p = spectral_projection(m, a, b, x);
        CHECK(max_abs_diff(spectral_projection(m, a, b, p), p) <= 1e-10);
        total += p;
        px.push_back(p);
        py.push_back(spectral_projection(m, a, b, y));
      }
    CHECK(max_abs_diff(total, x) <= 1e-10);
    for (std::size_t i = 0; i < px.size(); ++i)
      for (std::size_t j = 0; j < py.size(); ++j)
        if (i != j) CHECK(std::abs(inner(px[i], py[j])) <= 1e-10);

    // Trivial character: the trace.
    CHECK(max_abs_diff(group_average(m, x), (x.trace() / static_cast<double>(q)) * ComplexMatrix::identity(q)) <=
          1e-12);

    // Monomials U^j V^k live in the subspace of gamma_(a,b) with a = p j, b = -p k mod q.
    for (std::size_t j = 0; j < q; ++j)
      for (std::size_t k = 0; k < q; ++k) {
        const ComplexMatrix mono = power(m.clock(), j) * power(m.shift(), k);
        for (std::size_t a = 0; a < q; ++a)
          for (std::size_t b = 0; b < q; ++b) {
            const bool match = static_cast<long>(a) == (pl * static_cast<long>(j)) % ql &&
                               static_cast<long>(b) == ((ql - (pl * static_cast<long>(k)) % ql) % ql);
            const ComplexMatrix p = spectral_projection(m, a, b, mono);
            CHECK(max_abs_diff(p, match ? mono : ComplexMatrix(q, q)) <= 1e-12);
          }
      }
  }
}

TEST_CASE("weights and averaging approximations") {
  const GroupActionModel m(3, 1);
  std::vector<double> w = uniform_weight(m);
  w[0] = -0.5;
  w[1] = 2.5;
  CHECK(kind_of([&] { averaging_approximation(m, w); }) == ErrorKind::invalid_weight);
  CHECK(kind_of([&] { averaging_approximation(m, std::vector<double>(9, 2.0)); }) == ErrorKind::invalid_weight);
  CHECK(kind_of([&] { averaging_approximation(m, std::vector<double>(4, 1.0)); }) == ErrorKind::invalid_weight);
  CHECK(kind_of([&] { fejer_weight(m, 2); }) == ErrorKind::invalid_weight);

  const ApproxPair e = averaging_approximation(m, uniform_weight(m));
  CHECK(e.analytic_defect_bound == doctest::Approx(m.eta()).epsilon(1e-14));
  CHECK(e.completely_positive);
  CHECK(e.image_rank == 1);
  const ApproxPair id = averaging_approximation(m, identity_weight(m));
  CHECK(id.analytic_defect_bound == 0.0);
  CHECK(id.image_rank == 9);

  for (std::size_t q : {3, 4, 5}) {
    const GroupActionModel mq(q, 1);
    const auto seq = fejer_sequence(mq);
    CHECK(seq.back() == identity_weight(mq));
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& psi : seq) {
      validate_weight(mq, psi);
      const double b = analytic_defect_bound(mq, psi);
      CHECK(b <= previous + 1e-12);
      previous = b;
    }
  }
}

TEST_CASE("averaging defect against the analytic bound") {
  const GroupActionModel m(5, 1);
  const SeminormFamily l = ergodic_seminorm(m);
  for (const auto& psi : fejer_sequence(m)) {
    const DefectBoundReport r = check_defect_bound(m, psi, 2, 30, 7);
    CHECK(r.cases == 60);
    CHECK(r.violations == 0);
    CHECK(r.max_ratio <= 1.0 + 1e-9);
  }
  MetricsOptions o;
  o.ratio.restarts = 3;
  o.ratio.iterations = 100;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& psi : fejer_sequence(m)) {
    const ApproxPair pair = averaging_approximation(m, psi);
    const double measured = approximation_defect(pair, l, 1, 16, 3, o).value;
    CHECK(measured <= pair.analytic_defect_bound + 1e-9);
    CHECK(measured <= previous + 1e-9);
    previous = measured;
  }
}

TEST_CASE("torus construction and algebra") {
  CHECK(kind_of([] { TorusModel::from_theta(std::sqrt(2.0) - 1.0); }) == ErrorKind::irrational_theta);
  CHECK(kind_of([] { TorusModel(1, 0); }) == ErrorKind::irrational_theta);
  const TorusModel t = TorusModel::from_theta(0.4);
  CHECK(t.p() == 2);
  CHECK(t.q() == 5);
  CHECK(TorusModel(4, 6).q() == 3);

  for (long q : {1, 2, 3, 5}) {
    const TorusModel model(1, q);
    CHECK(model.relation_defect() <= 1e-12);
    const TorusPolynomial x = random_torus_polynomial(2, 2, 10 + q), y = random_torus_polynomial(2, 2, 20 + q);
    for (double t1 : {0.3, 1.9})
      for (double t2 : {-0.8, 2.4}) {
        CHECK(max_abs_diff(model.symbol(model.adjoint(x), t1, t2), model.symbol(x, t1, t2).adjoint()) <= 1e-12);
        CHECK(max_abs_diff(model.symbol(model.multiply(x, y), t1, t2),
                           model.symbol(x, t1, t2) * model.symbol(y, t1, t2)) <= 1e-12);
      }
  }
  // U2 U1 = w U1 U2 on polynomials.
  const TorusModel model(2, 5);
  const TorusPolynomial u1 = TorusPolynomial::monomial(1, 0), u2 = TorusPolynomial::monomial(0, 1);
  const TorusPolynomial lhs = model.multiply(u2, u1), rhs = model.multiply(u1, u2);
  CHECK(std::abs(lhs.coeffs.at({1, 1})(0, 0) - model.omega() * rhs.coeffs.at({1, 1})(0, 0)) <= 1e-12);
}

TEST_CASE("torus Dirac seminorm examples") {
  const TorusPolynomial one = TorusPolynomial::monomial(0, 0);
  const TorusPolynomial u1 = TorusPolynomial::monomial(1, 0), u2 = TorusPolynomial::monomial(0, 1);
  for (long q : {1, 3, 5}) {
    const TorusModel model(1, q);
    CHECK(model.dirac_seminorm(one, 8).value == 0.0);
    for (std::size_t g : {1, 4, 9}) CHECK(model.dirac_seminorm(u1, g).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  // theta = 0: ||i (z1 g1 + z2 g2)|| = sqrt(2 + 2 |sin(t2 - t1)|).
  const TorusModel flat(0, 1);
  const TorusPolynomial x = u1 + u2;
  for (double t1 : {0.0, 0.4, 2.0})
    for (double t2 : {0.1, 1.7, -2.5}) {
      const double expected = std::sqrt(2.0 + 2.0 * std::abs(std::sin(t2 - t1)));
      CHECK(operator_norm(flat.dirac_symbol(x, t1, t2)) == doctest::Approx(expected).epsilon(1e-12));
    }
  CHECK(flat.dirac_seminorm(x, 4).value == doctest::Approx(2.0).epsilon(1e-12));
  const GridValue v = TorusModel(1, 3).dirac_seminorm(x, 16);
  CHECK(v.value <= 2.0 + 1e-12);
  CHECK(v.value + v.error_bound >= std::sqrt(2.0));
}

TEST_CASE("torus grid refinement") {
  const TorusModel model(2, 5);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const TorusPolynomial x = random_torus_polynomial(1 + seed % 2, 2, seed);
    GridValue coarse = model.dirac_seminorm(x, 4);
    for (std::size_t g : {8, 16, 32}) {
      const GridValue fine = model.dirac_seminorm(x, g);
      CHECK(fine.value >= coarse.value);
      CHECK(fine.value - coarse.value <= coarse.error_bound);
      CHECK(fine.error_bound == doctest::Approx(coarse.error_bound / 2));
      coarse = fine;
    }
  }
}

TEST_CASE("torus action against the Dirac seminorm") {
  CHECK(torus_length(0.0, 0.0) == 0.0);
  CHECK(torus_length(2.0 * std::numbers::pi + 0.5, -0.5) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(torus_length(std::numbers::pi, 0.0) == doctest::Approx(std::numbers::pi));

  const TorusModel model(1, 3);
  const TorusPolynomial u1 = TorusPolynomial::monomial(1, 0);
  for (double t : {0.1, 1.0, 3.0}) {
    TorusPolynomial diff = model.act(u1, t, 0.0);
    diff.add(1, 0, -1.0 * ComplexMatrix::identity(1));
    const double lhs = model.norm(diff, 4).value;
    CHECK(lhs == doctest::Approx(2.0 * std::abs(std::sin(t / 2))).epsilon(1e-12));
    CHECK(lhs <= std::sqrt(2.0) * torus_length(t, 0.0) * model.dirac_seminorm(u1, 4).value);
  }
  const TorusPolynomial still = model.act(u1, 0.0, 0.0);
  CHECK(still.coeffs.at({1, 0})(0, 0) == cplx(1.0, 0.0));

  for (long q : {1, 2, 5}) {
    const ActionDiracReport r = check_action_vs_dirac(TorusModel(1, q), 1 + q % 2, 6, 40 + q, 3, 8, 3);
    CHECK(r.cases == 18);
    CHECK(r.violations == 0);
    CHECK(r.component_violations == 0);
    CHECK(r.max_ratio <= 1.0 + 1e-9);
  }
}
