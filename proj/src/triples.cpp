#include "qms/triples.hpp"

#include <algorithm>
#include <cmath>

#include "qms/clifford.hpp"
#include "qms/config.hpp"
#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"

namespace qms {

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

const char* to_string(ParityCase c) {
  switch (c) {
    case ParityCase::even_even: return "even-even";
    case ParityCase::even_odd: return "even-odd";
    case ParityCase::odd_even: return "odd-even";
    case ParityCase::odd_odd: return "odd-odd";
  }
  return "unknown";
}

double grading_residual(const LipschitzTriple& t) {
  if (!t.grading) return 0.0;
  const ComplexMatrix& g = *t.grading;
  const std::size_t d = t.hilbert_dim();
  double worst = hermitian_defect(g);
  worst = std::max(worst, max_abs_diff(g * g, ComplexMatrix::identity(d)));
  worst = std::max(worst, anticommutator(g, t.dirac).max_abs());
  for (const auto& a : t.algebra->basis()) worst = std::max(worst, commutator(g, a).max_abs());
  return worst;
}

LipschitzTriple LipschitzTriple::make(SystemPtr algebra, ComplexMatrix dirac, std::optional<ComplexMatrix> grading,
                                      Parity parity, bool check_products) {
  require(algebra != nullptr, ErrorKind::invalid_triple, "missing algebra");
  const std::size_t d = algebra->ambient_dim();
  require(dirac.rows() == d && dirac.cols() == d, ErrorKind::dimension_mismatch, "Dirac operator has the wrong size");
  require(hermitian_defect(dirac) <= kTolerances.hermitian * (1.0 + dirac.frobenius_norm()), ErrorKind::not_hermitian,
          "Dirac operator is not Hermitian");
  require((parity == Parity::even) == grading.has_value(), ErrorKind::parity_mismatch,
          parity == Parity::even ? "even triple without grading" : "odd triple with a grading");
  if (grading)
    require(grading->rows() == d && grading->cols() == d, ErrorKind::dimension_mismatch, "grading has the wrong size");
  if (check_products)
    require(algebra->product_closure_residual() <= kTolerances.span_residual * static_cast<double>(d),
            ErrorKind::invalid_triple, "algebra is not closed under multiplication");
  LipschitzTriple t{std::move(algebra), std::move(dirac), std::move(grading), parity};
  require(grading_residual(t) <= kTolerances.identity, ErrorKind::invalid_triple, "grading relations fail");
  return t;
}

LipschitzTriple stabilize(const LipschitzTriple& t, std::size_t n) {
  require(n >= 1, ErrorKind::dimension_mismatch, "stabilization level must be positive");
  auto algebra = std::make_shared<const OperatorSystem>(matrix_amplification(*t.algebra, n));
  std::optional<ComplexMatrix> grading;
  if (t.grading) grading = amplify(*t.grading, n);
  return LipschitzTriple::make(std::move(algebra), amplify(t.dirac, n), std::move(grading), t.parity, false);
}

namespace {

ParityCase case_of(const LipschitzTriple& a, const LipschitzTriple& b) {
  if (a.parity == Parity::even) return b.parity == Parity::even ? ParityCase::even_even : ParityCase::even_odd;
  return b.parity == Parity::even ? ParityCase::odd_even : ParityCase::odd_odd;
}

// Block (i, j) of the result is kron(p, m_ij), with m split into s x s blocks.
ComplexMatrix kron_blocks(const ComplexMatrix& p, const ComplexMatrix& m, std::size_t s) {
  const std::size_t b = m.rows() / s;
  ComplexMatrix out(s * p.rows() * b, s * p.cols() * b);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      out.set_block(i * p.rows() * b, j * p.cols() * b, kron(p, m.block(i * b, j * b, b, b)));
  return out;
}

}  // namespace

ComplexMatrix ProductTriple::realize(const AmplifiedElement& z) const {
  if (parity_case != ParityCase::odd_odd) return z.realization;
  return kron_blocks(ComplexMatrix::identity(2), z.realization, z.level);
}

ProductTriple external_product(const LipschitzTriple& t1, const LipschitzTriple& t2) {
  for (const LipschitzTriple* t : {&t1, &t2})
    require((t->parity == Parity::even) == t->grading.has_value(), ErrorKind::parity_mismatch,
            "parity flag disagrees with the grading");
  ProductTriple p;
  p.first = t1;
  p.second = t2;
  p.parity_case = case_of(t1, t2);
  p.tensor_system = std::make_shared<const OperatorSystem>(tensor(*t1.algebra, *t2.algebra));
  const std::size_t d1 = t1.hilbert_dim(), d2 = t2.hilbert_dim();
  const ComplexMatrix i1 = ComplexMatrix::identity(d1), i2 = ComplexMatrix::identity(d2);
  const cplx im(0.0, 1.0);
  switch (p.parity_case) {
    case ParityCase::even_even:
      p.result = LipschitzTriple::make(p.tensor_system, kron(t1.dirac, i2) + kron(*t1.grading, t2.dirac),
                                       kron(*t1.grading, *t2.grading), Parity::even, false);
      break;
    case ParityCase::even_odd:
      p.result = LipschitzTriple::make(p.tensor_system, kron(t1.dirac, i2) + kron(*t1.grading, t2.dirac),
                                       std::nullopt, Parity::odd, false);
      break;
    case ParityCase::odd_even:
      p.result = LipschitzTriple::make(p.tensor_system, kron(t1.dirac, *t2.grading) + kron(i1, t2.dirac),
                                       std::nullopt, Parity::odd, false);
      break;
    case ParityCase::odd_odd: {
      const ComplexMatrix x = kron(t1.dirac, i2), y = kron(i1, t2.dirac);
      const std::size_t n = d1 * d2;
      ComplexMatrix dirac(2 * n, 2 * n);
      dirac.set_block(0, n, x + im * y);
      dirac.set_block(n, 0, x - im * y);
      ComplexMatrix grading = direct_sum(ComplexMatrix::identity(n), -1.0 * ComplexMatrix::identity(n));
      std::vector<ComplexMatrix> basis;
      for (const auto& b : p.tensor_system->basis()) basis.push_back((1.0 / std::sqrt(2.0)) * direct_sum(b, b));
      auto algebra = std::make_shared<const OperatorSystem>(OperatorSystem::from_orthonormal(std::move(basis)));
      p.result = LipschitzTriple::make(std::move(algebra), std::move(dirac), std::move(grading), Parity::even, false);
      break;
    }
  }
  return p;
}

ProductInequalityReport check_product_inequality(const ProductTriple& p, std::size_t s, std::size_t trials,
                                                 std::uint64_t seed) {
  require(s >= 1, ErrorKind::dimension_mismatch, "level must be positive");
  const std::size_t d1 = p.first.hilbert_dim(), d2 = p.second.hilbert_dim();
  const ComplexMatrix i1 = ComplexMatrix::identity(d1), i2 = ComplexMatrix::identity(d2);
  const ComplexMatrix x1 = amplify(kron(p.first.dirac, i2), s);
  const ComplexMatrix y2 = amplify(kron(i1, p.second.dirac), s);
  const ComplexMatrix dp = amplify(p.result.dirac, s);
  std::vector<ProductInequalityReport> per(trials);
  kernels::for_each(trials, [&](std::size_t t) {
    const AmplifiedElement z = random_element(*p.tensor_system, s, derive_seed(seed, t));
    const ComplexMatrix a = commutator(x1, z.realization);
    const ComplexMatrix b = commutator(y2, z.realization);
    const ComplexMatrix zp = p.realize(z);
    const ComplexMatrix dz = commutator(dp, zp);
    const double left = operator_norm(a), right = operator_norm(b), prod = operator_norm(dz);
    ProductInequalityReport& r = per[t];
    r.max_violation = std::max({0.0, left - prod, right - prod});
    r.max_ratio = prod > 0.0 ? std::max(left, right) / prod : 0.0;
    double rec = 0.0;
    switch (p.parity_case) {
      case ParityCase::even_even:
      case ParityCase::even_odd: {
        const ComplexMatrix g = amplify(kron(*p.first.grading, i2), s);
        const ComplexMatrix gdg = g * dz * g;
        rec = std::max(max_abs_diff(0.5 * (dz - gdg), a), max_abs_diff(0.5 * (g * dz + dz * g), b));
        break;
      }
      case ParityCase::odd_even: {
        const ComplexMatrix g = amplify(kron(i1, *p.second.grading), s);
        const ComplexMatrix gdg = g * dz * g;
        rec = std::max(max_abs_diff(0.5 * (dz - gdg), b), max_abs_diff(0.5 * (g * dz + dz * g), a));
        break;
      }
      case ParityCase::odd_odd: {
        const std::size_t n = d1 * d2;
        const ComplexMatrix s1 = amplify(kron(pauli(1), ComplexMatrix::identity(n)), s);
        const ComplexMatrix s2 = amplify(kron(pauli(2), ComplexMatrix::identity(n)), s);
        // d = sigma_1 (x) (d1 (x) 1) - sigma_2 (x) (1 (x) d2) blockwise.
        const ComplexMatrix ra = 0.5 * (dz + s1 * dz * s1);
        const ComplexMatrix rb = 0.5 * (dz + s2 * dz * s2);
        rec = std::max(max_abs_diff(ra, kron_blocks(pauli(1), a, s)),
                       max_abs_diff(rb, -1.0 * kron_blocks(pauli(2), b, s)));
        break;
      }
    }
    r.recovery_residual = rec;
    r.cases = 1;
  });
  ProductInequalityReport out;
  out.grading_residual = grading_residual(p.result);
  for (const auto& r : per) {
    out.max_violation = std::max(out.max_violation, r.max_violation);
    out.recovery_residual = std::max(out.recovery_residual, r.recovery_residual);
    out.max_ratio = std::max(out.max_ratio, r.max_ratio);
    out.cases += r.cases;
  }
  return out;
}

Factorization product_seminorm_factorization(const ProductTriple& p, const AmplifiedElement& z) {
  Factorization f;
  f.left = tensor_seminorm_exact(p.first.seminorm(), *p.second.algebra, z, p.tensor_system);
  const SeminormFamily right =
      SeminormFamily::tensor_right(p.first.hilbert_dim(), p.second.seminorm(), p.tensor_system);
  f.right = right.eval(z);
  f.product = operator_norm(commutator(amplify(p.result.dirac, z.level), p.realize(z)));
  return f;
}

double even_square_law_residual(const ProductTriple& p) {
  const ComplexMatrix i1 = ComplexMatrix::identity(p.first.hilbert_dim());
  const ComplexMatrix i2 = ComplexMatrix::identity(p.second.hilbert_dim());
  const ComplexMatrix& d = p.result.dirac;
  const ComplexMatrix expected = kron(p.first.dirac * p.first.dirac, i2) + kron(i1, p.second.dirac * p.second.dirac);
  return max_abs_diff(d * d, expected);
}

LipschitzTriple random_odd_triple(std::size_t d, bool full_algebra, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix dirac = random_hermitian(rng, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::abs(dirac(i, j)) < 0.2) dirac(i, j) += 0.2;
      dirac(j, i) = std::conj(dirac(i, j));
    }
  auto algebra = std::make_shared<const OperatorSystem>(full_algebra ? OperatorSystem::full_matrix_algebra(d)
                                                                     : OperatorSystem::diagonal_algebra(d));
  return LipschitzTriple::make(std::move(algebra), std::move(dirac), std::nullopt, Parity::odd);
}

LipschitzTriple random_even_triple(std::size_t k, bool full_algebra, std::uint64_t seed) {
  Rng rng(seed);
  ComplexMatrix t = gaussian_matrix(rng, k, k);
  for (auto& e : t.entries())
    if (std::abs(e) < 0.2) e += 0.2;
  ComplexMatrix dirac(2 * k, 2 * k);
  dirac.set_block(0, k, t.adjoint());
  dirac.set_block(k, 0, t);
  ComplexMatrix grading = direct_sum(ComplexMatrix::identity(k), -1.0 * ComplexMatrix::identity(k));
  std::vector<ComplexMatrix> basis;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (!full_algebra && i != j) continue;
      const ComplexMatrix e = ComplexMatrix::unit(k, i, j);
      basis.push_back((1.0 / std::sqrt(2.0)) * direct_sum(e, e));
    }
  auto algebra = std::make_shared<const OperatorSystem>(OperatorSystem::from_orthonormal(std::move(basis)));
  return LipschitzTriple::make(std::move(algebra), std::move(dirac), std::move(grading), Parity::even);
}

LipschitzTriple pauli_even_triple() {
  auto algebra = std::make_shared<const OperatorSystem>(OperatorSystem::diagonal_algebra(2));
  return LipschitzTriple::make(std::move(algebra), pauli(1), pauli(3), Parity::even);
}

}  // namespace qms
