#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qms/opsys.hpp"
#include "qms/seminorms.hpp"

namespace qms {

enum class Parity { even, odd };
enum class ParityCase { even_even, even_odd, odd_even, odd_odd };

const char* to_string(Parity p);
const char* to_string(ParityCase c);

/// Finite-dimensional unital Lipschitz triple (A, H, D) with optional grading. Parity is an
/// explicit flag and must agree with the presence of the grading.
struct LipschitzTriple {
  SystemPtr algebra;
  ComplexMatrix dirac;
  std::optional<ComplexMatrix> grading;
  Parity parity = Parity::odd;

  /// Validates Hermiticity, grading relations and (when check_products is set) closure of
  /// the algebra under multiplication.
  static LipschitzTriple make(SystemPtr algebra, ComplexMatrix dirac, std::optional<ComplexMatrix> grading,
                              Parity parity, bool check_products = true);

  std::size_t hilbert_dim() const { return dirac.rows(); }
  SeminormFamily seminorm() const { return SeminormFamily::commutator(algebra, dirac); }
};

/// Largest violation of gamma^2 = 1, gamma D = -D gamma, gamma a = a gamma (0 without grading).
double grading_residual(const LipschitzTriple& t);

/// (M_n(A), H^{(+)n}, D^{(+)n}) with grading gamma^{(+)n}.
LipschitzTriple stabilize(const LipschitzTriple& t, std::size_t n);

struct ProductTriple {
  LipschitzTriple first;
  LipschitzTriple second;
  ParityCase parity_case = ParityCase::even_even;
  LipschitzTriple result;
  /// A1 (x) A2 on H1 (x) H2; elements of the product are given in its coordinates.
  SystemPtr tensor_system;

  /// Realization of z in M_s(A1 (x) A2) on the product Hilbert space (doubled for odd x odd).
  ComplexMatrix realize(const AmplifiedElement& z) const;
};

ProductTriple external_product(const LipschitzTriple& t1, const LipschitzTriple& t2);

struct ProductInequalityReport {
  double max_violation = 0.0;         // max(0, ||(d1 (x) 1)_s z|| - ||d_s z||, ||(1 (x) d2)_s z|| - ||d_s z||)
  double recovery_residual = 0.0;     // max entrywise error of the recovery identities
  double grading_residual = 0.0;
  double max_ratio = 0.0;             // max of the factor norms over the product norm
  std::size_t cases = 0;
};

ProductInequalityReport check_product_inequality(const ProductTriple& p, std::size_t s, std::size_t trials,
                                                 std::uint64_t seed);

struct Factorization {
  double left = 0.0;
  double right = 0.0;
  double product = 0.0;
};

/// ((L_{D1} (x) 1)_s(z), (1 (x) L_{D2})_s(z), L_{(D1 x D2)^{(+)s}}(z)).
Factorization product_seminorm_factorization(const ProductTriple& p, const AmplifiedElement& z);

/// (D1 x D2)^2 - (D1^2 (x) 1 + 1 (x) D2^2), max entry, for the even x even case.
double even_square_law_residual(const ProductTriple& p);

// Sample triples used by the test suites and the CLI.

/// Odd triple on C^d: diagonal algebra with a Hermitian D whose off-diagonal entries are all
/// nonzero (so the kernel of the seminorm is C), or the full matrix algebra.
LipschitzTriple random_odd_triple(std::size_t d, bool full_algebra, std::uint64_t seed);
/// Even triple on C^k (+) C^k with grading diag(1, -1), D = [[0, T^*], [T, 0]] and algebra
/// {a (+) a} for a diagonal (or arbitrary when full_algebra).
LipschitzTriple random_even_triple(std::size_t k, bool full_algebra, std::uint64_t seed);
/// D = sigma_1, gamma = sigma_3 on the diagonal algebra of C^2.
LipschitzTriple pauli_even_triple();

}  // namespace qms
