#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qms/matrix.hpp"
#include "qms/solver.hpp"

namespace qms {

/// Unital, adjoint-closed subspace of M_d(C). The working basis is Frobenius-orthonormal
/// (coordinates are inner products); the basis supplied by the caller is kept for reporting.
class OperatorSystem {
 public:
  /// Orthonormalizes and validates: independence, unit in the span, closed under adjoints.
  explicit OperatorSystem(std::vector<ComplexMatrix> basis);

  static OperatorSystem full_matrix_algebra(std::size_t d);
  static OperatorSystem diagonal_algebra(std::size_t d);
  /// Takes an already orthonormal basis as the working basis (no re-orthonormalization),
  /// still validating unit and adjoint closure.
  static OperatorSystem from_orthonormal(std::vector<ComplexMatrix> onb);

  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t dim() const noexcept { return basis_.size(); }
  const std::vector<ComplexMatrix>& basis() const noexcept { return basis_; }
  const std::vector<ComplexMatrix>& original_basis() const noexcept { return original_; }
  const std::vector<cplx>& unit_coords() const noexcept { return unit_coords_; }

  std::vector<cplx> coordinates(const ComplexMatrix& x) const;
  /// ||x - P(x)||_F with P the orthogonal projection onto the span.
  double span_residual(const ComplexMatrix& x) const;
  ComplexMatrix realize(std::span<const cplx> coords) const;
  std::vector<cplx> adjoint_coords(std::span<const cplx> coords) const;
  /// Frobenius-orthonormal real basis of the Hermitian part (dim() elements).
  const std::vector<ComplexMatrix>& hermitian_basis() const noexcept { return hermitian_basis_; }
  /// Largest span residual of products of basis elements.
  double product_closure_residual() const;

 private:
  struct Trusted {};
  OperatorSystem(Trusted, std::vector<ComplexMatrix> onb, std::vector<ComplexMatrix> original);
  void finish();

  std::size_t ambient_dim_ = 0;
  std::vector<ComplexMatrix> basis_;
  std::vector<ComplexMatrix> original_;
  std::vector<cplx> unit_coords_;
  ComplexMatrix star_;  // star_(j, k) = <b_j, b_k^*>
  std::vector<ComplexMatrix> hermitian_basis_;
};

using SystemPtr = std::shared_ptr<const OperatorSystem>;

/// X (x) Y inside M_{dX dY}, basis kron(b_a, c_b) at index a * dim(Y) + b.
OperatorSystem tensor(const OperatorSystem& x, const OperatorSystem& y);
/// M_n(X) inside M_{n d}, basis E_kl (x) b_c at index (k n + l) dim(X) + c.
OperatorSystem matrix_amplification(const OperatorSystem& x, std::size_t n);

/// Element of M_s(X): coeffs[(i s + j) m + k] is the k-th coordinate of the (i, j) entry.
struct AmplifiedElement {
  std::size_t level = 1;
  std::vector<cplx> coeffs;
  ComplexMatrix realization;
};

AmplifiedElement amplify(const OperatorSystem& x, std::size_t s, std::vector<cplx> coeffs);
/// Element whose realization is the given (s d) x (s d) matrix; throws DimensionMismatch if the
/// blocks are not in the span.
AmplifiedElement amplify_realization(const OperatorSystem& x, std::size_t s, const ComplexMatrix& z);
/// v (x) I_d for v in M_s(C).
AmplifiedElement scalar_matrix(const OperatorSystem& x, const ComplexMatrix& v);
AmplifiedElement adjoint(const OperatorSystem& x, const AmplifiedElement& z);
AmplifiedElement direct_sum(const OperatorSystem& x, const AmplifiedElement& a, const AmplifiedElement& b);
/// v z w for scalar matrices v, w in M_s(C).
AmplifiedElement scalar_sandwich(const OperatorSystem& x, const ComplexMatrix& v, const AmplifiedElement& z,
                                 const ComplexMatrix& w);
AmplifiedElement entry(const OperatorSystem& x, const AmplifiedElement& z, std::size_t i, std::size_t j);
AmplifiedElement combine(const OperatorSystem& x, cplx a, const AmplifiedElement& z, cplx b,
                         const AmplifiedElement& w);
AmplifiedElement random_element(const OperatorSystem& x, std::size_t s, std::uint64_t seed);

/// Element of M_s(M_n(X)) with coefficient layout ((i s + j) n^2 + k n + l) m + c.
struct NestedElement {
  std::size_t outer = 1;
  std::size_t inner = 1;
  std::vector<cplx> coeffs;
  ComplexMatrix realization;
};

NestedElement amplify_nested(const OperatorSystem& x, std::size_t s, std::size_t n, std::vector<cplx> coeffs);
/// The map I_s : M_s(M_n(X)) -> M_{sn}(X), I_s(x)_{(i n + k), (j n + l)} = (x_ij)_kl.
AmplifiedElement forget_subdivisions(const NestedElement& z, std::size_t m);
NestedElement add_subdivisions(const AmplifiedElement& z, std::size_t n, std::size_t m);
/// Reinterpret an element of M_s(M_n(X)) (as an amplified element over matrix_amplification(X, n)).
NestedElement as_nested(const AmplifiedElement& z, std::size_t n, std::size_t m);
AmplifiedElement as_amplified(const NestedElement& z);

/// Quotient norm of z in M_s(X) / M_s(C).
QuotientResult quotient_norm(const AmplifiedElement& z, const QuotientOptions& options = {});

/// Unital completely positive map X -> M_n given by its values on the working basis.
struct UcpMap {
  std::size_t target_dim = 1;
  std::vector<ComplexMatrix> values;

  ComplexMatrix apply(std::span<const cplx> coords) const;
  /// phi_s(z): block (i, j) = phi(z_ij).
  ComplexMatrix apply_amplified(const AmplifiedElement& z) const;
};

/// b -> V^* b V for an isometry V (d x n).
UcpMap compression(const OperatorSystem& x, const ComplexMatrix& v);
/// Direct sum of compressions.
UcpMap compression_sum(const OperatorSystem& x, const std::vector<ComplexMatrix>& isometries);
/// Haar-random compression to M_n; for n > d a block-diagonal sum of compressions.
UcpMap sample_ucp(const OperatorSystem& x, std::size_t n, std::uint64_t seed);
/// Prefix-stable sample: identity representation, vector states of the standard frame,
/// then Haar compressions of sizes 1..d.
std::vector<UcpMap> ucp_sample_sequence(const OperatorSystem& x, std::size_t count, std::uint64_t seed);
/// phi(1) deviation from I_n (max entry).
double unitality_defect(const OperatorSystem& x, const UcpMap& phi);

/// (1 (x) phi)_s(z) for z in M_s(X (x) Y) given in tensor coordinates, as an element of
/// M_s(M_n(X)).
NestedElement apply_ucp_right(const OperatorSystem& x, const OperatorSystem& y, const AmplifiedElement& z,
                              const UcpMap& phi);
/// (phi (x) 1)_s(z), the mirror image, as an element of M_s(M_n(Y)).
NestedElement apply_ucp_left(const OperatorSystem& x, const OperatorSystem& y, const AmplifiedElement& z,
                             const UcpMap& phi);

}  // namespace qms
