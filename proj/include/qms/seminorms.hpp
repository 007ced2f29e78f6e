#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qms/kernels.hpp"
#include "qms/opsys.hpp"
#include "qms/solver.hpp"

namespace qms {

enum class SeminormKind { commutator, action, finite_metric, tensor_left, tensor_right, max, stabilized };

const char* to_string(SeminormKind kind);

/// Operator seminorm {L_s} on an operator system. Every kind is a maximum of weighted norms
/// of linear "sandwich" maps, L_s(z) = max_k w_k ||T_k(z)||, which makes the direct-sum law
/// and scalar bimodule contractivity structural.
class SeminormFamily {
 public:
  /// L_s(z) = ||[D^{(+)s}, z]||.
  static SeminormFamily commutator(SystemPtr system, const ComplexMatrix& dirac);
  /// L_s(a) = max over g of ||(alpha_g)_s(a) - a|| / length(g), alpha_g = Ad(unitary_g).
  /// Only nonidentity elements are passed (length > 0).
  static SeminormFamily action(SystemPtr system, const std::vector<ComplexMatrix>& unitaries,
                               const std::vector<double>& lengths);
  /// Lipschitz seminorm of matrix-valued functions on a finite metric space:
  /// L_s(f) = max over p != q of ||f(p) - f(q)|| / rho(p, q). System = diagonal algebra.
  static SeminormFamily finite_metric(const std::vector<std::vector<double>>& distances);
  /// L (x) 1 on X (x) Y, evaluated exactly through the derivation route.
  static SeminormFamily tensor_left(const SeminormFamily& left, SystemPtr tensor_system, std::size_t right_dim);
  /// 1 (x) K on X (x) Y.
  static SeminormFamily tensor_right(std::size_t left_dim, const SeminormFamily& right, SystemPtr tensor_system);
  /// Pointwise maximum of two families on the same system.
  static SeminormFamily max_of(const SeminormFamily& a, const SeminormFamily& b);
  /// The family on M_n(X) given by L_s(z) = base_{sn}(I_s(z)).
  static SeminormFamily stabilized(const SeminormFamily& base, std::size_t n);

  SeminormKind kind() const noexcept { return kind_; }
  const OperatorSystem& system() const noexcept { return *system_; }
  const SystemPtr& system_ptr() const noexcept { return system_; }
  const std::vector<SandwichTerm>& terms() const noexcept { return terms_; }
  std::size_t stabilization() const noexcept { return stabilization_; }

  double eval(const AmplifiedElement& z) const;
  /// Evaluate directly on a realization of size s * ambient_dim.
  double eval_realization(const ComplexMatrix& z) const;
  /// Norm terms on a set of directions (realizations), for the ratio solver.
  std::vector<NormTerm> term_images(const std::vector<ComplexMatrix>& directions) const;
  /// Matrix of the linear map coeffs -> (T_k(z))_k at level s.
  ComplexMatrix defining_map(std::size_t s) const;

 private:
  SeminormKind kind_ = SeminormKind::commutator;
  SystemPtr system_;
  std::vector<SandwichTerm> terms_;
  std::size_t stabilization_ = 1;
  std::shared_ptr<const SeminormFamily> base_;
};

struct AxiomReport {
  double direct_sum_max_residual = 0.0;
  double bimodule_violation = 0.0;
  double star_residual = 0.0;
  double scalar_residual = 0.0;
  std::size_t cases = 0;
};

/// Randomized check of the direct-sum law, bimodule contractivity, *-invariance and
/// vanishing on scalar matrices at levels up to max_level.
AxiomReport check_axioms(const SeminormFamily& f, std::size_t max_level, std::size_t trials, std::uint64_t seed);

struct EntrywiseReport {
  double upper_violation = 0.0;  // max(0, L_s(z) - sum_ij L_1(z_ij))
  double lower_violation = 0.0;  // max(0, max_kl L_1(z_kl) - L_s(z))
  bool pass = true;
};
EntrywiseReport entrywise_bounds_check(const SeminormFamily& f, const AmplifiedElement& z);

/// Orthonormal basis (columns, in amplified coefficients) of ker(L_s). Supported for the
/// kinds induced by a single linear map: commutator, action, finite_metric, stabilized.
ComplexMatrix kernel_basis(const SeminormFamily& f, std::size_t s);

/// (L_D (x) 1)_s(z) = ||(d (x) 1)_s(z)|| for the commutator family of D.
double tensor_seminorm_exact(const SeminormFamily& left, const OperatorSystem& y, const AmplifiedElement& z,
                             const SystemPtr& tensor_system);

/// max over the first n_samples maps of the prefix-stable UCP sequence on Y of
/// L_{sn}(I_s((1 (x) phi)_s(z))). A lower bound for (L (x) 1)_s(z).
double tensor_seminorm_sampled(const SeminormFamily& left, const OperatorSystem& y, const AmplifiedElement& z,
                               std::size_t n_samples, std::uint64_t seed);
/// Mirror image for 1 (x) K, slicing the left factor.
double tensor_seminorm_sampled_right(const OperatorSystem& x, const SeminormFamily& right,
                                     const AmplifiedElement& z, std::size_t n_samples, std::uint64_t seed);

SeminormFamily max_seminorm(const SeminormFamily& left_lift, const SeminormFamily& right_lift);

}  // namespace qms
