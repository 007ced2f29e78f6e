#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "qms/metrics.hpp"
#include "qms/opsys.hpp"
#include "qms/seminorms.hpp"

namespace qms {

/// Clock U = diag(1, w, ..., w^{q-1}) with w = exp(2 pi i p / q) and shift V e_j = e_{j-1}, so that V U = w U V.
ComplexMatrix clock_matrix(std::size_t q, long p);
ComplexMatrix shift_matrix(std::size_t q);

/// Z_q x Z_q acting on M_q by Ad W(m, n), W(m, n) = V^m U^n, with w = exp(2 pi i p / q).
/// Group elements are indexed g = m q + n.
class GroupActionModel {
 public:
  GroupActionModel(std::size_t q, std::size_t p);

  std::size_t q() const noexcept { return q_; }
  std::size_t p() const noexcept { return p_; }
  cplx omega() const noexcept { return omega_; }
  const ComplexMatrix& clock() const noexcept { return u_; }
  const ComplexMatrix& shift() const noexcept { return v_; }
  const SystemPtr& system() const noexcept { return system_; }
  std::size_t group_size() const noexcept { return q_ * q_; }

  const ComplexMatrix& unitary(std::size_t g) const { return w_[g]; }
  /// (2 pi / q) sqrt(m~^2 + n~^2) with representatives in (-q/2, q/2].
  double length(std::size_t g) const { return length_[g]; }
  /// alpha_g(a) = W a W^*, applied blockwise to amplified realizations.
  ComplexMatrix act(std::size_t g, const ComplexMatrix& a) const;
  std::size_t compose(std::size_t g, std::size_t h) const;
  std::size_t inverse(std::size_t g) const;
  /// Average of the length over the group.
  double eta() const;

  /// max |VU - wUV| entry.
  double relation_defect() const;
  /// max over g, h of |alpha_g alpha_h - alpha_{gh}| on the matrix units.
  double action_defect() const;
  /// Largest violation of l(e) = 0, l(g) > 0 off e, symmetry and subadditivity.
  double length_axiom_violation() const;
  /// Dimension of the fixed-point algebra (1 for an ergodic action).
  std::size_t fixed_point_dim() const;

 private:
  std::size_t q_ = 0;
  std::size_t p_ = 0;
  cplx omega_;
  ComplexMatrix u_;
  ComplexMatrix v_;
  std::vector<ComplexMatrix> w_;
  std::vector<double> length_;
  SystemPtr system_;
};

/// L_s(a) = max over g != e of ||(alpha_g)_s(a) - a|| / l(g).
SeminormFamily ergodic_seminorm(const GroupActionModel& model);

/// Character gamma_(a,b)(m, n) = exp(2 pi i (a m + b n) / q).
cplx character(const GroupActionModel& model, std::size_t a, std::size_t b, std::size_t g);
/// P_gamma(x) = (1/|G|) sum_g conj(gamma(g)) alpha_g(x).
ComplexMatrix spectral_projection(const GroupActionModel& model, std::size_t a, std::size_t b, const ComplexMatrix& x);
/// The conditional expectation onto the fixed-point algebra (trivial character).
ComplexMatrix group_average(const GroupActionModel& model, const ComplexMatrix& x);

/// Throws InvalidWeight unless the weight is nonnegative with mean 1.
void validate_weight(const GroupActionModel& model, const std::vector<double>& weight);
/// (1/|G|) sum_g psi(g) l(g).
double analytic_defect_bound(const GroupActionModel& model, const std::vector<double>& weight);
/// (iota, Phi_psi) with Phi_psi(a) = (1/|G|) sum_g psi(g) alpha_g(a); epsilon records the analytic bound.
ApproxPair averaging_approximation(const GroupActionModel& model, const std::vector<double>& weight);

std::vector<double> uniform_weight(const GroupActionModel& model);
std::vector<double> identity_weight(const GroupActionModel& model);
/// psi_K(m, n) = D_K(m)^2 D_K(n)^2 / (2K + 1)^2 with the Dirichlet kernel D_K of order K <= (q-1)/2.
std::vector<double> fejer_weight(const GroupActionModel& model, std::size_t order);
/// Orders 0, 1, ..., (q-1)/2 followed by the identity weight (dropped if already reached).
std::vector<std::vector<double>> fejer_sequence(const GroupActionModel& model);

struct DefectBoundReport {
  std::size_t cases = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max of ||a - Phi(a)|| / (bound L_s(a))
};
/// Random amplifications a at levels 1..max_level against ||a - Phi_psi(a)|| <= bound L_s(a).
DefectBoundReport check_defect_bound(const GroupActionModel& model, const std::vector<double>& weight,
                                     std::size_t max_level, std::size_t trials, std::uint64_t seed);

// ---------------------------------------------------------------------------------------------
// Rational noncommutative torus

/// Noncommutative polynomial sum_k c_k U1^{k1} U2^{k2} with c_k in M_s(C).
struct TorusPolynomial {
  std::size_t level = 1;
  std::map<std::pair<int, int>, ComplexMatrix> coeffs;

  static TorusPolynomial monomial(int k1, int k2, std::size_t level = 1);
  void add(int k1, int k2, const ComplexMatrix& c);
  int degree() const;
};

TorusPolynomial operator+(const TorusPolynomial& a, const TorusPolynomial& b);

struct GridValue {
  double value = 0.0;        // max of the symbol norm over the grid (a lower bound)
  double error_bound = 0.0;  // the true norm is at most value + error_bound
  std::size_t grid = 0;
};

/// C(T^2_theta) for theta = p/q, U2 U1 = e^{2 pi i theta} U1 U2, represented through the
/// symbol U1 -> z1 U, U2 -> z2 V on M_q. Every norm is the sup of the symbol norm over z.
class TorusModel {
 public:
  TorusModel(long p, long q);
  /// Throws IrrationalTheta unless theta = p/q with q <= max_denominator.
  static TorusModel from_theta(double theta, std::size_t max_denominator = 64);

  long p() const noexcept { return p_; }
  long q() const noexcept { return q_; }
  double theta() const noexcept { return static_cast<double>(p_) / static_cast<double>(q_); }
  cplx omega() const noexcept { return omega_; }

  /// (U1^{k1} U2^{k2})^* = w^{k1 k2} U1^{-k1} U2^{-k2}.
  TorusPolynomial adjoint(const TorusPolynomial& x) const;
  TorusPolynomial multiply(const TorusPolynomial& x, const TorusPolynomial& y) const;
  /// d_j scales c_k by i k_j.
  TorusPolynomial derivative(const TorusPolynomial& x, int j) const;
  /// alpha_lambda scales c_k by lambda1^{k1} lambda2^{k2}, lambda_j = e^{i t_j}.
  TorusPolynomial act(const TorusPolynomial& x, double t1, double t2) const;

  ComplexMatrix symbol(const TorusPolynomial& x, double t1, double t2) const;
  /// sum_j d_j(x) (x) gamma_j evaluated at the symbol point.
  ComplexMatrix dirac_symbol(const TorusPolynomial& x, double t1, double t2) const;

  GridValue norm(const TorusPolynomial& x, std::size_t grid) const;
  /// L_s(x) = ||sum_j d_j(x) (x) gamma_j||.
  GridValue dirac_seminorm(const TorusPolynomial& x, std::size_t grid) const;

  /// |U2 U1 - w U1 U2| on the symbol at a few points.
  double relation_defect() const;

 private:
  GridValue grid_norm(std::size_t grid, double lipschitz,
                      const std::function<ComplexMatrix(double, double)>& symbol) const;

  long p_ = 0;
  long q_ = 1;
  cplx omega_ = 1.0;
  ComplexMatrix u_;
  ComplexMatrix v_;
};

/// l(t) = sqrt(t1^2 + t2^2) with t_j reduced to (-pi, pi].
double torus_length(double t1, double t2);

TorusPolynomial random_torus_polynomial(std::size_t level, int degree, std::uint64_t seed);

struct ActionDiracReport {
  std::size_t cases = 0;
  std::size_t violations = 0;            // action inequality beyond the grid allowance
  std::size_t component_violations = 0;  // ||d_k x|| <= L(x) beyond the allowance
  double max_ratio = 0.0;                // max ||alpha_l(x) - x|| / (sqrt 2 l L(x)) on the grid
};

/// For random polynomials and sampled lambda checks ||alpha_l(x) - x|| <= sqrt(2) l(lambda) L(x)
/// and ||d_k(x)|| <= L(x), each with the certified grid allowance.
ActionDiracReport check_action_vs_dirac(const TorusModel& model, std::size_t s, std::size_t trials,
                                        std::uint64_t seed, int degree = 3, std::size_t grid = 12,
                                        std::size_t lambdas = 4);

}  // namespace qms
