#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qms/opsys.hpp"
#include "qms/seminorms.hpp"
#include "qms/solver.hpp"

namespace qms {

enum class Certificate { exact, upper_bound, lower_bound };
const char* to_string(Certificate c);

struct SolverReport {
  double value = 0.0;
  Certificate certificate = Certificate::lower_bound;
  int iterations = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::vector<double> residual_history;
  std::vector<double> per_level;  // best value found at each level 1..max_level
  bool converged = true;
  bool infinite = false;  // extended-metric value (kernel violation witnessed)
};

/// Linear map between operator systems as a matrix of working-basis coordinates
/// (target.dim() x source.dim()).
struct LinearMap {
  SystemPtr source;
  SystemPtr target;
  ComplexMatrix matrix;

  static LinearMap identity(const SystemPtr& system);
  /// Entrywise application at level s to amplified coefficients.
  std::vector<cplx> apply_coeffs(const std::vector<cplx>& coeffs, std::size_t s) const;
  AmplifiedElement apply(const AmplifiedElement& z) const;
  double unitality_defect() const;
};

/// Pair (iota, Phi) of unital maps X -> Y with finite-dimensional image of Phi.
struct ApproxPair {
  LinearMap iota;
  LinearMap phi;
  bool positive = false;
  bool isometric = false;
  bool completely_positive = false;
  std::size_t image_rank = 0;
  double epsilon = std::numeric_limits<double>::quiet_NaN();  // recorded defect constant, if known
  double c_constant = 1.0;                                    // (1/C)||x|| <= ||iota(x)||
  double analytic_defect_bound = std::numeric_limits<double>::quiet_NaN();

  /// Validates unitality and records the rank of Phi (cutoff 1e-8).
  static ApproxPair make(LinearMap iota, LinearMap phi, bool positive, bool isometric, bool completely_positive);
};

/// (iota_X (x) iota_Y, Phi_X (x) Phi_Y) between the tensor systems.
ApproxPair tensor_pair(const ApproxPair& a, const ApproxPair& b, const SystemPtr& source, const SystemPtr& target);

struct MetricsOptions {
  RatioOptions ratio;
  QuotientOptions quotient;
  std::size_t screening_samples = 64;  // random directions evaluated before the ascent
};

/// Directions for ratio problems at a given level: a real-orthonormal basis of the complement
/// of ker(L_level) inside either all of M_level(X) or (level 1 only) its Hermitian part.
struct DirectionSet {
  std::size_t level = 1;
  std::vector<std::vector<cplx>> coeffs;
  std::vector<ComplexMatrix> realizations;
  std::vector<std::vector<cplx>> kernel;  // real-orthonormal basis of the kernel
};
DirectionSet complement_directions(const SeminormFamily& f, std::size_t level, bool hermitian_only);

struct MkOptions {
  MetricsOptions solver;
  bool oracle = false;  // brute-force grid cross-check (real dimension <= 6)
};

/// Monge-Kantorovich distance sup{ ||phi(x) - psi(x)|| : L_1(x) <= 1 } between matrix states.
SolverReport mk_distance(const SeminormFamily& f, const UcpMap& phi, const UcpMap& psi, const MkOptions& options);

/// Grid search with adaptive refinement for max over the sphere of num / den, k <= 6.
double brute_force_ratio(std::size_t k, const Objective& num, const Objective& den);

/// Estimate of the smallest C with ||[x]|| <= C L_n(x) at levels 1..max_level (lower bound).
SolverReport finite_diameter_constant(const SeminormFamily& f, std::size_t max_level, std::size_t trials,
                                      std::uint64_t seed, const MetricsOptions& options = {});

/// Estimate of the smallest eps with ||(iota - Phi)_n(x)|| <= eps L_n(x), n <= max_level.
SolverReport approximation_defect(const ApproxPair& a, const SeminormFamily& f, std::size_t max_level,
                                  std::size_t trials, std::uint64_t seed, const MetricsOptions& options = {});

struct PartitionApproximation {
  ApproxPair pair;
  std::vector<std::size_t> centers;
  std::vector<std::vector<double>> weights;  // weights[p][j] = phi_j(p)
};

/// Greedy eps-net of centers and the partition of unity of hat functions max(0, eps - rho(., p_j)).
PartitionApproximation build_partition_approximation(const std::vector<std::vector<double>>& distances, double eps);

struct DiameterCertificate {
  bool pass = false;
  double constant = 0.0;          // C (eps + D E)
  double e_factor = 0.0;          // ||[y]|| <= E |||[y]||| on the image of Phi
  double hypothesis_ratio = 0.0;  // largest sampled |||[Phi(x)]||| / L(x)
  std::size_t samples = 0;
};

/// With |||[y]||| = ||y - tr(y)/d||_HS on the image of Phi, checks |||[Phi(x)]||| <= D L(x) on
/// kernel elements and random samples, then returns the implied diameter constant.
/// Throws HypothesisFailed with a witness when the inequality fails.
DiameterCertificate certify_finite_diameter_via_norm(const ApproxPair& a, const SeminormFamily& f, double aux_bound,
                                                     std::size_t trials, std::uint64_t seed);

struct CoveringReport {
  std::size_t net_size = 0;
  std::size_t samples = 0;
  double max_radius = 0.0;  // largest quotient norm among the samples
};

/// Samples the Hermitian part of the L-unit ball, measures quotient distances exactly and
/// covers the samples greedily by eps-balls.
CoveringReport covering_diagnostic(const SeminormFamily& f, double eps, std::size_t samples, std::uint64_t seed);

struct SliceReport {
  double left = 0.0;   // ||z - (psi (x) 1)_s(z)||
  double right = 0.0;  // 2 C (L (x) 1)_s(z)
  bool pass = false;
};

SliceReport tensor_factor_slice_bound(const SeminormFamily& left_family, double c, const UcpMap& psi,
                                      const OperatorSystem& y, const AmplifiedElement& z,
                                      const SystemPtr& tensor_system);

struct FactorData {
  SeminormFamily family;  // L on X
  ApproxPair approximation;
  double epsilon = 0.0;   // matricial defect constant of the approximation
  double diameter = 0.0;  // diameter constant C_L
};

struct TensorCertification {
  double hypothesis_ratio = 0.0;  // max over samples of (L (x) 1)_s, (1 (x) K)_s divided by M_s
  double defect = 0.0;
  double defect_bound = 0.0;
  double diameter = 0.0;
  double diameter_bound = 0.0;
  bool pass = false;
  SolverReport defect_report;
  SolverReport diameter_report;
};

/// Certification for X (x) Y with seminorm M: checks (L (x) 1)_s, (1 (x) K)_s <= D M_s on samples,
/// measures the defect of the tensor pair and the tensor diameter constant and compares them
/// with D (eps_X + eps_Y) and 2 (C_L + C_K) D.
TensorCertification tensor_product_certification(const FactorData& x, const FactorData& y, const SeminormFamily& m,
                                                 double d, std::size_t max_level, std::size_t trials,
                                                 std::uint64_t seed, const MetricsOptions& options = {});

}  // namespace qms
