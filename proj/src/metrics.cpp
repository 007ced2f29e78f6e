#include "qms/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include "qms/config.hpp"
#include "qms/errors.hpp"
#include "qms/kernels.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"

namespace qms {

const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::exact: return "exact";
    case Certificate::upper_bound: return "upper_bound";
    case Certificate::lower_bound: return "lower_bound";
  }
  return "?";
}

// ---------------------------------------------------------------------------------------------
// Linear maps and approximation pairs

LinearMap LinearMap::identity(const SystemPtr& system) {
  return {system, system, ComplexMatrix::identity(system->dim())};
}

std::vector<cplx> LinearMap::apply_coeffs(const std::vector<cplx>& coeffs, std::size_t s) const {
  const std::size_t m = source->dim();
  const std::size_t r = target->dim();
  require(coeffs.size() == s * s * m, ErrorKind::dimension_mismatch, "coefficient vector does not match level");
  std::vector<cplx> out(s * s * r);
  for (std::size_t b = 0; b < s * s; ++b) {
    const std::vector<cplx> img = matrix * std::span<const cplx>(coeffs.data() + b * m, m);
    std::copy(img.begin(), img.end(), out.begin() + static_cast<std::ptrdiff_t>(b * r));
  }
  return out;
}

AmplifiedElement LinearMap::apply(const AmplifiedElement& z) const {
  return amplify(*target, z.level, apply_coeffs(z.coeffs, z.level));
}

double LinearMap::unitality_defect() const {
  const std::vector<cplx> img = matrix * std::span<const cplx>(source->unit_coords());
  double worst = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(img[i] - target->unit_coords()[i]));
  return worst;
}

ApproxPair ApproxPair::make(LinearMap iota, LinearMap phi, bool positive, bool isometric, bool completely_positive) {
  require(iota.source && iota.target && phi.source && phi.target, ErrorKind::dimension_mismatch, "null system");
  require(iota.source->dim() == phi.source->dim() && iota.target->dim() == phi.target->dim() &&
              iota.source->ambient_dim() == phi.source->ambient_dim() &&
              iota.target->ambient_dim() == phi.target->ambient_dim(),
          ErrorKind::dimension_mismatch, "iota and Phi must share source and target");
  for (const LinearMap* map : {&iota, &phi}) {
    require(map->matrix.rows() == map->target->dim() && map->matrix.cols() == map->source->dim(),
            ErrorKind::dimension_mismatch, "coordinate matrix has the wrong shape");
    require(map->unitality_defect() <= kTolerances.identity, ErrorKind::invalid_operator_system,
            "approximation maps must be unital");
  }
  ApproxPair p;
  p.image_rank = numerical_rank(phi.matrix, kTolerances.kernel_cutoff);
  p.iota = std::move(iota);
  p.phi = std::move(phi);
  p.positive = positive;
  p.isometric = isometric;
  p.completely_positive = completely_positive;
  return p;
}

ApproxPair tensor_pair(const ApproxPair& a, const ApproxPair& b, const SystemPtr& source, const SystemPtr& target) {
  require(source->dim() == a.iota.source->dim() * b.iota.source->dim() &&
              target->dim() == a.iota.target->dim() * b.iota.target->dim(),
          ErrorKind::dimension_mismatch, "tensor systems do not match the factor pairs");
  LinearMap iota{source, target, kron(a.iota.matrix, b.iota.matrix)};
  LinearMap phi{source, target, kron(a.phi.matrix, b.phi.matrix)};
  ApproxPair p = ApproxPair::make(std::move(iota), std::move(phi), a.positive && b.positive,
                                  a.isometric && b.isometric, a.completely_positive && b.completely_positive);
  p.c_constant = a.c_constant * b.c_constant;
  return p;
}

// ---------------------------------------------------------------------------------------------
// Directions

DirectionSet complement_directions(const SeminormFamily& f, std::size_t level, bool hermitian_only) {
  const OperatorSystem& x = f.system();
  const std::size_t n = level * level * x.dim();
  require(!hermitian_only || level == 1, ErrorKind::dimension_mismatch, "Hermitian directions only at level 1");

  std::vector<std::vector<cplx>> base;
  if (hermitian_only) {
    for (const ComplexMatrix& h : x.hermitian_basis()) base.push_back(x.coordinates(h));
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<cplx> e(n), ie(n);
      e[j] = 1.0;
      ie[j] = cplx(0.0, 1.0);
      base.push_back(std::move(e));
      base.push_back(std::move(ie));
    }
  }
  const std::size_t k = base.size();

  ComplexMatrix a = f.defining_map(level);
  if (a.rows() > a.cols()) a = householder_qr(a).r;
  ComplexMatrix real_map(2 * a.rows(), k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::vector<cplx> img = a * std::span<const cplx>(base[i]);
    for (std::size_t r = 0; r < img.size(); ++r) {
      real_map(r, i) = img[r].real();
      real_map(a.rows() + r, i) = img[r].imag();
    }
  }
  const ComplexMatrix ker = null_space(real_map, kTolerances.kernel_cutoff);

  auto combine_base = [&](const ComplexMatrix& coeff, std::size_t col) {
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < k; ++i) {
      const double w = coeff(i, col).real();
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) v[j] += w * base[i][j];
    }
    return v;
  };

  DirectionSet out;
  out.level = level;
  ComplexMatrix complement;
  if (ker.cols() == 0) {
    complement = ComplexMatrix::identity(k);
  } else {
    ComplexMatrix kt(ker.cols(), k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t c = 0; c < ker.cols(); ++c) kt(c, i) = ker(i, c).real();
    complement = null_space(kt, kTolerances.kernel_cutoff);
    for (std::size_t c = 0; c < ker.cols(); ++c) out.kernel.push_back(combine_base(ker, c));
  }
  for (std::size_t c = 0; c < complement.cols(); ++c) {
    out.coeffs.push_back(combine_base(complement, c));
    out.realizations.push_back(amplify(x, level, out.coeffs.back()).realization);
  }
  return out;
}

namespace {

ComplexMatrix combination(const std::vector<ComplexMatrix>& dirs, std::span<const double> y) {
  ComplexMatrix x(dirs.front().rows(), dirs.front().cols());
  for (std::size_t j = 0; j < dirs.size(); ++j)
    if (y[j] != 0.0) x.axpy(y[j], dirs[j]);
  return x;
}

// Random screening followed by multistart ascent; the best screened directions seed the
// first restarts.
RatioResult screened_ascent(std::size_t k, const Objective& num, const Objective& den, std::size_t trials,
                            std::uint64_t seed, const MetricsOptions& options) {
  RatioOptions ro = options.ratio;
  ro.seed = seed;
  const std::size_t count = std::max(trials, options.screening_samples);
  std::vector<double> ratios(count, -1.0);
  std::vector<std::vector<double>> points(count);
  kernels::for_each(count, [&](std::size_t t) {
    Rng rng(derive_seed(seed ^ 0x5c5c5c5cULL, t));
    points[t] = random_unit_vector(rng, k);
    const double d = den(points[t], nullptr);
    if (d > 0.0) ratios[t] = num(points[t], nullptr) / d;
  });
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratios[a] > ratios[b]; });
  std::vector<std::vector<double>> warm;
  for (std::size_t i = 0; i < std::min<std::size_t>(2, count); ++i)
    if (ratios[order[i]] >= 0.0) warm.push_back(points[order[i]]);
  for (auto& w : ro.warm_starts) warm.push_back(w);
  ro.warm_starts = std::move(warm);
  RatioResult r = maximize_ratio(k, num, den, ro);
  if (!ratios.empty() && ratios[order[0]] > r.value) {
    r.value = ratios[order[0]];
    r.argmax = points[order[0]];
  }
  return r;
}

void merge(SolverReport& report, const RatioResult& r) {
  report.iterations += r.iterations;
  report.restarts += r.restarts;
  report.converged = report.converged && r.converged;
  if (r.value >= report.value) {
    report.value = r.value;
    report.residual_history = r.history;
  }
}

}  // namespace

// ---------------------------------------------------------------------------------------------
// Monge-Kantorovich distance

double brute_force_ratio(std::size_t k, const Objective& num, const Objective& den) {
  require(k >= 1 && k <= 6, ErrorKind::dimension_mismatch, "brute-force oracle supports real dimension <= 6");
  auto ratio = [&](const std::vector<double>& y) {
    const double d = den(y, nullptr);
    return d > 0.0 ? num(y, nullptr) / d : 0.0;
  };
  if (k == 1) return ratio({1.0});

  const double budget = 40000.0;
  const std::size_t g = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::floor(std::pow(budget / (2.0 * static_cast<double>(k)),
                                                      1.0 / static_cast<double>(k - 1)))));
  std::size_t per_face = 1;
  for (std::size_t i = 0; i + 1 < k; ++i) per_face *= g;

  // Every face of the cube [-1, 1]^k, sampled on a uniform grid.
  const std::size_t total = 2 * k * per_face;
  std::vector<double> values(total);
  auto point = [&](std::size_t idx) {
    const std::size_t face = idx / per_face;
    std::size_t rest = idx % per_face;
    std::vector<double> y(k);
    const std::size_t fixed = face / 2;
    y[fixed] = face % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (i == fixed) continue;
      y[i] = -1.0 + 2.0 * static_cast<double>(rest % g) / static_cast<double>(g - 1);
      rest /= g;
    }
    return y;
  };
  kernels::for_each(total, [&](std::size_t idx) { values[idx] = ratio(point(idx)); });

  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  const std::size_t keep = std::min<std::size_t>(8, total);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  // Compass refinement around the best grid points.
  std::vector<double> refined(keep);
  kernels::for_each(keep, [&](std::size_t c) {
    std::vector<double> y = point(order[c]);
    double best = values[order[c]];
    for (double h = 2.0 / static_cast<double>(g - 1); h > 1e-10; h *= 0.5) {
      bool moved = true;
      while (moved) {
        moved = false;
        for (std::size_t i = 0; i < k; ++i) {
          for (double sign : {1.0, -1.0}) {
            std::vector<double> t = y;
            t[i] += sign * h;
            const double v = ratio(t);
            if (v > best) {
              best = v;
              y = std::move(t);
              moved = true;
            }
          }
        }
      }
    }
    refined[c] = best;
  });
  return *std::max_element(refined.begin(), refined.end());
}

SolverReport mk_distance(const SeminormFamily& f, const UcpMap& phi, const UcpMap& psi, const MkOptions& options) {
  const OperatorSystem& x = f.system();
  require(phi.target_dim == psi.target_dim, ErrorKind::dimension_mismatch, "matrix states of different sizes");
  require(phi.values.size() == x.dim() && psi.values.size() == x.dim(), ErrorKind::dimension_mismatch,
          "state values do not match the system");
  const bool hermitian = phi.target_dim == 1;
  const DirectionSet dirs = complement_directions(f, 1, hermitian);

  SolverReport report;
  report.seed = options.solver.ratio.seed;
  report.certificate = Certificate::lower_bound;
  auto difference = [&](const std::vector<cplx>& c) { return phi.apply(c) - psi.apply(c); };

  for (const auto& k : dirs.kernel) {
    const double gap = operator_norm(difference(k));
    if (gap <= kTolerances.kernel_cutoff) continue;
    const double l = f.eval_realization(amplify(x, 1, k).realization);
    const double ratio = l > 0.0 ? gap / l : std::numeric_limits<double>::infinity();
    if (ratio > kTolerances.infinite_ratio) {
      report.infinite = true;
      report.value = std::min(ratio, std::numeric_limits<double>::max());
      report.per_level = {report.value};
      return report;
    }
  }
  if (dirs.coeffs.empty()) {
    report.certificate = Certificate::exact;
    report.per_level = {0.0};
    return report;
  }

  std::vector<ComplexMatrix> images;
  for (const auto& c : dirs.coeffs) images.push_back(difference(c));
  Objective num = [images](std::span<const double> y, std::vector<double>* grad) {
    return norm_with_gradient(images, y, grad);
  };
  Objective den = max_norm_objective(f.term_images(dirs.realizations));
  const std::size_t k = dirs.coeffs.size();

  merge(report, screened_ascent(k, num, den, 0, report.seed, options.solver));
  if (options.oracle && k <= 6) {
    report.value = std::max(report.value, brute_force_ratio(k, num, den));
    report.certificate = Certificate::exact;
  }
  report.per_level = {report.value};
  return report;
}

// ---------------------------------------------------------------------------------------------
// Diameter and defect

SolverReport finite_diameter_constant(const SeminormFamily& f, std::size_t max_level, std::size_t trials,
                                      std::uint64_t seed, const MetricsOptions& options) {
  SolverReport report;
  report.seed = seed;
  report.certificate = Certificate::lower_bound;
  const std::size_t d = f.system().ambient_dim();

  for (std::size_t n = 1; n <= max_level; ++n) {
    const DirectionSet dirs = complement_directions(f, n, false);
    if (dirs.coeffs.empty()) {
      report.per_level.push_back(0.0);
      continue;
    }
    const std::vector<ComplexMatrix>& rs = dirs.realizations;
    const ComplexMatrix id = ComplexMatrix::identity(d);

    auto quotient = [&rs, n, id](std::span<const double> y, std::vector<double>* grad, const QuotientOptions& qo) {
      const ComplexMatrix xm = combination(rs, y);
      const QuotientResult q = minimize_scalar_distance(xm, n, qo);
      if (grad) {
        const SingularPair top = top_singular_pair(xm - kron(q.shift, id));
        grad->assign(rs.size(), 0.0);
        for (std::size_t j = 0; j < rs.size(); ++j) {
          const std::vector<cplx> rv = rs[j] * std::span<const cplx>(top.v);
          cplx acc = 0.0;
          for (std::size_t i = 0; i < rv.size(); ++i) acc += std::conj(top.u[i]) * rv[i];
          (*grad)[j] = acc.real();
        }
      }
      return q.value;
    };
    QuotientOptions quick = options.quotient;
    quick.restarts = std::min(quick.restarts, 2);
    quick.iterations = std::min(quick.iterations, 200);
    Objective num = [quotient, quick](std::span<const double> y, std::vector<double>* grad) {
      return quotient(y, grad, quick);
    };
    Objective den = max_norm_objective(f.term_images(rs));

    const std::uint64_t level_seed = derive_seed(seed, n);
    RatioResult r = screened_ascent(rs.size(), num, den, trials, level_seed, options);
    // The ascent used a cheap inner solve; the reported value re-solves the quotient fully.
    QuotientOptions full = options.quotient;
    full.seed = derive_seed(level_seed, 0xf011);
    const double dv = den(r.argmax, nullptr);
    r.value = dv > 0.0 ? quotient(r.argmax, nullptr, full) / dv : 0.0;
    report.per_level.push_back(r.value);
    merge(report, r);
  }
  return report;
}

SolverReport approximation_defect(const ApproxPair& a, const SeminormFamily& f, std::size_t max_level,
                                  std::size_t trials, std::uint64_t seed, const MetricsOptions& options) {
  require(f.system().dim() == a.iota.source->dim() && f.system().ambient_dim() == a.iota.source->ambient_dim(),
          ErrorKind::dimension_mismatch, "seminorm and approximation live on different systems");
  SolverReport report;
  report.seed = seed;
  report.certificate = Certificate::lower_bound;
  const LinearMap diff{a.iota.source, a.iota.target, a.iota.matrix - a.phi.matrix};

  for (std::size_t n = 1; n <= max_level; ++n) {
    const DirectionSet dirs = complement_directions(f, n, false);
    for (const auto& k : dirs.kernel) {
      const double gap = operator_norm(amplify(*diff.target, n, diff.apply_coeffs(k, n)).realization);
      if (gap > kTolerances.kernel_cutoff) {
        report.infinite = true;
        report.value = std::numeric_limits<double>::max();
        report.per_level.push_back(report.value);
        return report;
      }
    }
    if (dirs.coeffs.empty()) {
      report.per_level.push_back(0.0);
      continue;
    }
    std::vector<ComplexMatrix> images;
    for (const auto& c : dirs.coeffs) images.push_back(amplify(*diff.target, n, diff.apply_coeffs(c, n)).realization);
    Objective num = [images](std::span<const double> y, std::vector<double>* grad) {
      return norm_with_gradient(images, y, grad);
    };
    Objective den = max_norm_objective(f.term_images(dirs.realizations));
    const RatioResult r = screened_ascent(images.size(), num, den, trials, derive_seed(seed, n), options);
    report.per_level.push_back(r.value);
    merge(report, r);
  }
  return report;
}

// ---------------------------------------------------------------------------------------------
// Partition-of-unity approximation

PartitionApproximation build_partition_approximation(const std::vector<std::vector<double>>& distances, double eps) {
  require(eps > 0.0, ErrorKind::invalid_metric, "eps must be positive");
  const SeminormFamily family = SeminormFamily::finite_metric(distances);  // validates the metric
  const SystemPtr system = family.system_ptr();
  const std::size_t n = distances.size();

  PartitionApproximation out;
  for (std::size_t p = 0; p < n; ++p) {
    bool covered = false;
    for (std::size_t c : out.centers) covered = covered || distances[p][c] <= eps;
    if (!covered) out.centers.push_back(p);
  }
  const std::size_t m = out.centers.size();
  out.weights.assign(n, std::vector<double>(m, 0.0));
  for (std::size_t p = 0; p < n; ++p) {
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      out.weights[p][j] = std::max(0.0, eps - distances[p][out.centers[j]]);
      total += out.weights[p][j];
    }
    if (total > 0.0) {
      for (double& w : out.weights[p]) w /= total;
    } else {
      std::size_t nearest = 0;
      for (std::size_t j = 1; j < m; ++j)
        if (distances[p][out.centers[j]] < distances[p][out.centers[nearest]]) nearest = j;
      out.weights[p][nearest] = 1.0;
    }
  }

  ComplexMatrix phi(system->dim(), system->dim());
  for (std::size_t b = 0; b < system->dim(); ++b) {
    const ComplexMatrix& f = system->basis()[b];
    std::vector<cplx> values(n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t j = 0; j < m; ++j) values[p] += out.weights[p][j] * f(out.centers[j], out.centers[j]);
    const std::vector<cplx> coords = system->coordinates(ComplexMatrix::diagonal(std::span<const cplx>(values)));
    for (std::size_t r = 0; r < coords.size(); ++r) phi(r, b) = coords[r];
  }
  out.pair = ApproxPair::make(LinearMap::identity(system), LinearMap{system, system, phi}, true, true, true);
  out.pair.epsilon = eps;
  out.pair.c_constant = 1.0;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Finite diameter from an auxiliary norm on the image of Phi

namespace {

ComplexMatrix traceless_part(const ComplexMatrix& y) {
  ComplexMatrix t = y;
  const cplx tau = y.trace() / static_cast<double>(y.rows());
  for (std::size_t i = 0; i < y.rows(); ++i) t(i, i) -= tau;
  return t;
}

}  // namespace

DiameterCertificate certify_finite_diameter_via_norm(const ApproxPair& a, const SeminormFamily& f, double aux_bound,
                                                     std::size_t trials, std::uint64_t seed) {
  require(std::isfinite(a.epsilon), ErrorKind::hypothesis_failed, "approximation constant epsilon is not recorded");
  require(aux_bound >= 0.0, ErrorKind::hypothesis_failed, "auxiliary bound must be nonnegative");
  const OperatorSystem& x = f.system();
  const OperatorSystem& y = *a.phi.target;
  require(x.dim() == a.phi.source->dim(), ErrorKind::dimension_mismatch, "seminorm and pair do not match");

  // HS-orthonormal basis of the traceless part of the image of Phi.
  std::vector<ComplexMatrix> images;
  for (std::size_t c = 0; c < a.phi.matrix.cols(); ++c) {
    std::vector<cplx> col(a.phi.matrix.rows());
    for (std::size_t r = 0; r < col.size(); ++r) col[r] = a.phi.matrix(r, c);
    images.push_back(traceless_part(y.realize(col)));
  }
  ComplexMatrix gram(images.size(), images.size());
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = 0; j < images.size(); ++j) gram(i, j) = inner(images[i], images[j]);
  const HermitianEigenResult eig = hermitian_eigen(gram);
  const double top = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues.back();
  double sum_sq = 0.0;
  for (std::size_t e = 0; e < eig.eigenvalues.size(); ++e) {
    const double lambda = eig.eigenvalues[e];
    if (lambda <= top * kTolerances.kernel_cutoff * kTolerances.kernel_cutoff || lambda <= 1e-24) continue;
    ComplexMatrix b(y.ambient_dim(), y.ambient_dim());
    for (std::size_t i = 0; i < images.size(); ++i) b.axpy(eig.eigenvectors(i, e) / std::sqrt(lambda), images[i]);
    const double nb = operator_norm(b);
    sum_sq += nb * nb;
  }

  DiameterCertificate cert;
  cert.e_factor = std::min(1.0, std::sqrt(sum_sq));
  auto aux_norm = [&](const std::vector<cplx>& coords) {
    return traceless_part(y.realize(a.phi.matrix * std::span<const cplx>(coords))).frobenius_norm();
  };

  const DirectionSet dirs = complement_directions(f, 1, false);
  for (std::size_t i = 0; i < dirs.kernel.size(); ++i) {
    const double v = aux_norm(dirs.kernel[i]);
    if (v > kTolerances.kernel_cutoff)
      fail(ErrorKind::hypothesis_failed, "kernel element " + std::to_string(i) + " of L has |||[Phi(x)]||| = " +
                                             std::to_string(v) + " > 0");
  }
  std::vector<double> ratios(trials, 0.0);
  kernels::for_each(trials, [&](std::size_t t) {
    const AmplifiedElement z = random_element(x, 1, derive_seed(seed, t));
    const double l = f.eval(z);
    const double v = aux_norm(z.coeffs);
    ratios[t] = l > 0.0 ? v / l : (v > kTolerances.kernel_cutoff ? std::numeric_limits<double>::infinity() : 0.0);
  });
  for (std::size_t t = 0; t < trials; ++t) {
    cert.hypothesis_ratio = std::max(cert.hypothesis_ratio, ratios[t]);
    if (ratios[t] > aux_bound + kTolerances.compare)
      fail(ErrorKind::hypothesis_failed, "sample " + std::to_string(t) + " (seed " +
                                             std::to_string(derive_seed(seed, t)) + ") has ratio " +
                                             std::to_string(ratios[t]) + " > D = " + std::to_string(aux_bound));
  }
  cert.samples = trials;
  cert.constant = a.c_constant * (a.epsilon + aux_bound * cert.e_factor);
  cert.pass = true;
  return cert;
}

// ---------------------------------------------------------------------------------------------
// Covering numbers

CoveringReport covering_diagnostic(const SeminormFamily& f, double eps, std::size_t samples, std::uint64_t seed) {
  require(eps > 0.0, ErrorKind::config_invalid, "eps must be positive");
  const DirectionSet dirs = complement_directions(f, 1, true);
  CoveringReport report;
  report.samples = samples;
  if (dirs.coeffs.empty() || samples == 0) {
    report.net_size = samples == 0 ? 0 : 1;
    return report;
  }
  const std::size_t k = dirs.coeffs.size();
  std::vector<ComplexMatrix> points(samples);
  kernels::for_each(samples, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const std::vector<double> y = random_unit_vector(rng, k);
    const ComplexMatrix x = combination(dirs.realizations, y);
    const double radius = std::pow(rng.uniform(), 1.0 / static_cast<double>(k));
    points[i] = (radius / f.eval_realization(x)) * x;
  });
  auto spread = [](const ComplexMatrix& h) {
    const std::vector<double> ev = hermitian_eigenvalues(h);
    return 0.5 * (ev.back() - ev.front());
  };
  std::vector<std::vector<double>> dist(samples, std::vector<double>(samples, 0.0));
  std::vector<double> radii(samples);
  kernels::for_each(samples, [&](std::size_t i) {
    radii[i] = spread(points[i]);
    for (std::size_t j = 0; j < samples; ++j)
      if (j != i) dist[i][j] = spread(points[i] - points[j]);
  });
  report.max_radius = *std::max_element(radii.begin(), radii.end());

  // Cover the most eccentric uncovered sample first, by the eps-ball through it that covers the
  // most uncovered samples. On an interval this is the optimal left-to-right covering.
  std::vector<char> covered(samples, 0);
  std::size_t remaining = samples;
  while (remaining > 0) {
    std::size_t extreme = samples;
    double ecc = -1.0;
    for (std::size_t i = 0; i < samples; ++i) {
      if (covered[i]) continue;
      double e = 0.0;
      for (std::size_t j = 0; j < samples; ++j)
        if (!covered[j]) e = std::max(e, dist[i][j]);
      if (e > ecc) {
        ecc = e;
        extreme = i;
      }
    }
    std::size_t best = extreme, best_gain = 0;
    for (std::size_t c = 0; c < samples; ++c) {
      if (dist[c][extreme] > eps) continue;
      std::size_t gain = 0;
      for (std::size_t j = 0; j < samples; ++j) gain += !covered[j] && dist[c][j] <= eps;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    for (std::size_t j = 0; j < samples; ++j)
      if (!covered[j] && dist[best][j] <= eps) {
        covered[j] = 1;
        --remaining;
      }
    ++report.net_size;
  }
  return report;
}

// ---------------------------------------------------------------------------------------------
// Tensor products

SliceReport tensor_factor_slice_bound(const SeminormFamily& left_family, double c, const UcpMap& psi,
                                      const OperatorSystem& y, const AmplifiedElement& z,
                                      const SystemPtr& tensor_system) {
  require(psi.target_dim == 1, ErrorKind::dimension_mismatch, "slice map must be a state");
  const OperatorSystem& x = left_family.system();
  const std::size_t dx = x.ambient_dim(), dy = y.ambient_dim(), s = z.level;
  const NestedElement sliced = apply_ucp_left(x, y, z, psi);
  const ComplexMatrix idx = ComplexMatrix::identity(dx);
  ComplexMatrix embedded(s * dx * dy, s * dx * dy);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      embedded.set_block(i * dx * dy, j * dx * dy, kron(idx, sliced.realization.block(i * dy, j * dy, dy, dy)));

  SliceReport r;
  r.left = operator_norm(z.realization - embedded);
  r.right = 2.0 * c * SeminormFamily::tensor_left(left_family, tensor_system, dy).eval(z);
  r.pass = r.left <= r.right + kTolerances.compare;
  return r;
}

TensorCertification tensor_product_certification(const FactorData& x, const FactorData& y, const SeminormFamily& m,
                                                 double d, std::size_t max_level, std::size_t trials,
                                                 std::uint64_t seed, const MetricsOptions& options) {
  const SystemPtr& t = m.system_ptr();
  const std::size_t dx = x.family.system().ambient_dim(), dy = y.family.system().ambient_dim();
  require(t->ambient_dim() == dx * dy && t->dim() == x.family.system().dim() * y.family.system().dim(),
          ErrorKind::dimension_mismatch, "M does not live on the tensor product of the factors");
  const SeminormFamily left = SeminormFamily::tensor_left(x.family, t, dy);
  const SeminormFamily right = SeminormFamily::tensor_right(dx, y.family, t);

  TensorCertification out;
  for (std::size_t s = 1; s <= max_level; ++s) {
    for (std::size_t i = 0; i < trials; ++i) {
      const std::uint64_t sample_seed = derive_seed(derive_seed(seed, s), i);
      const AmplifiedElement z = random_element(*t, s, sample_seed);
      const double mv = m.eval(z);
      const double lift = std::max(left.eval(z), right.eval(z));
      const double ratio = mv > 0.0 ? lift / mv : (lift > kTolerances.compare ? std::numeric_limits<double>::infinity() : 0.0);
      out.hypothesis_ratio = std::max(out.hypothesis_ratio, ratio);
      if (ratio > d + kTolerances.compare)
        fail(ErrorKind::hypothesis_failed, "level " + std::to_string(s) + " sample seed " +
                                               std::to_string(sample_seed) + ": lifted seminorm / M = " +
                                               std::to_string(ratio) + " > D");
    }
  }

  SystemPtr target = t;
  if (x.approximation.iota.target != x.approximation.iota.source ||
      y.approximation.iota.target != y.approximation.iota.source)
    target = std::make_shared<const OperatorSystem>(
        tensor(*x.approximation.iota.target, *y.approximation.iota.target));
  const ApproxPair pair = tensor_pair(x.approximation, y.approximation, t, target);

  out.defect_report = approximation_defect(pair, m, max_level, trials, derive_seed(seed, 0xdef), options);
  out.diameter_report = finite_diameter_constant(m, max_level, trials, derive_seed(seed, 0xd1a), options);
  out.defect = out.defect_report.value;
  out.diameter = out.diameter_report.value;
  out.defect_bound = d * (x.epsilon + y.epsilon);
  out.diameter_bound = 2.0 * (x.diameter + y.diameter) * d;
  out.pass = !out.defect_report.infinite && out.defect <= out.defect_bound + 1e-6 &&
             out.diameter <= out.diameter_bound + 1e-6;
  return out;
}

}  // namespace qms
