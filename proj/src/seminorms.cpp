#include "qms/seminorms.hpp"

#include <algorithm>
#include <cmath>

#include "qms/config.hpp"
#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"

namespace qms {

const char* to_string(SeminormKind kind) {
  switch (kind) {
    case SeminormKind::commutator: return "commutator";
    case SeminormKind::action: return "action";
    case SeminormKind::finite_metric: return "finite-metric";
    case SeminormKind::tensor_left: return "tensor-left";
    case SeminormKind::tensor_right: return "tensor-right";
    case SeminormKind::max: return "max";
    case SeminormKind::stabilized: return "stabilized";
  }
  return "unknown";
}

SeminormFamily SeminormFamily::commutator(SystemPtr system, const ComplexMatrix& dirac) {
  require(system != nullptr, ErrorKind::invalid_operator_system, "missing system");
  const std::size_t d = system->ambient_dim();
  require(dirac.rows() == d && dirac.cols() == d, ErrorKind::dimension_mismatch, "Dirac operator has the wrong size");
  SeminormFamily f;
  f.kind_ = SeminormKind::commutator;
  f.system_ = std::move(system);
  const ComplexMatrix id = ComplexMatrix::identity(d);
  f.terms_.push_back(SandwichTerm{1.0, {{dirac, id}, {-1.0 * id, dirac}}});
  return f;
}

SeminormFamily SeminormFamily::action(SystemPtr system, const std::vector<ComplexMatrix>& unitaries,
                                      const std::vector<double>& lengths) {
  require(system != nullptr, ErrorKind::invalid_operator_system, "missing system");
  require(unitaries.size() == lengths.size() && !unitaries.empty(), ErrorKind::dimension_mismatch,
          "one length per group element is required");
  const std::size_t d = system->ambient_dim();
  const ComplexMatrix id = ComplexMatrix::identity(d);
  SeminormFamily f;
  f.kind_ = SeminormKind::action;
  f.system_ = std::move(system);
  for (std::size_t g = 0; g < unitaries.size(); ++g) {
    require(lengths[g] > 0.0, ErrorKind::invalid_metric, "length must be positive off the identity");
    require(unitaries[g].rows() == d && unitaries[g].cols() == d, ErrorKind::dimension_mismatch,
            "unitary has the wrong size");
    f.terms_.push_back(SandwichTerm{1.0 / lengths[g], {{unitaries[g], unitaries[g].adjoint()}, {-1.0 * id, id}}});
  }
  return f;
}

SeminormFamily SeminormFamily::finite_metric(const std::vector<std::vector<double>>& rho) {
  const std::size_t n = rho.size();
  require(n >= 1, ErrorKind::empty_space, "metric space has no points");
  for (std::size_t p = 0; p < n; ++p) {
    require(rho[p].size() == n, ErrorKind::invalid_metric, "distance matrix is not square");
    require(rho[p][p] == 0.0, ErrorKind::invalid_metric, "nonzero self-distance");
    for (std::size_t q = 0; q < n; ++q) {
      require(rho[p][q] == rho[q][p], ErrorKind::invalid_metric, "distance is not symmetric");
      require(p == q || rho[p][q] > 0.0, ErrorKind::invalid_metric, "distinct points at distance zero");
      for (std::size_t r = 0; r < n; ++r)
        require(rho[p][r] <= rho[p][q] + rho[q][r] + 1e-12 * (1.0 + rho[p][r]), ErrorKind::invalid_metric,
                "triangle inequality fails");
    }
  }
  SeminormFamily f;
  f.kind_ = SeminormKind::finite_metric;
  f.system_ = std::make_shared<const OperatorSystem>(OperatorSystem::diagonal_algebra(n));
  auto row = [n](std::size_t p) {
    ComplexMatrix e(1, n);
    e(0, p) = 1.0;
    return e;
  };
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q)
      f.terms_.push_back(SandwichTerm{1.0 / rho[p][q], {{row(p), row(p).adjoint()}, {-1.0 * row(q), row(q).adjoint()}}});
  return f;
}

SeminormFamily SeminormFamily::tensor_left(const SeminormFamily& left, SystemPtr tensor_system, std::size_t right_dim) {
  require(tensor_system != nullptr && tensor_system->ambient_dim() == left.system().ambient_dim() * right_dim,
          ErrorKind::dimension_mismatch, "tensor system does not match the factors");
  const ComplexMatrix id = ComplexMatrix::identity(right_dim);
  SeminormFamily f;
  f.kind_ = SeminormKind::tensor_left;
  f.system_ = std::move(tensor_system);
  for (const auto& t : left.terms_) {
    SandwichTerm lifted{t.weight, {}};
    for (const auto& [a, b] : t.parts) lifted.parts.emplace_back(kron(a, id), kron(b, id));
    f.terms_.push_back(std::move(lifted));
  }
  return f;
}

SeminormFamily SeminormFamily::tensor_right(std::size_t left_dim, const SeminormFamily& right, SystemPtr tensor_system) {
  require(tensor_system != nullptr && tensor_system->ambient_dim() == left_dim * right.system().ambient_dim(),
          ErrorKind::dimension_mismatch, "tensor system does not match the factors");
  const ComplexMatrix id = ComplexMatrix::identity(left_dim);
  SeminormFamily f;
  f.kind_ = SeminormKind::tensor_right;
  f.system_ = std::move(tensor_system);
  for (const auto& t : right.terms_) {
    SandwichTerm lifted{t.weight, {}};
    for (const auto& [a, b] : t.parts) lifted.parts.emplace_back(kron(id, a), kron(id, b));
    f.terms_.push_back(std::move(lifted));
  }
  return f;
}

SeminormFamily SeminormFamily::max_of(const SeminormFamily& a, const SeminormFamily& b) {
  require(a.system().ambient_dim() == b.system().ambient_dim() && a.system().dim() == b.system().dim(),
          ErrorKind::dimension_mismatch, "max of families on different systems");
  SeminormFamily f;
  f.kind_ = SeminormKind::max;
  f.system_ = a.system_;
  f.terms_ = a.terms_;
  f.terms_.insert(f.terms_.end(), b.terms_.begin(), b.terms_.end());
  return f;
}

SeminormFamily SeminormFamily::stabilized(const SeminormFamily& base, std::size_t n) {
  require(n >= 1, ErrorKind::dimension_mismatch, "stabilization level must be positive");
  SeminormFamily f;
  f.kind_ = SeminormKind::stabilized;
  f.system_ = std::make_shared<const OperatorSystem>(matrix_amplification(base.system(), n));
  f.terms_ = base.terms_;
  f.stabilization_ = n;
  f.base_ = std::make_shared<const SeminormFamily>(base);
  return f;
}

double SeminormFamily::eval(const AmplifiedElement& z) const {
  require(z.coeffs.size() == z.level * z.level * system_->dim(), ErrorKind::dimension_mismatch,
          "element does not belong to the family's system");
  if (kind_ == SeminormKind::stabilized) {
    const std::size_t m = base_->system().dim();
    return base_->eval(forget_subdivisions(as_nested(z, stabilization_, m), m));
  }
  return eval_realization(z.realization);
}

double SeminormFamily::eval_realization(const ComplexMatrix& z) const {
  require(z.is_square() && z.rows() % system_->ambient_dim() == 0, ErrorKind::dimension_mismatch,
          "realization size is not a multiple of the ambient dimension");
  return kernels::sandwich_max(terms_, z);
}

std::vector<NormTerm> SeminormFamily::term_images(const std::vector<ComplexMatrix>& directions) const {
  std::vector<NormTerm> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    NormTerm nt{t.weight, {}};
    nt.images.reserve(directions.size());
    for (const auto& dir : directions) nt.images.push_back(apply_term(t, dir));
    out.push_back(std::move(nt));
  }
  return out;
}

ComplexMatrix SeminormFamily::defining_map(std::size_t s) const {
  const std::size_t m = system_->dim(), d = system_->ambient_dim();
  const std::size_t cols = s * s * m;
  std::vector<std::vector<cplx>> columns(cols);
  kernels::for_each(cols, [&](std::size_t idx) {
    const std::size_t ij = idx / m, k = idx % m;
    ComplexMatrix z(s * d, s * d);
    z.set_block((ij / s) * d, (ij % s) * d, system_->basis()[k]);
    std::vector<cplx> col;
    for (const auto& t : terms_) {
      const ComplexMatrix img = apply_term(t, z);
      for (const auto& v : img.entries()) col.push_back(t.weight * v);
    }
    columns[idx] = std::move(col);
  });
  const std::size_t rows = columns.empty() ? 0 : columns[0].size();
  ComplexMatrix a(rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) a(r, c) = columns[c][r];
  return a;
}

AxiomReport check_axioms(const SeminormFamily& f, std::size_t max_level, std::size_t trials, std::uint64_t seed) {
  require(max_level >= 2, ErrorKind::dimension_mismatch, "axiom checks need max_level >= 2");
  const OperatorSystem& x = f.system();
  std::vector<AxiomReport> per(trials);
  kernels::for_each(trials, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const std::size_t s = 1 + rng.index(max_level - 1);
    const std::size_t r = 1 + rng.index(max_level - s);
    const AmplifiedElement a = random_element(x, s, rng.engine()());
    const AmplifiedElement b = random_element(x, r, rng.engine()());
    const ComplexMatrix v = gaussian_matrix(rng, s, s);
    const ComplexMatrix w = gaussian_matrix(rng, s, s);
    const double la = f.eval(a), lb = f.eval(b);
    AxiomReport& rep = per[t];
    rep.direct_sum_max_residual = std::abs(f.eval(direct_sum(x, a, b)) - std::max(la, lb));
    const double lvaw = f.eval(scalar_sandwich(x, v, a, w));
    rep.bimodule_violation = std::max(0.0, lvaw - operator_norm(v) * la * operator_norm(w));
    rep.star_residual = std::abs(f.eval(adjoint(x, a)) - la);
    rep.scalar_residual = f.eval(scalar_matrix(x, v));
    rep.cases = 1;
  });
  AxiomReport out;
  for (const auto& r : per) {
    out.direct_sum_max_residual = std::max(out.direct_sum_max_residual, r.direct_sum_max_residual);
    out.bimodule_violation = std::max(out.bimodule_violation, r.bimodule_violation);
    out.star_residual = std::max(out.star_residual, r.star_residual);
    out.scalar_residual = std::max(out.scalar_residual, r.scalar_residual);
    out.cases += r.cases;
  }
  return out;
}

EntrywiseReport entrywise_bounds_check(const SeminormFamily& f, const AmplifiedElement& z) {
  const double ls = f.eval(z);
  double sum = 0.0, top = 0.0;
  for (std::size_t i = 0; i < z.level; ++i)
    for (std::size_t j = 0; j < z.level; ++j) {
      const double l1 = f.eval(entry(f.system(), z, i, j));
      sum += l1;
      top = std::max(top, l1);
    }
  EntrywiseReport rep;
  rep.upper_violation = std::max(0.0, ls - sum);
  rep.lower_violation = std::max(0.0, top - ls);
  rep.pass = rep.upper_violation <= kTolerances.compare && rep.lower_violation <= kTolerances.compare;
  return rep;
}

ComplexMatrix kernel_basis(const SeminormFamily& f, std::size_t s) {
  require(s >= 1, ErrorKind::dimension_mismatch, "level must be positive");
  switch (f.kind()) {
    case SeminormKind::tensor_left:
    case SeminormKind::tensor_right:
    case SeminormKind::max:
      fail(ErrorKind::unsupported_kind, std::string("kernel_basis is not available for kind ") + to_string(f.kind()));
    default: break;
  }
  return null_space(f.defining_map(s), kTolerances.kernel_cutoff);
}

double tensor_seminorm_exact(const SeminormFamily& left, const OperatorSystem& y, const AmplifiedElement& z,
                             const SystemPtr& tensor_system) {
  return SeminormFamily::tensor_left(left, tensor_system, y.ambient_dim()).eval(z);
}

double tensor_seminorm_sampled(const SeminormFamily& left, const OperatorSystem& y, const AmplifiedElement& z,
                               std::size_t n_samples, std::uint64_t seed) {
  const OperatorSystem& x = left.system();
  const std::vector<UcpMap> maps = ucp_sample_sequence(y, n_samples, seed);
  return kernels::max_reduce(maps.size(), [&](std::size_t i) {
    return left.eval(forget_subdivisions(apply_ucp_right(x, y, z, maps[i]), x.dim()));
  });
}

double tensor_seminorm_sampled_right(const OperatorSystem& x, const SeminormFamily& right,
                                     const AmplifiedElement& z, std::size_t n_samples, std::uint64_t seed) {
  const OperatorSystem& y = right.system();
  const std::vector<UcpMap> maps = ucp_sample_sequence(x, n_samples, seed);
  return kernels::max_reduce(maps.size(), [&](std::size_t i) {
    return right.eval(forget_subdivisions(apply_ucp_left(x, y, z, maps[i]), y.dim()));
  });
}

SeminormFamily max_seminorm(const SeminormFamily& left_lift, const SeminormFamily& right_lift) {
  return SeminormFamily::max_of(left_lift, right_lift);
}

}  // namespace qms
