#include "qms/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qms/clifford.hpp"
#include "qms/config.hpp"
#include "qms/errors.hpp"
#include "qms/kernels.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"

namespace qms {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long wrap(long a, long q) {
  const long r = a % q;
  return r < 0 ? r + q : r;
}

// exp(2 pi i n / q), reduced mod q first so large exponents stay exact.
cplx root_of_unity(long n, long q) {
  const double angle = kTwoPi * static_cast<double>(wrap(n, q)) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

// U^a V^b with U = diag(w^j), V e_j = e_{j-1}: column j has w^{(j-b) a} in row j - b.
ComplexMatrix clock_shift_word(long q, long p, long a, long b) {
  ComplexMatrix w(static_cast<std::size_t>(q), static_cast<std::size_t>(q));
  for (long j = 0; j < q; ++j) {
    const long row = wrap(j - b, q);
    w(static_cast<std::size_t>(row), static_cast<std::size_t>(j)) = root_of_unity(p * row * a, q);
  }
  return w;
}

long representative(long m, long q) {
  const long r = wrap(m, q);
  return 2 * r <= q ? r : r - q;
}

}  // namespace

ComplexMatrix clock_matrix(std::size_t q, long p) {
  const long ql = static_cast<long>(q);
  return clock_shift_word(ql, p, 1, 0);
}

ComplexMatrix shift_matrix(std::size_t q) { return clock_shift_word(static_cast<long>(q), 0, 0, 1); }

// ---------------------------------------------------------------------------------------------
// Finite Weyl action

GroupActionModel::GroupActionModel(std::size_t q, std::size_t p) : q_(q), p_(q >= 1 ? p % q : 0) {
  require(q >= 2, ErrorKind::dimension_mismatch, "group action model needs q >= 2");
  const long ql = static_cast<long>(q);
  const long pl = static_cast<long>(p_);
  omega_ = root_of_unity(pl, ql);
  u_ = clock_matrix(q, pl);
  v_ = shift_matrix(q);
  system_ = std::make_shared<const OperatorSystem>(OperatorSystem::full_matrix_algebra(q));
  for (long m = 0; m < ql; ++m) {
    for (long n = 0; n < ql; ++n) {
      // V^m U^n e_j = w^{j n} e_{j - m}
      ComplexMatrix w(q, q);
      for (long j = 0; j < ql; ++j)
        w(static_cast<std::size_t>(wrap(j - m, ql)), static_cast<std::size_t>(j)) = root_of_unity(pl * j * n, ql);
      w_.push_back(std::move(w));
      const double mr = static_cast<double>(representative(m, ql));
      const double nr = static_cast<double>(representative(n, ql));
      length_.push_back(kTwoPi / static_cast<double>(q) * std::sqrt(mr * mr + nr * nr));
    }
  }
}

ComplexMatrix GroupActionModel::act(std::size_t g, const ComplexMatrix& a) const {
  require(a.rows() % q_ == 0 && a.is_square(), ErrorKind::dimension_mismatch, "element is not in M_s(M_q)");
  const ComplexMatrix& w = w_[g];
  if (a.rows() == q_) return w * times_adjoint(a, w);
  return block_sandwich(w, a, w.adjoint(), a.rows() / q_);
}

std::size_t GroupActionModel::compose(std::size_t g, std::size_t h) const {
  return ((g / q_ + h / q_) % q_) * q_ + (g % q_ + h % q_) % q_;
}

std::size_t GroupActionModel::inverse(std::size_t g) const {
  return ((q_ - g / q_) % q_) * q_ + (q_ - g % q_) % q_;
}

double GroupActionModel::eta() const {
  return std::accumulate(length_.begin(), length_.end(), 0.0) / static_cast<double>(group_size());
}

double GroupActionModel::relation_defect() const {
  return max_abs_diff(v_ * u_, omega_ * (u_ * v_));
}

double GroupActionModel::action_defect() const {
  double worst = 0.0;
  for (std::size_t g = 0; g < group_size(); ++g)
    for (std::size_t h = 0; h < group_size(); ++h)
      for (std::size_t i = 0; i < q_; ++i)
        for (std::size_t j = 0; j < q_; ++j) {
          const ComplexMatrix e = ComplexMatrix::unit(q_, i, j);
          worst = std::max(worst, max_abs_diff(act(g, act(h, e)), act(compose(g, h), e)));
        }
  return worst;
}

double GroupActionModel::length_axiom_violation() const {
  double worst = std::abs(length_[0]);
  for (std::size_t g = 1; g < group_size(); ++g) {
    if (!(length_[g] > 0.0)) worst = std::max(worst, 1.0);
    worst = std::max(worst, std::abs(length_[g] - length_[inverse(g)]));
    for (std::size_t h = 0; h < group_size(); ++h)
      worst = std::max(worst, length_[compose(g, h)] - length_[g] - length_[h]);
  }
  return worst;
}

std::size_t GroupActionModel::fixed_point_dim() const {
  // a -> (alpha_g(a) - a) for the generators (1, 0) and (0, 1), on row-major vec(a).
  const std::size_t n = q_ * q_;
  ComplexMatrix stacked(2 * n, n);
  const std::size_t gens[2] = {q_, 1};
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const ComplexMatrix e = ComplexMatrix::unit(q_, c / q_, c % q_);
      const ComplexMatrix d = act(gens[r], e) - e;
      for (std::size_t k = 0; k < n; ++k) stacked(r * n + k, c) = d.data()[k];
    }
  }
  return null_space(stacked, kTolerances.kernel_cutoff).cols();
}

SeminormFamily ergodic_seminorm(const GroupActionModel& model) {
  std::vector<ComplexMatrix> unitaries;
  std::vector<double> lengths;
  for (std::size_t g = 1; g < model.group_size(); ++g) {
    unitaries.push_back(model.unitary(g));
    lengths.push_back(model.length(g));
  }
  return SeminormFamily::action(model.system(), unitaries, lengths);
}

cplx character(const GroupActionModel& model, std::size_t a, std::size_t b, std::size_t g) {
  const long q = static_cast<long>(model.q());
  const long m = static_cast<long>(g / model.q()), n = static_cast<long>(g % model.q());
  return root_of_unity(static_cast<long>(a) * m + static_cast<long>(b) * n, q);
}

ComplexMatrix spectral_projection(const GroupActionModel& model, std::size_t a, std::size_t b, const ComplexMatrix& x) {
  ComplexMatrix out(x.rows(), x.cols());
  for (std::size_t g = 0; g < model.group_size(); ++g) out.axpy(std::conj(character(model, a, b, g)), model.act(g, x));
  out *= 1.0 / static_cast<double>(model.group_size());
  return out;
}

ComplexMatrix group_average(const GroupActionModel& model, const ComplexMatrix& x) {
  return spectral_projection(model, 0, 0, x);
}

void validate_weight(const GroupActionModel& model, const std::vector<double>& weight) {
  require(weight.size() == model.group_size(), ErrorKind::invalid_weight, "one weight per group element is required");
  double total = 0.0;
  for (double w : weight) {
    require(std::isfinite(w) && w >= 0.0, ErrorKind::invalid_weight, "weights must be finite and nonnegative");
    total += w;
  }
  require(std::abs(total / static_cast<double>(weight.size()) - 1.0) <= 1e-10, ErrorKind::invalid_weight,
          "weights must have mean 1");
}

double analytic_defect_bound(const GroupActionModel& model, const std::vector<double>& weight) {
  validate_weight(model, weight);
  double acc = 0.0;
  for (std::size_t g = 0; g < model.group_size(); ++g) acc += weight[g] * model.length(g);
  return acc / static_cast<double>(model.group_size());
}

namespace {

ComplexMatrix weighted_average(const GroupActionModel& model, const std::vector<double>& weight, const ComplexMatrix& x) {
  ComplexMatrix out(x.rows(), x.cols());
  for (std::size_t g = 0; g < model.group_size(); ++g)
    if (weight[g] != 0.0) out.axpy(weight[g], model.act(g, x));
  out *= 1.0 / static_cast<double>(model.group_size());
  return out;
}

}  // namespace

ApproxPair averaging_approximation(const GroupActionModel& model, const std::vector<double>& weight) {
  const double bound = analytic_defect_bound(model, weight);
  const SystemPtr& x = model.system();
  ComplexMatrix phi(x->dim(), x->dim());
  for (std::size_t k = 0; k < x->dim(); ++k) {
    const std::vector<cplx> c = x->coordinates(weighted_average(model, weight, x->basis()[k]));
    for (std::size_t r = 0; r < c.size(); ++r) phi(r, k) = c[r];
  }
  ApproxPair pair = ApproxPair::make(LinearMap::identity(x), LinearMap{x, x, phi}, true, true, true);
  pair.epsilon = bound;
  pair.analytic_defect_bound = bound;
  pair.c_constant = 1.0;
  return pair;
}

std::vector<double> uniform_weight(const GroupActionModel& model) {
  return std::vector<double>(model.group_size(), 1.0);
}

std::vector<double> identity_weight(const GroupActionModel& model) {
  std::vector<double> w(model.group_size(), 0.0);
  w[0] = static_cast<double>(model.group_size());
  return w;
}

std::vector<double> fejer_weight(const GroupActionModel& model, std::size_t order) {
  const std::size_t q = model.q();
  require(2 * order + 1 <= q, ErrorKind::invalid_weight, "Dirichlet order must satisfy 2K + 1 <= q");
  std::vector<double> dk(q, 0.0);
  for (std::size_t m = 0; m < q; ++m) {
    double acc = 1.0;
    for (std::size_t j = 1; j <= order; ++j)
      acc += 2.0 * std::cos(kTwoPi * static_cast<double>((j * m) % q) / static_cast<double>(q));
    dk[m] = acc * acc / static_cast<double>(2 * order + 1);
  }
  std::vector<double> w(q * q);
  for (std::size_t m = 0; m < q; ++m)
    for (std::size_t n = 0; n < q; ++n) w[m * q + n] = dk[m] * dk[n];
  // Exact mean 1 up to rounding; rescale so validation sees it.
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  for (double& x : w) x = std::max(0.0, x / mean);
  return w;
}

std::vector<std::vector<double>> fejer_sequence(const GroupActionModel& model) {
  std::vector<std::vector<double>> seq;
  const std::vector<double> delta = identity_weight(model);
  bool reached = false;
  for (std::size_t k = 0; 2 * k + 1 <= model.q(); ++k) {
    seq.push_back(fejer_weight(model, k));
    double diff = 0.0;
    for (std::size_t g = 0; g < delta.size(); ++g) diff = std::max(diff, std::abs(seq.back()[g] - delta[g]));
    if (diff <= 1e-9) {
      seq.back() = delta;
      reached = true;
      break;
    }
  }
  if (!reached) seq.push_back(delta);
  return seq;
}

DefectBoundReport check_defect_bound(const GroupActionModel& model, const std::vector<double>& weight,
                                     std::size_t max_level, std::size_t trials, std::uint64_t seed) {
  const double bound = analytic_defect_bound(model, weight);
  const SeminormFamily family = ergodic_seminorm(model);
  DefectBoundReport report;
  for (std::size_t s = 1; s <= max_level; ++s) {
    std::vector<double> lhs(trials), rhs(trials);
    kernels::for_each(trials, [&](std::size_t t) {
      const AmplifiedElement a = random_element(*model.system(), s, derive_seed(derive_seed(seed, s), t));
      lhs[t] = operator_norm(a.realization - weighted_average(model, weight, a.realization));
      rhs[t] = bound * family.eval(a);
    });
    for (std::size_t t = 0; t < trials; ++t) {
      ++report.cases;
      if (lhs[t] > rhs[t] + kTolerances.compare) ++report.violations;
      if (rhs[t] > 0.0) report.max_ratio = std::max(report.max_ratio, lhs[t] / rhs[t]);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------------------------
// Rational noncommutative torus

TorusPolynomial TorusPolynomial::monomial(int k1, int k2, std::size_t level) {
  TorusPolynomial x;
  x.level = level;
  x.coeffs[{k1, k2}] = ComplexMatrix::identity(level);
  return x;
}

void TorusPolynomial::add(int k1, int k2, const ComplexMatrix& c) {
  require(c.rows() == level && c.cols() == level, ErrorKind::dimension_mismatch, "coefficient has the wrong size");
  auto it = coeffs.find({k1, k2});
  if (it == coeffs.end())
    coeffs.emplace(std::make_pair(k1, k2), c);
  else
    it->second += c;
}

int TorusPolynomial::degree() const {
  int d = 0;
  for (const auto& [k, c] : coeffs) d = std::max({d, std::abs(k.first), std::abs(k.second)});
  return d;
}

TorusPolynomial operator+(const TorusPolynomial& a, const TorusPolynomial& b) {
  require(a.level == b.level, ErrorKind::dimension_mismatch, "polynomials at different levels");
  TorusPolynomial out = a;
  for (const auto& [k, c] : b.coeffs) out.add(k.first, k.second, c);
  return out;
}

TorusModel::TorusModel(long p, long q) {
  if (q <= 0) fail(ErrorKind::irrational_theta, "theta needs a positive denominator");
  const long g = std::gcd(p, q);
  p_ = wrap(p / g, q / g);
  q_ = q / g;
  omega_ = root_of_unity(p_, q_);
  u_ = clock_matrix(static_cast<std::size_t>(q_), p_);
  v_ = shift_matrix(static_cast<std::size_t>(q_));
}

TorusModel TorusModel::from_theta(double theta, std::size_t max_denominator) {
  require(std::isfinite(theta), ErrorKind::irrational_theta, "theta is not finite");
  for (std::size_t q = 1; q <= max_denominator; ++q) {
    const double p = std::round(theta * static_cast<double>(q));
    if (std::abs(theta - p / static_cast<double>(q)) <= 1e-12)
      return TorusModel(static_cast<long>(p), static_cast<long>(q));
  }
  fail(ErrorKind::irrational_theta, "theta = " + std::to_string(theta) + " is not p/q with q <= " +
                                        std::to_string(max_denominator));
}

TorusPolynomial TorusModel::adjoint(const TorusPolynomial& x) const {
  TorusPolynomial out;
  out.level = x.level;
  for (const auto& [k, c] : x.coeffs)
    out.add(-k.first, -k.second, root_of_unity(p_ * k.first * k.second, q_) * c.adjoint());
  return out;
}

TorusPolynomial TorusModel::multiply(const TorusPolynomial& x, const TorusPolynomial& y) const {
  require(x.level == y.level, ErrorKind::dimension_mismatch, "polynomials at different levels");
  TorusPolynomial out;
  out.level = x.level;
  // U1^a U2^b U1^c U2^d = w^{b c} U1^{a+c} U2^{b+d}
  for (const auto& [k, c] : x.coeffs)
    for (const auto& [l, d] : y.coeffs)
      out.add(k.first + l.first, k.second + l.second, root_of_unity(p_ * k.second * l.first, q_) * (c * d));
  return out;
}

TorusPolynomial TorusModel::derivative(const TorusPolynomial& x, int j) const {
  require(j == 1 || j == 2, ErrorKind::dimension_mismatch, "derivative index must be 1 or 2");
  TorusPolynomial out;
  out.level = x.level;
  for (const auto& [k, c] : x.coeffs) {
    const int kj = j == 1 ? k.first : k.second;
    if (kj != 0) out.add(k.first, k.second, cplx(0.0, kj) * c);
  }
  return out;
}

TorusPolynomial TorusModel::act(const TorusPolynomial& x, double t1, double t2) const {
  TorusPolynomial out;
  out.level = x.level;
  for (const auto& [k, c] : x.coeffs) out.add(k.first, k.second, std::polar(1.0, k.first * t1 + k.second * t2) * c);
  return out;
}

ComplexMatrix TorusModel::symbol(const TorusPolynomial& x, double t1, double t2) const {
  const std::size_t q = static_cast<std::size_t>(q_);
  ComplexMatrix out(x.level * q, x.level * q);
  for (const auto& [k, c] : x.coeffs) {
    const ComplexMatrix w = std::polar(1.0, k.first * t1 + k.second * t2) *
                            clock_shift_word(q_, p_, k.first, k.second);
    out += kron(c, w);
  }
  return out;
}

ComplexMatrix TorusModel::dirac_symbol(const TorusPolynomial& x, double t1, double t2) const {
  static const std::vector<ComplexMatrix> gamma = clifford_generators(1);
  const std::size_t q = static_cast<std::size_t>(q_);
  ComplexMatrix out(2 * x.level * q, 2 * x.level * q);
  for (const auto& [k, c] : x.coeffs) {
    if (k.first == 0 && k.second == 0) continue;
    const ComplexMatrix w = std::polar(1.0, k.first * t1 + k.second * t2) *
                            clock_shift_word(q_, p_, k.first, k.second);
    ComplexMatrix g = cplx(0.0, k.first) * gamma[0];
    g.axpy(cplx(0.0, k.second), gamma[1]);
    out += kron(kron(c, w), g);
  }
  return out;
}

GridValue TorusModel::grid_norm(std::size_t grid, double lipschitz,
                                const std::function<ComplexMatrix(double, double)>& symbol) const {
  require(grid >= 1, ErrorKind::dimension_mismatch, "grid must have at least one point");
  // Conjugation by U and V moves z by q-th roots of unity, so [0, 2 pi / q)^2 suffices.
  const double q = static_cast<double>(q_);
  GridValue v;
  v.grid = grid;
  v.value = kernels::grid_max_norm(grid, [&](double t1, double t2) { return symbol(t1 / q, t2 / q); });
  v.error_bound = kTwoPi / (q * static_cast<double>(grid)) * std::numbers::sqrt2 * lipschitz;
  return v;
}

GridValue TorusModel::norm(const TorusPolynomial& x, std::size_t grid) const {
  double lip = 0.0;
  for (const auto& [k, c] : x.coeffs) lip += std::hypot(k.first, k.second) * operator_norm(c);
  return grid_norm(grid, lip, [&](double t1, double t2) { return symbol(x, t1, t2); });
}

GridValue TorusModel::dirac_seminorm(const TorusPolynomial& x, std::size_t grid) const {
  double lip = 0.0;
  for (const auto& [k, c] : x.coeffs) {
    const double r = std::hypot(k.first, k.second);
    lip += r * r * operator_norm(c);
  }
  return grid_norm(grid, lip, [&](double t1, double t2) { return dirac_symbol(x, t1, t2); });
}

double TorusModel::relation_defect() const {
  const TorusPolynomial u1 = TorusPolynomial::monomial(1, 0), u2 = TorusPolynomial::monomial(0, 1);
  double worst = 0.0;
  for (double t1 : {0.0, 0.7, 2.1})
    for (double t2 : {0.0, 1.3, -2.9}) {
      const ComplexMatrix a = symbol(u1, t1, t2), b = symbol(u2, t1, t2);
      worst = std::max(worst, max_abs_diff(b * a, omega_ * (a * b)));
    }
  return worst;
}

double torus_length(double t1, double t2) {
  auto reduce = [](double t) {
    double r = std::remainder(t, kTwoPi);
    return r <= -std::numbers::pi ? r + kTwoPi : r;
  };
  return std::hypot(reduce(t1), reduce(t2));
}

TorusPolynomial random_torus_polynomial(std::size_t level, int degree, std::uint64_t seed) {
  Rng rng(seed);
  TorusPolynomial x;
  x.level = level;
  for (int k1 = -degree; k1 <= degree; ++k1)
    for (int k2 = -degree; k2 <= degree; ++k2) {
      if (rng.uniform() < 0.5) continue;
      const double scale = 1.0 / (1.0 + k1 * k1 + k2 * k2);
      x.add(k1, k2, scale * gaussian_matrix(rng, level, level));
    }
  if (x.coeffs.empty()) x.add(degree, 0, ComplexMatrix::identity(level));
  return x;
}

ActionDiracReport check_action_vs_dirac(const TorusModel& model, std::size_t s, std::size_t trials,
                                        std::uint64_t seed, int degree, std::size_t grid, std::size_t lambdas) {
  struct Outcome {
    std::size_t violations = 0, component_violations = 0, cases = 0;
    double max_ratio = 0.0;
  };
  std::vector<Outcome> outcomes(trials);
  kernels::for_each(trials, [&](std::size_t t) {
    const std::uint64_t tseed = derive_seed(seed, t);
    const TorusPolynomial x = random_torus_polynomial(s, degree, tseed);
    const GridValue l = model.dirac_seminorm(x, grid);
    const double l_upper = l.value + l.error_bound;
    Outcome& o = outcomes[t];
    for (int j = 1; j <= 2; ++j)
      if (model.norm(model.derivative(x, j), grid).value > l_upper + kTolerances.compare) ++o.component_violations;
    Rng rng(derive_seed(tseed, 0xa11));
    for (std::size_t i = 0; i < lambdas; ++i) {
      const double t1 = rng.uniform(-std::numbers::pi, std::numbers::pi);
      const double t2 = rng.uniform(-std::numbers::pi, std::numbers::pi);
      TorusPolynomial diff = model.act(x, t1, t2);
      for (const auto& [k, c] : x.coeffs) diff.add(k.first, k.second, -1.0 * c);
      const double lhs = model.norm(diff, grid).value;
      const double len = torus_length(t1, t2);
      ++o.cases;
      if (lhs > std::numbers::sqrt2 * len * l_upper + kTolerances.compare) ++o.violations;
      if (l.value > 0.0 && len > 0.0) o.max_ratio = std::max(o.max_ratio, lhs / (std::numbers::sqrt2 * len * l.value));
    }
  });
  ActionDiracReport report;
  for (const Outcome& o : outcomes) {
    report.cases += o.cases;
    report.violations += o.violations;
    report.component_violations += o.component_violations;
    report.max_ratio = std::max(report.max_ratio, o.max_ratio);
  }
  return report;
}

}  // namespace qms
