#include "qms/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qms/errors.hpp"
#include "qms/kernels.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"

namespace qms {
namespace {

ComplexMatrix shifted(const ComplexMatrix& z, const ComplexMatrix& v, std::size_t d) {
  ComplexMatrix y = z;
  const std::size_t s = v.rows();
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      const cplx c = v(a, b);
      if (c == cplx(0.0)) continue;
      for (std::size_t k = 0; k < d; ++k) y(a * d + k, b * d + k) -= c;
    }
  return y;
}

// mu * log sum exp(sigma_i / mu), shifted for stability.
double log_sum_exp(const std::vector<double>& sigma, double mu) {
  const double top = *std::max_element(sigma.begin(), sigma.end());
  double acc = 0.0;
  for (double x : sigma) acc += std::exp((x - top) / mu);
  return top + mu * std::log(acc);
}

struct SmoothEval {
  double smooth = 0.0;
  double sharp = 0.0;
  ComplexMatrix grad;  // gradient with respect to v
};

SmoothEval smooth_eval(const ComplexMatrix& z, const ComplexMatrix& v, std::size_t d, double mu) {
  const std::size_t s = v.rows();
  const ComplexMatrix y = shifted(z, v, d);
  const HermitianEigenResult eig = hermitian_eigen(adjoint_times(y, y));
  const std::size_t n = eig.eigenvalues.size();
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(std::max(0.0, eig.eigenvalues[i]));
  SmoothEval out;
  out.sharp = sigma.back();
  out.smooth = log_sum_exp(sigma, mu);
  // G = sum_i p_i u_i w_i^* = Y W diag(p / sigma) W^*.
  std::vector<double> weight(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = std::exp((sigma[i] - out.sharp) / mu);
    total += weight[i];
  }
  ComplexMatrix scaled(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = weight[i] / total;
    const double f = sigma[i] > 1e-300 ? p / sigma[i] : 0.0;
    for (std::size_t r = 0; r < n; ++r) scaled(r, i) = eig.eigenvectors(r, i) * f;
  }
  const ComplexMatrix g = y * times_adjoint(scaled, eig.eigenvectors);
  out.grad = -1.0 * partial_trace_inner(g, s, d);
  return out;
}

std::vector<double> to_real(const ComplexMatrix& m) {
  std::vector<double> out;
  out.reserve(2 * m.size());
  for (const auto& e : m.entries()) {
    out.push_back(e.real());
    out.push_back(e.imag());
  }
  return out;
}

ComplexMatrix from_real(const std::vector<double>& p, std::size_t s) {
  ComplexMatrix m(s, s);
  for (std::size_t k = 0; k < m.size(); ++k) m.entries()[k] = cplx(p[2 * k], p[2 * k + 1]);
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// BFGS on the log-sum-exp smoothing of the singular values, with the smoothing parameter
// decreased geometrically. The best unsmoothed value seen is returned.
QuotientResult descend_from(const ComplexMatrix& z, std::size_t s, ComplexMatrix v, int max_iterations) {
  const std::size_t d = z.rows() / s;
  const std::size_t n = 2 * s * s;
  QuotientResult best;
  best.shift = v;
  best.value = operator_norm(shifted(z, v, d));
  const double f0 = best.value;
  if (f0 == 0.0) return best;
  const double mu_floor = 1e-10 * f0;
  double mu = 0.05 * f0;
  std::vector<double> p = to_real(v);
  int used = 0;
  bool converged = false;
  while (used < max_iterations) {
    SmoothEval cur = smooth_eval(z, from_real(p, s), d, mu);
    std::vector<double> g = to_real(cur.grad);
    std::vector<double> h(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) h[i * n + i] = mu;
    converged = false;
    while (used < max_iterations) {
      ++used;
      const double gn = std::sqrt(dot(g, g));
      if (gn <= 1e-13) {
        converged = true;
        break;
      }
      std::vector<double> dir(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dir[i] -= h[i * n + j] * g[j];
      double slope = dot(dir, g);
      if (slope >= 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          std::fill(h.begin() + static_cast<std::ptrdiff_t>(i * n), h.begin() + static_cast<std::ptrdiff_t>((i + 1) * n), 0.0);
          h[i * n + i] = mu;
          dir[i] = -mu * g[i];
        }
        slope = dot(dir, g);
      }
      double step = 1.0;
      bool accepted = false;
      std::vector<double> cand(n);
      SmoothEval next;
      for (int bt = 0; bt < 50; ++bt) {
        for (std::size_t i = 0; i < n; ++i) cand[i] = p[i] + step * dir[i];
        next = smooth_eval(z, from_real(cand, s), d, mu);
        if (next.smooth <= cur.smooth + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        converged = true;
        break;
      }
      const double gain = cur.smooth - next.smooth;
      std::vector<double> g_next = to_real(next.grad);
      std::vector<double> sv(n), yv(n);
      for (std::size_t i = 0; i < n; ++i) {
        sv[i] = cand[i] - p[i];
        yv[i] = g_next[i] - g[i];
      }
      const double sy = dot(sv, yv);
      if (sy > 1e-300) {
        std::vector<double> hy(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) hy[i] += h[i * n + j] * yv[j];
        const double yhy = dot(yv, hy);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            h[i * n + j] += ((sy + yhy) * sv[i] * sv[j]) / (sy * sy) - (hy[i] * sv[j] + sv[i] * hy[j]) / sy;
      }
      p = cand;
      g = std::move(g_next);
      cur = std::move(next);
      if (cur.sharp < best.value) {
        best.value = cur.sharp;
        best.shift = from_real(p, s);
      }
      if (gain <= 1e-15 * f0) {
        converged = true;
        break;
      }
    }
    if (mu <= mu_floor) break;
    mu = std::max(mu * 0.1, mu_floor);
  }
  best.iterations = used;
  best.converged = converged;
  return best;
}

}  // namespace

QuotientResult minimize_scalar_distance(const ComplexMatrix& z, std::size_t s, const QuotientOptions& options) {
  require(s >= 1 && z.is_square() && z.rows() % s == 0, ErrorKind::dimension_mismatch,
          "quotient norm: element size must be a multiple of the level");
  const std::size_t d = z.rows() / s;
  ComplexMatrix start = partial_trace_inner(z, s, d);
  start *= 1.0 / static_cast<double>(d);
  const int restarts = std::max(1, options.restarts);
  const double scale = std::max(z.frobenius_norm() / std::sqrt(static_cast<double>(z.rows())), 1e-300);
  std::vector<QuotientResult> results(static_cast<std::size_t>(restarts));
  kernels::for_each(results.size(), [&](std::size_t r) {
    ComplexMatrix v0 = start;
    if (r > 0) {
      Rng rng(derive_seed(options.seed, r));
      v0.axpy(0.5 * scale, gaussian_matrix(rng, s, s));
    }
    results[r] = descend_from(z, s, std::move(v0), options.iterations);
  });
  QuotientResult best = results[0];
  int total = results[0].iterations;
  for (std::size_t r = 1; r < results.size(); ++r) {
    total += results[r].iterations;
    if (results[r].value < best.value) best = results[r];
  }
  best.iterations = total;
  return best;
}

double norm_with_gradient(std::span<const ComplexMatrix> images, std::span<const double> y,
                          std::vector<double>* grad) {
  require(images.size() == y.size() && !images.empty(), ErrorKind::dimension_mismatch,
          "norm functional: coordinate count mismatch");
  ComplexMatrix x(images[0].rows(), images[0].cols());
  for (std::size_t j = 0; j < y.size(); ++j)
    if (y[j] != 0.0) x.axpy(y[j], images[j]);
  if (!grad) return operator_norm(x);
  const SingularPair pair = top_singular_pair(x);
  grad->assign(y.size(), 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    const std::vector<cplx> mv = images[j] * std::span<const cplx>(pair.v);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < mv.size(); ++i) acc += std::conj(pair.u[i]) * mv[i];
    (*grad)[j] = acc.real();
  }
  return pair.sigma;
}

Objective max_norm_objective(std::vector<NormTerm> terms) {
  return [terms = std::move(terms)](std::span<const double> y, std::vector<double>* grad) {
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double v = terms[k].weight * norm_with_gradient(terms[k].images, y, nullptr);
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    if (grad) {
      norm_with_gradient(terms[arg].images, y, grad);
      for (auto& g : *grad) g *= terms[arg].weight;
    }
    return best;
  };
}

namespace {

struct RatioPoint {
  double ratio = 0.0;
  std::vector<double> grad;
};

RatioPoint eval_ratio(const Objective& num, const Objective& den, std::span<const double> y, bool want_grad) {
  RatioPoint p;
  std::vector<double> gn, gd;
  const double n = num(y, want_grad ? &gn : nullptr);
  const double d = den(y, want_grad ? &gd : nullptr);
  const double dd = std::max(d, 1e-300);
  p.ratio = n / dd;
  if (want_grad) {
    p.grad.resize(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) p.grad[j] = (gn[j] * dd - n * gd[j]) / (dd * dd);
  }
  return p;
}

void normalize(std::vector<double>& y) {
  double n2 = 0.0;
  for (double v : y) n2 += v * v;
  const double n = std::sqrt(n2);
  if (n > 0.0)
    for (auto& v : y) v /= n;
}

std::vector<double> great_circle(const std::vector<double>& y, const std::vector<double>& dir, double angle) {
  std::vector<double> out(y.size());
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = c * y[j] + s * dir[j];
  normalize(out);
  return out;
}

// Unit tangent vector at y along g, or empty if g is (numerically) normal to the sphere.
std::vector<double> tangent_direction(const std::vector<double>& y, const std::vector<double>& g) {
  double dot = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) dot += g[j] * y[j];
  std::vector<double> t(y.size());
  double n2 = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    t[j] = g[j] - dot * y[j];
    n2 += t[j] * t[j];
  }
  if (n2 <= 1e-28) return {};
  const double n = std::sqrt(n2);
  for (auto& v : t) v /= n;
  return t;
}

RatioResult ascend(std::size_t k, const Objective& num, const Objective& den, const RatioOptions& opt,
                   std::vector<double> y, Rng& rng) {
  normalize(y);
  RatioResult res;
  RatioPoint cur = eval_ratio(num, den, y, true);
  double scale = 1.0;
  res.converged = false;
  for (int t = 1; t <= opt.iterations; ++t) {
    res.iterations = t;
    const double base = opt.initial_step * scale / std::sqrt(static_cast<double>(t));
    if (base < 1e-10) {
      res.converged = true;
      break;
    }
    bool improved = false;
    const std::vector<double> dir = tangent_direction(y, cur.grad);
    if (!dir.empty()) {
      double eta = base;
      for (int bt = 0; bt < 6 && !improved; ++bt, eta *= 0.5) {
        std::vector<double> cand = great_circle(y, dir, eta);
        const RatioPoint p = eval_ratio(num, den, cand, false);
        if (p.ratio > cur.ratio) {
          y = std::move(cand);
          improved = true;
        }
      }
    }
    for (int pr = 0; pr < opt.probes && !improved; ++pr) {
      std::vector<double> r = random_unit_vector(rng, k);
      std::vector<double> pd = tangent_direction(y, r);
      if (pd.empty()) continue;
      std::vector<double> cand = great_circle(y, pd, base);
      const RatioPoint p = eval_ratio(num, den, cand, false);
      if (p.ratio > cur.ratio) {
        y = std::move(cand);
        improved = true;
      }
    }
    if (improved) {
      cur = eval_ratio(num, den, y, true);
    } else {
      scale *= 0.25;
    }
    res.history.push_back(cur.ratio);
  }
  res.value = cur.ratio;
  res.argmax = std::move(y);
  return res;
}

}  // namespace

RatioResult maximize_ratio(std::size_t k, const Objective& num, const Objective& den, const RatioOptions& options) {
  require(k >= 1, ErrorKind::dimension_mismatch, "ratio maximization needs at least one coordinate");
  const int restarts = std::max<int>(options.restarts, static_cast<int>(options.warm_starts.size()));
  std::vector<RatioResult> results(static_cast<std::size_t>(std::max(1, restarts)));
  kernels::for_each(results.size(), [&](std::size_t r) {
    Rng rng(derive_seed(options.seed, r));
    std::vector<double> y0;
    if (r < options.warm_starts.size()) {
      y0 = options.warm_starts[r];
      require(y0.size() == k, ErrorKind::dimension_mismatch, "warm start has the wrong length");
      double n2 = 0.0;
      for (double v : y0) n2 += v * v;
      if (n2 == 0.0) y0 = random_unit_vector(rng, k);
    } else {
      y0 = random_unit_vector(rng, k);
    }
    results[r] = ascend(k, num, den, options, std::move(y0), rng);
  });
  std::size_t arg = 0;
  int total = 0;
  bool all_converged = true;
  for (std::size_t r = 0; r < results.size(); ++r) {
    total += results[r].iterations;
    all_converged = all_converged && results[r].converged;
    if (results[r].value > results[arg].value) arg = r;
  }
  RatioResult out = std::move(results[arg]);
  out.iterations = total;
  out.restarts = static_cast<int>(results.size());
  out.converged = all_converged;
  return out;
}

}  // namespace qms
