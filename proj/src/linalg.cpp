#include "qms/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "qms/config.hpp"
#include "qms/errors.hpp"

namespace qms {
namespace {

constexpr int kMaxSweeps = 80;

struct Rotation {
  double c = 1.0;
  double s = 0.0;
  double t = 0.0;
  cplx jqp;  // J = [[c, s], [jqp, jqq]]
  cplx jqq;
};

// Unitary J on the (p, q) plane with J^* [[a, g], [conj g, b]] J diagonal.
Rotation make_rotation(double a, double b, cplx g) {
  const double mag = std::abs(g);
  const cplx u = g / mag;
  const double theta = (b - a) / (2.0 * mag);
  Rotation r;
  if (std::abs(theta) > 1e150) {
    r.t = 0.5 / theta;
  } else {
    r.t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  r.c = 1.0 / std::sqrt(r.t * r.t + 1.0);
  r.s = r.t * r.c;
  r.jqp = -r.s * std::conj(u);
  r.jqq = r.c * std::conj(u);
  return r;
}

void check_hermitian(const ComplexMatrix& m) {
  require(m.is_square(), ErrorKind::dimension_mismatch, "eigenproblem needs a square matrix");
  require(hermitian_defect(m) <= kTolerances.hermitian * (1.0 + m.frobenius_norm()),
          ErrorKind::not_hermitian, "matrix is not Hermitian");
}

ComplexMatrix symmetrized(const ComplexMatrix& m) {
  ComplexMatrix a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    a(i, i) = m(i, i).real();
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      a(i, j) = v;
      a(j, i) = std::conj(v);
    }
  }
  return a;
}

template <bool WithVectors>
void jacobi_diagonalize(ComplexMatrix& a, ComplexMatrix* v) {
  const std::size_t n = a.rows();
  const double scale = a.frobenius_norm();
  if (scale == 0.0) return;
  const double target = 0.5 * DBL_EPSILON * scale;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (sweep > 3 && std::abs(app) + 1e3 * mag == std::abs(app) &&
            std::abs(aqq) + 1e3 * mag == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Rotation r = make_rotation(app, aqq, apq);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = r.c * akp + r.jqp * akq;
          a(k, q) = r.s * akp + r.jqq * akq;
        }
        const cplx cjqp = std::conj(r.jqp), cjqq = std::conj(r.jqq);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = r.c * apk + cjqp * aqk;
          a(q, k) = r.s * apk + cjqq * aqk;
        }
        a(p, p) = app - r.t * mag;
        a(q, q) = aqq + r.t * mag;
        a(p, q) = a(q, p) = 0.0;
        if constexpr (WithVectors) {
          ComplexMatrix& vm = *v;
          for (std::size_t k = 0; k < n; ++k) {
            const cplx vkp = vm(k, p), vkq = vm(k, q);
            vm(k, p) = r.c * vkp + r.jqp * vkq;
            vm(k, q) = r.s * vkp + r.jqq * vkq;
          }
        }
      }
    }
  }
}

double column_norm2(const std::vector<cplx>& c) {
  double s = 0.0;
  for (const auto& x : c) s += std::norm(x);
  return s;
}

}  // namespace

HermitianEigenResult hermitian_eigen(const ComplexMatrix& m) {
  check_hermitian(m);
  const std::size_t n = m.rows();
  ComplexMatrix a = symmetrized(m);
  ComplexMatrix v = ComplexMatrix::identity(n);
  jacobi_diagonalize<true>(a, &v);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  HermitianEigenResult out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  check_hermitian(m);
  ComplexMatrix a = symmetrized(m);
  jacobi_diagonalize<false>(a, nullptr);
  std::vector<double> ev(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

double operator_norm(const ComplexMatrix& m) {
  if (m.empty()) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.frobenius_norm();
  if (m.max_abs() == 0.0) return 0.0;
  const ComplexMatrix g = m.rows() >= m.cols() ? adjoint_times(m, m) : times_adjoint(m, m);
  ComplexMatrix a = symmetrized(g);
  jacobi_diagonalize<false>(a, nullptr);
  double top = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) top = std::max(top, a(i, i).real());
  return std::sqrt(top);
}

SingularPair top_singular_pair(const ComplexMatrix& m) {
  SingularPair out;
  out.u.assign(m.rows(), 0.0);
  out.v.assign(m.cols(), 0.0);
  if (m.empty()) return out;
  const bool tall = m.rows() >= m.cols();
  const ComplexMatrix g = tall ? adjoint_times(m, m) : times_adjoint(m, m);
  const HermitianEigenResult eig = hermitian_eigen(symmetrized(g));
  const std::size_t top = eig.eigenvalues.size() - 1;
  out.sigma = std::sqrt(std::max(0.0, eig.eigenvalues[top]));
  std::vector<cplx> x(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) x[i] = eig.eigenvectors(i, top);
  if (out.sigma == 0.0) {
    out.u[0] = 1.0;
    out.v[0] = 1.0;
    return out;
  }
  if (tall) {
    out.v = x;
    out.u = m * std::span<const cplx>(x);
    for (auto& e : out.u) e /= out.sigma;
  } else {
    out.u = x;
    const ComplexMatrix mh = m.adjoint();
    out.v = mh * std::span<const cplx>(x);
    for (auto& e : out.v) e /= out.sigma;
  }
  return out;
}

QrResult householder_qr(const ComplexMatrix& a0) {
  const std::size_t m = a0.rows(), n = a0.cols();
  const std::size_t k = std::min(m, n);
  ComplexMatrix a = a0;
  std::vector<std::vector<cplx>> reflectors(k);
  std::vector<cplx> alphas(k);
  for (std::size_t j = 0; j < k; ++j) {
    double xn2 = 0.0;
    for (std::size_t i = j; i < m; ++i) xn2 += std::norm(a(i, j));
    const double xn = std::sqrt(xn2);
    if (xn == 0.0) {
      alphas[j] = 0.0;
      continue;
    }
    const cplx x0 = a(j, j);
    const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
    const cplx alpha = -phase * xn;
    std::vector<cplx> v(m - j);
    for (std::size_t i = j; i < m; ++i) v[i - j] = a(i, j);
    v[0] -= alpha;
    const double vn = std::sqrt(column_norm2(v));
    if (vn == 0.0) {
      alphas[j] = a(j, j);
      continue;
    }
    for (auto& e : v) e /= vn;
    for (std::size_t c = j; c < n; ++c) {
      cplx dot = 0.0;
      for (std::size_t i = j; i < m; ++i) dot += std::conj(v[i - j]) * a(i, c);
      for (std::size_t i = j; i < m; ++i) a(i, c) -= 2.0 * v[i - j] * dot;
    }
    alphas[j] = a(j, j);
    reflectors[j] = std::move(v);
  }
  QrResult out;
  out.r = ComplexMatrix(k, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = i; c < n; ++c) out.r(i, c) = a(i, c);
  out.q = ComplexMatrix(m, k);
  for (std::size_t i = 0; i < k; ++i) out.q(i, i) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    const auto& v = reflectors[jj];
    if (v.empty()) continue;
    for (std::size_t c = 0; c < k; ++c) {
      cplx dot = 0.0;
      for (std::size_t i = jj; i < m; ++i) dot += std::conj(v[i - jj]) * out.q(i, c);
      for (std::size_t i = jj; i < m; ++i) out.q(i, c) -= 2.0 * v[i - jj] * dot;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    const cplx d = out.r(i, i);
    if (std::abs(d) == 0.0) continue;
    const cplx ph = d / std::abs(d);
    for (std::size_t c = i; c < n; ++c) out.r(i, c) *= std::conj(ph);
    for (std::size_t r = 0; r < m; ++r) out.q(r, i) *= ph;
    out.r(i, i) = std::abs(d);
  }
  return out;
}

SvdResult jacobi_svd(const ComplexMatrix& a0) {
  const ComplexMatrix a = a0.rows() > a0.cols() ? householder_qr(a0).r : a0;
  const std::size_t m = a.rows(), n = a.cols();
  std::vector<std::vector<cplx>> cols(n, std::vector<cplx>(m));
  std::vector<std::vector<cplx>> vcols(n, std::vector<cplx>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) cols[j][i] = a(i, j);
    vcols[j][j] = 1.0;
  }
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = column_norm2(cols[p]);
        const double beta = column_norm2(cols[q]);
        if (alpha == 0.0 || beta == 0.0) continue;
        cplx gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) gamma += std::conj(cols[p][i]) * cols[q][i];
        if (std::abs(gamma) <= 4.0 * DBL_EPSILON * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Rotation r = make_rotation(alpha, beta, gamma);
        for (std::size_t i = 0; i < m; ++i) {
          const cplx x = cols[p][i], y = cols[q][i];
          cols[p][i] = r.c * x + r.jqp * y;
          cols[q][i] = r.s * x + r.jqq * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const cplx x = vcols[p][i], y = vcols[q][i];
          vcols[p][i] = r.c * x + r.jqp * y;
          vcols[q][i] = r.s * x + r.jqq * y;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = std::sqrt(column_norm2(cols[j]));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return sv[i] > sv[j]; });
  SvdResult out;
  out.singular_values.resize(n);
  out.right_vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.singular_values[k] = sv[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.right_vectors(i, k) = vcols[order[k]][i];
  }
  return out;
}

ComplexMatrix null_space(const ComplexMatrix& a, double relative_cutoff) {
  const SvdResult svd = jacobi_svd(a);
  const std::size_t n = a.cols();
  const double smax = svd.singular_values.empty() ? 0.0 : svd.singular_values[0];
  const double thr = relative_cutoff * smax;
  std::size_t first = 0;
  while (first < n && svd.singular_values[first] > thr) ++first;
  return svd.right_vectors.block(0, first, n, n - first);
}

std::size_t numerical_rank(const ComplexMatrix& a, double relative_cutoff) {
  return a.cols() - null_space(a, relative_cutoff).cols();
}

std::vector<ComplexMatrix> gram_schmidt(const std::vector<ComplexMatrix>& vectors, double tol) {
  std::vector<ComplexMatrix> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    const double vn = v.frobenius_norm();
    require(vn > 0.0, ErrorKind::invalid_operator_system, "zero basis element");
    ComplexMatrix w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : out) w.axpy(-inner(q, w), q);
    const double wn = w.frobenius_norm();
    require(wn > tol * vn, ErrorKind::invalid_operator_system, "basis is linearly dependent");
    w *= 1.0 / wn;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace qms
