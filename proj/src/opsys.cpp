#include "qms/opsys.hpp"

#include <algorithm>
#include <cmath>

#include "qms/config.hpp"
#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/random.hpp"

namespace qms {
namespace {

std::size_t check_square_family(const std::vector<ComplexMatrix>& basis) {
  require(!basis.empty(), ErrorKind::invalid_operator_system, "empty basis");
  const std::size_t d = basis.front().rows();
  for (const auto& b : basis)
    require(b.is_square() && b.rows() == d && d >= 1, ErrorKind::dimension_mismatch,
            "basis elements must be square matrices of one size");
  return d;
}

std::span<const cplx> segment(const std::vector<cplx>& v, std::size_t index, std::size_t m) {
  return std::span<const cplx>(v).subspan(index * m, m);
}

}  // namespace

OperatorSystem::OperatorSystem(std::vector<ComplexMatrix> basis) {
  ambient_dim_ = check_square_family(basis);
  basis_ = gram_schmidt(basis, kTolerances.span_residual);
  original_ = std::move(basis);
  finish();
}

OperatorSystem::OperatorSystem(Trusted, std::vector<ComplexMatrix> onb, std::vector<ComplexMatrix> original) {
  ambient_dim_ = check_square_family(onb);
  basis_ = std::move(onb);
  original_ = std::move(original);
  finish();
}

OperatorSystem OperatorSystem::from_orthonormal(std::vector<ComplexMatrix> onb) {
  std::vector<ComplexMatrix> copy = onb;
  return OperatorSystem(Trusted{}, std::move(onb), std::move(copy));
}

OperatorSystem OperatorSystem::full_matrix_algebra(std::size_t d) {
  std::vector<ComplexMatrix> b;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) b.push_back(ComplexMatrix::unit(d, i, j));
  return from_orthonormal(std::move(b));
}

OperatorSystem OperatorSystem::diagonal_algebra(std::size_t d) {
  std::vector<ComplexMatrix> b;
  for (std::size_t i = 0; i < d; ++i) b.push_back(ComplexMatrix::unit(d, i, i));
  return from_orthonormal(std::move(b));
}

void OperatorSystem::finish() {
  const std::size_t m = basis_.size();
  const double tol = kTolerances.span_residual * std::sqrt(static_cast<double>(ambient_dim_));
  const ComplexMatrix id = ComplexMatrix::identity(ambient_dim_);
  require(span_residual(id) <= tol, ErrorKind::invalid_operator_system, "identity is not in the span");
  unit_coords_ = coordinates(id);
  star_ = ComplexMatrix(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    const ComplexMatrix bk = basis_[k].adjoint();
    require(span_residual(bk) <= tol, ErrorKind::invalid_operator_system, "span is not closed under adjoints");
    for (std::size_t j = 0; j < m; ++j) star_(j, k) = inner(basis_[j], bk);
  }
  // Hermitian part: real Gram-Schmidt over the real and imaginary parts of the basis.
  const cplx i(0.0, 1.0);
  hermitian_basis_.clear();
  for (std::size_t k = 0; k < m && hermitian_basis_.size() < m; ++k) {
    const ComplexMatrix bk = basis_[k].adjoint();
    ComplexMatrix re = 0.5 * (basis_[k] + bk);
    ComplexMatrix im = (-0.5 * i) * (basis_[k] - bk);
    for (ComplexMatrix* cand : {&re, &im}) {
      const double n0 = cand->frobenius_norm();
      if (n0 == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& h : hermitian_basis_) cand->axpy(-inner(h, *cand).real(), h);
      const double n1 = cand->frobenius_norm();
      if (n1 <= 1e-8 * n0) continue;
      *cand *= 1.0 / n1;
      hermitian_basis_.push_back(*cand);
      if (hermitian_basis_.size() == m) break;
    }
  }
  require(hermitian_basis_.size() == m, ErrorKind::invalid_operator_system,
          "Hermitian part has the wrong real dimension");
}

std::vector<cplx> OperatorSystem::coordinates(const ComplexMatrix& x) const {
  require(x.rows() == ambient_dim_ && x.cols() == ambient_dim_, ErrorKind::dimension_mismatch,
          "element has the wrong ambient size");
  std::vector<cplx> c(basis_.size());
  for (std::size_t k = 0; k < basis_.size(); ++k) c[k] = inner(basis_[k], x);
  return c;
}

double OperatorSystem::span_residual(const ComplexMatrix& x) const {
  return (x - realize(coordinates(x))).frobenius_norm();
}

ComplexMatrix OperatorSystem::realize(std::span<const cplx> coords) const {
  require(coords.size() == basis_.size(), ErrorKind::dimension_mismatch, "coordinate count mismatch");
  ComplexMatrix out(ambient_dim_, ambient_dim_);
  for (std::size_t k = 0; k < coords.size(); ++k)
    if (coords[k] != cplx(0.0)) out.axpy(coords[k], basis_[k]);
  return out;
}

std::vector<cplx> OperatorSystem::adjoint_coords(std::span<const cplx> coords) const {
  require(coords.size() == basis_.size(), ErrorKind::dimension_mismatch, "coordinate count mismatch");
  const std::size_t m = basis_.size();
  std::vector<cplx> out(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const cplx c = std::conj(coords[k]);
    if (c == cplx(0.0)) continue;
    for (std::size_t j = 0; j < m; ++j) out[j] += c * star_(j, k);
  }
  return out;
}

double OperatorSystem::product_closure_residual() const {
  double worst = 0.0;
  for (const auto& a : basis_)
    for (const auto& b : basis_) worst = std::max(worst, span_residual(a * b));
  return worst;
}

OperatorSystem tensor(const OperatorSystem& x, const OperatorSystem& y) {
  std::vector<ComplexMatrix> b;
  b.reserve(x.dim() * y.dim());
  for (const auto& bx : x.basis())
    for (const auto& by : y.basis()) b.push_back(kron(bx, by));
  return OperatorSystem::from_orthonormal(std::move(b));
}

OperatorSystem matrix_amplification(const OperatorSystem& x, std::size_t n) {
  require(n >= 1, ErrorKind::dimension_mismatch, "amplification level must be positive");
  std::vector<ComplexMatrix> b;
  b.reserve(n * n * x.dim());
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      const ComplexMatrix e = ComplexMatrix::unit(n, k, l);
      for (const auto& bx : x.basis()) b.push_back(kron(e, bx));
    }
  return OperatorSystem::from_orthonormal(std::move(b));
}

AmplifiedElement amplify(const OperatorSystem& x, std::size_t s, std::vector<cplx> coeffs) {
  const std::size_t m = x.dim(), d = x.ambient_dim();
  require(s >= 1 && coeffs.size() == s * s * m, ErrorKind::dimension_mismatch,
          "amplified coefficients must have s*s*dim entries");
  AmplifiedElement z;
  z.level = s;
  z.realization = ComplexMatrix(s * d, s * d);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      const auto c = segment(coeffs, i * s + j, m);
      bool nonzero = false;
      for (const auto& v : c) nonzero = nonzero || v != cplx(0.0);
      if (nonzero) z.realization.set_block(i * d, j * d, x.realize(c));
    }
  z.coeffs = std::move(coeffs);
  return z;
}

AmplifiedElement amplify_realization(const OperatorSystem& x, std::size_t s, const ComplexMatrix& zr) {
  const std::size_t d = x.ambient_dim(), m = x.dim();
  require(zr.rows() == s * d && zr.cols() == s * d, ErrorKind::dimension_mismatch, "realization has the wrong size");
  std::vector<cplx> coeffs(s * s * m);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      const ComplexMatrix blk = zr.block(i * d, j * d, d, d);
      const auto c = x.coordinates(blk);
      const double res = (blk - x.realize(c)).frobenius_norm();
      require(res <= kTolerances.span_residual * (1.0 + blk.frobenius_norm()) * std::sqrt(static_cast<double>(d)),
              ErrorKind::dimension_mismatch, "block is not in the operator system");
      std::copy(c.begin(), c.end(), coeffs.begin() + static_cast<std::ptrdiff_t>((i * s + j) * m));
    }
  return amplify(x, s, std::move(coeffs));
}

AmplifiedElement scalar_matrix(const OperatorSystem& x, const ComplexMatrix& v) {
  require(v.is_square(), ErrorKind::dimension_mismatch, "scalar matrix must be square");
  const std::size_t s = v.rows(), m = x.dim();
  std::vector<cplx> coeffs(s * s * m);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t k = 0; k < m; ++k) coeffs[(i * s + j) * m + k] = v(i, j) * x.unit_coords()[k];
  return amplify(x, s, std::move(coeffs));
}

AmplifiedElement adjoint(const OperatorSystem& x, const AmplifiedElement& z) {
  const std::size_t s = z.level, m = x.dim();
  std::vector<cplx> coeffs(s * s * m);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      const auto c = x.adjoint_coords(segment(z.coeffs, j * s + i, m));
      std::copy(c.begin(), c.end(), coeffs.begin() + static_cast<std::ptrdiff_t>((i * s + j) * m));
    }
  return amplify(x, s, std::move(coeffs));
}

AmplifiedElement direct_sum(const OperatorSystem& x, const AmplifiedElement& a, const AmplifiedElement& b) {
  const std::size_t s = a.level, r = b.level, t = s + r, m = x.dim();
  std::vector<cplx> coeffs(t * t * m, 0.0);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      std::copy_n(a.coeffs.begin() + static_cast<std::ptrdiff_t>((i * s + j) * m), m,
                  coeffs.begin() + static_cast<std::ptrdiff_t>((i * t + j) * m));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      std::copy_n(b.coeffs.begin() + static_cast<std::ptrdiff_t>((i * r + j) * m), m,
                  coeffs.begin() + static_cast<std::ptrdiff_t>(((s + i) * t + (s + j)) * m));
  return amplify(x, t, std::move(coeffs));
}

AmplifiedElement scalar_sandwich(const OperatorSystem& x, const ComplexMatrix& v, const AmplifiedElement& z,
                                 const ComplexMatrix& w) {
  const std::size_t s = z.level, m = x.dim();
  require(v.rows() == s && v.cols() == s && w.rows() == s && w.cols() == s, ErrorKind::dimension_mismatch,
          "scalar matrices must match the level");
  std::vector<cplx> coeffs(s * s * m, 0.0);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b) {
          const cplx f = v(i, a) * w(b, j);
          if (f == cplx(0.0)) continue;
          for (std::size_t k = 0; k < m; ++k) coeffs[(i * s + j) * m + k] += f * z.coeffs[(a * s + b) * m + k];
        }
  return amplify(x, s, std::move(coeffs));
}

AmplifiedElement entry(const OperatorSystem& x, const AmplifiedElement& z, std::size_t i, std::size_t j) {
  const std::size_t m = x.dim();
  require(i < z.level && j < z.level, ErrorKind::dimension_mismatch, "entry index out of range");
  const auto c = segment(z.coeffs, i * z.level + j, m);
  return amplify(x, 1, std::vector<cplx>(c.begin(), c.end()));
}

AmplifiedElement combine(const OperatorSystem& x, cplx a, const AmplifiedElement& z, cplx b,
                         const AmplifiedElement& w) {
  require(z.level == w.level, ErrorKind::dimension_mismatch, "levels differ");
  std::vector<cplx> coeffs(z.coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = a * z.coeffs[k] + b * w.coeffs[k];
  return amplify(x, z.level, std::move(coeffs));
}

AmplifiedElement random_element(const OperatorSystem& x, std::size_t s, std::uint64_t seed) {
  Rng rng(seed);
  return amplify(x, s, gaussian_vector(rng, s * s * x.dim()));
}

namespace {

std::size_t nested_index(std::size_t i, std::size_t j, std::size_t k, std::size_t l, std::size_t c, std::size_t s,
                         std::size_t n, std::size_t m) {
  return ((i * s + j) * n * n + k * n + l) * m + c;
}

std::size_t flat_index(std::size_t i, std::size_t j, std::size_t k, std::size_t l, std::size_t c, std::size_t s,
                       std::size_t n, std::size_t m) {
  const std::size_t big = s * n;
  return ((i * n + k) * big + (j * n + l)) * m + c;
}

std::vector<cplx> nested_to_flat(const std::vector<cplx>& nested, std::size_t s, std::size_t n, std::size_t m) {
  std::vector<cplx> flat(nested.size());
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t c = 0; c < m; ++c)
            flat[flat_index(i, j, k, l, c, s, n, m)] = nested[nested_index(i, j, k, l, c, s, n, m)];
  return flat;
}

}  // namespace

NestedElement amplify_nested(const OperatorSystem& x, std::size_t s, std::size_t n, std::vector<cplx> coeffs) {
  const std::size_t m = x.dim();
  require(coeffs.size() == s * s * n * n * m, ErrorKind::dimension_mismatch, "nested coefficient count mismatch");
  AmplifiedElement flat = amplify(x, s * n, nested_to_flat(coeffs, s, n, m));
  NestedElement z;
  z.outer = s;
  z.inner = n;
  z.coeffs = std::move(coeffs);
  z.realization = std::move(flat.realization);
  return z;
}

AmplifiedElement forget_subdivisions(const NestedElement& z, std::size_t m) {
  const std::size_t s = z.outer, n = z.inner;
  require(z.coeffs.size() == s * s * n * n * m, ErrorKind::dimension_mismatch, "nested coefficient count mismatch");
  AmplifiedElement out;
  out.level = s * n;
  out.coeffs = nested_to_flat(z.coeffs, s, n, m);
  out.realization = z.realization;
  return out;
}

NestedElement add_subdivisions(const AmplifiedElement& z, std::size_t n, std::size_t m) {
  require(n >= 1 && z.level % n == 0, ErrorKind::dimension_mismatch, "level is not divisible by n");
  const std::size_t s = z.level / n;
  require(z.coeffs.size() == z.level * z.level * m, ErrorKind::dimension_mismatch, "coefficient count mismatch");
  NestedElement out;
  out.outer = s;
  out.inner = n;
  out.coeffs.resize(z.coeffs.size());
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t c = 0; c < m; ++c)
            out.coeffs[nested_index(i, j, k, l, c, s, n, m)] = z.coeffs[flat_index(i, j, k, l, c, s, n, m)];
  out.realization = z.realization;
  return out;
}

NestedElement as_nested(const AmplifiedElement& z, std::size_t n, std::size_t m) {
  require(z.coeffs.size() == z.level * z.level * n * n * m, ErrorKind::dimension_mismatch,
          "element does not live over M_n(X)");
  NestedElement out;
  out.outer = z.level;
  out.inner = n;
  out.coeffs = z.coeffs;
  out.realization = z.realization;
  return out;
}

AmplifiedElement as_amplified(const NestedElement& z) {
  AmplifiedElement out;
  out.level = z.outer;
  out.coeffs = z.coeffs;
  out.realization = z.realization;
  return out;
}

QuotientResult quotient_norm(const AmplifiedElement& z, const QuotientOptions& options) {
  return minimize_scalar_distance(z.realization, z.level, options);
}

ComplexMatrix UcpMap::apply(std::span<const cplx> coords) const {
  require(coords.size() == values.size(), ErrorKind::dimension_mismatch, "coordinate count mismatch");
  ComplexMatrix out(target_dim, target_dim);
  for (std::size_t k = 0; k < coords.size(); ++k)
    if (coords[k] != cplx(0.0)) out.axpy(coords[k], values[k]);
  return out;
}

ComplexMatrix UcpMap::apply_amplified(const AmplifiedElement& z) const {
  const std::size_t s = z.level, m = values.size(), n = target_dim;
  ComplexMatrix out(s * n, s * n);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) out.set_block(i * n, j * n, apply(segment(z.coeffs, i * s + j, m)));
  return out;
}

UcpMap compression(const OperatorSystem& x, const ComplexMatrix& v) {
  require(v.rows() == x.ambient_dim() && v.cols() >= 1, ErrorKind::dimension_mismatch, "isometry has the wrong shape");
  UcpMap phi;
  phi.target_dim = v.cols();
  phi.values.reserve(x.dim());
  for (const auto& b : x.basis()) phi.values.push_back(adjoint_times(v, b * v));
  return phi;
}

UcpMap compression_sum(const OperatorSystem& x, const std::vector<ComplexMatrix>& isometries) {
  require(!isometries.empty(), ErrorKind::dimension_mismatch, "no isometries");
  std::vector<UcpMap> parts;
  for (const auto& v : isometries) parts.push_back(compression(x, v));
  UcpMap phi;
  phi.target_dim = 0;
  for (const auto& p : parts) phi.target_dim += p.target_dim;
  for (std::size_t k = 0; k < x.dim(); ++k) {
    std::vector<ComplexMatrix> blocks;
    for (const auto& p : parts) blocks.push_back(p.values[k]);
    phi.values.push_back(direct_sum(std::span<const ComplexMatrix>(blocks)));
  }
  return phi;
}

UcpMap sample_ucp(const OperatorSystem& x, std::size_t n, std::uint64_t seed) {
  require(n >= 1, ErrorKind::dimension_mismatch, "target dimension must be positive");
  Rng rng(seed);
  const std::size_t d = x.ambient_dim();
  if (n <= d) return compression(x, haar_isometry(rng, d, n));
  std::vector<ComplexMatrix> parts;
  for (std::size_t rem = n; rem > 0;) {
    const std::size_t c = std::min(d, rem);
    parts.push_back(haar_isometry(rng, d, c));
    rem -= c;
  }
  return compression_sum(x, parts);
}

std::vector<UcpMap> ucp_sample_sequence(const OperatorSystem& x, std::size_t count, std::uint64_t seed) {
  const std::size_t d = x.ambient_dim();
  std::vector<UcpMap> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0) {
      out.push_back(compression(x, ComplexMatrix::identity(d)));
    } else if (i <= d) {
      ComplexMatrix e(d, 1);
      e(i - 1, 0) = 1.0;
      out.push_back(compression(x, e));
    } else {
      const std::uint64_t si = derive_seed(seed, i);
      out.push_back(sample_ucp(x, 1 + static_cast<std::size_t>(si % d), si));
    }
  }
  return out;
}

double unitality_defect(const OperatorSystem& x, const UcpMap& phi) {
  return max_abs_diff(phi.apply(x.unit_coords()), ComplexMatrix::identity(phi.target_dim));
}

NestedElement apply_ucp_right(const OperatorSystem& x, const OperatorSystem& y, const AmplifiedElement& z,
                              const UcpMap& phi) {
  const std::size_t s = z.level, mx = x.dim(), my = y.dim(), n = phi.target_dim;
  require(z.coeffs.size() == s * s * mx * my && phi.values.size() == my, ErrorKind::dimension_mismatch,
          "element is not in tensor coordinates over X (x) Y");
  std::vector<cplx> coeffs(s * s * n * n * mx, 0.0);
  for (std::size_t ij = 0; ij < s * s; ++ij)
    for (std::size_t a = 0; a < mx; ++a)
      for (std::size_t b = 0; b < my; ++b) {
        const cplx c = z.coeffs[ij * mx * my + a * my + b];
        if (c == cplx(0.0)) continue;
        const ComplexMatrix& fy = phi.values[b];
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) coeffs[(ij * n * n + k * n + l) * mx + a] += c * fy(k, l);
      }
  return amplify_nested(x, s, n, std::move(coeffs));
}

NestedElement apply_ucp_left(const OperatorSystem& x, const OperatorSystem& y, const AmplifiedElement& z,
                             const UcpMap& phi) {
  const std::size_t s = z.level, mx = x.dim(), my = y.dim(), n = phi.target_dim;
  require(z.coeffs.size() == s * s * mx * my && phi.values.size() == mx, ErrorKind::dimension_mismatch,
          "element is not in tensor coordinates over X (x) Y");
  std::vector<cplx> coeffs(s * s * n * n * my, 0.0);
  for (std::size_t ij = 0; ij < s * s; ++ij)
    for (std::size_t a = 0; a < mx; ++a)
      for (std::size_t b = 0; b < my; ++b) {
        const cplx c = z.coeffs[ij * mx * my + a * my + b];
        if (c == cplx(0.0)) continue;
        const ComplexMatrix& fx = phi.values[a];
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) coeffs[(ij * n * n + k * n + l) * my + b] += c * fx(k, l);
      }
  return amplify_nested(y, s, n, std::move(coeffs));
}

}  // namespace qms
