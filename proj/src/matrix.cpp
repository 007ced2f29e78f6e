#include "qms/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "qms/errors.hpp"

namespace qms {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::not_hermitian: return "NotHermitian";
    case ErrorKind::invalid_operator_system: return "InvalidOperatorSystem";
    case ErrorKind::invalid_triple: return "InvalidTriple";
    case ErrorKind::parity_mismatch: return "ParityMismatch";
    case ErrorKind::unsupported_kind: return "UnsupportedKind";
    case ErrorKind::irrational_theta: return "IrrationalTheta";
    case ErrorKind::invalid_weight: return "InvalidWeight";
    case ErrorKind::empty_space: return "EmptySpace";
    case ErrorKind::invalid_metric: return "InvalidMetric";
    case ErrorKind::hypothesis_failed: return "HypothesisFailed";
    case ErrorKind::config_invalid: return "ConfigInvalid";
    case ErrorKind::io_error: return "IoError";
  }
  return "Error";
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require(data_.size() == rows * cols, ErrorKind::dimension_mismatch,
          "entry count does not match rows*cols");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    require(row.size() == cols_, ErrorKind::dimension_mismatch, "ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
  ComplexMatrix m(n, n);
  m(i, j) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out(*this);
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

cplx ComplexMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

ComplexMatrix ComplexMatrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                                   std::size_t ncols) const {
  require(row0 + nrows <= rows_ && col0 + ncols <= cols_, ErrorKind::dimension_mismatch,
          "block out of range");
  ComplexMatrix out(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i)
    std::copy_n(&(*this)(row0 + i, col0), ncols, &out(i, 0));
  return out;
}

void ComplexMatrix::set_block(std::size_t row0, std::size_t col0, const ComplexMatrix& b) {
  require(row0 + b.rows() <= rows_ && col0 + b.cols() <= cols_, ErrorKind::dimension_mismatch,
          "block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    std::copy_n(&b(i, 0), b.cols(), &(*this)(row0 + i, col0));
}

void ComplexMatrix::add_block(std::size_t row0, std::size_t col0, const ComplexMatrix& b,
                              cplx scale) {
  require(row0 + b.rows() <= rows_ && col0 + b.cols() <= cols_, ErrorKind::dimension_mismatch,
          "block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(row0 + i, col0 + j) += scale * b(i, j);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorKind::dimension_mismatch, "sum");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorKind::dimension_mismatch,
          "difference");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scalar) {
  for (auto& v : data_) v *= scalar;
  return *this;
}

void ComplexMatrix::axpy(cplx scale, const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, ErrorKind::dimension_mismatch, "axpy");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += scale * other.data_[k];
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.rows(), ErrorKind::dimension_mismatch, "product");
  ComplexMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx* row = &out(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0)) continue;
      const cplx* brow = &b(k, 0);
      for (std::size_t j = 0; j < n; ++j) row[j] += aik * brow[j];
    }
  }
  return out;
}

ComplexMatrix adjoint_times(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows(), ErrorKind::dimension_mismatch, "adjoint product");
  ComplexMatrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const cplx* brow = &b(k, 0);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const cplx aki = std::conj(a(k, i));
      if (aki == cplx(0.0)) continue;
      cplx* row = &out(i, 0);
      for (std::size_t j = 0; j < n; ++j) row[j] += aki * brow[j];
    }
  }
  return out;
}

ComplexMatrix times_adjoint(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.cols() == b.cols(), ErrorKind::dimension_mismatch, "product with adjoint");
  ComplexMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const cplx* arow = &a(i, 0);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const cplx* brow = &b(j, 0);
      cplx acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * std::conj(brow[k]);
      out(i, j) = acc;
    }
  }
  return out;
}

std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x) {
  require(a.cols() == x.size(), ErrorKind::dimension_mismatch, "matrix-vector product");
  std::vector<cplx> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * x[k];
    y[i] = acc;
  }
  return y;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), a.cols(), b);
  return out;
}

ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks) {
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  ComplexMatrix out(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    out.set_block(r, c, b);
    r += b.rows();
    c += b.cols();
  }
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.is_square() && b.is_square() && a.rows() == b.rows(), ErrorKind::dimension_mismatch,
          "commutator needs square matrices of equal size");
  return a * b - b * a;
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.is_square() && b.is_square() && a.rows() == b.rows(), ErrorKind::dimension_mismatch,
          "anticommutator needs square matrices of equal size");
  return a * b + b * a;
}

ComplexMatrix amplify(const ComplexMatrix& a, std::size_t s) {
  ComplexMatrix out(a.rows() * s, a.cols() * s);
  for (std::size_t i = 0; i < s; ++i) out.set_block(i * a.rows(), i * a.cols(), a);
  return out;
}

cplx inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::dimension_mismatch, "inner");
  cplx acc = 0.0;
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) acc += std::conj(ea[k]) * eb[k];
  return acc;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::dimension_mismatch,
          "max_abs_diff");
  double m = 0.0;
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t k = 0; k < ea.size(); ++k) m = std::max(m, std::abs(ea[k] - eb[k]));
  return m;
}

double hermitian_defect(const ComplexMatrix& m) {
  require(m.is_square(), ErrorKind::dimension_mismatch, "hermitian defect of non-square matrix");
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j) - std::conj(m(j, i)));
  return std::sqrt(s);
}

ComplexMatrix partial_trace_inner(const ComplexMatrix& y, std::size_t s, std::size_t d) {
  require(y.rows() == s * d && y.cols() == s * d, ErrorKind::dimension_mismatch, "partial trace");
  ComplexMatrix out(s, s);
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += y(a * d + k, b * d + k);
      out(a, b) = acc;
    }
  return out;
}

ComplexMatrix block_sandwich(const ComplexMatrix& a, const ComplexMatrix& z, const ComplexMatrix& b,
                             std::size_t s) {
  const std::size_t d = a.cols();
  require(b.rows() == d && z.rows() == s * d && z.cols() == s * d, ErrorKind::dimension_mismatch,
          "block sandwich");
  const std::size_t p = a.rows(), q = b.cols();
  ComplexMatrix out(s * p, s * q);
  ComplexMatrix zb(d, d);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      for (std::size_t r = 0; r < d; ++r) std::copy_n(&z(i * d + r, j * d), d, &zb(r, 0));
      out.set_block(i * p, j * q, a * zb * b);
    }
  return out;
}

}  // namespace qms
