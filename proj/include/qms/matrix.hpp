#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qms {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Every operator in the workbench
/// (algebra elements, Dirac operators, gradings, unitaries) is one of these.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static ComplexMatrix diagonal(std::span<const cplx> diag);
  static ComplexMatrix diagonal(std::span<const double> diag);
  /// The n x n matrix unit e_{ij}.
  static ComplexMatrix unit(std::size_t n, std::size_t i, std::size_t j);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> entries() noexcept { return data_; }
  std::span<const cplx> entries() const noexcept { return data_; }
  cplx* data() noexcept { return data_.data(); }
  const cplx* data() const noexcept { return data_.data(); }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  cplx trace() const;
  double frobenius_norm() const;
  double max_abs() const;

  ComplexMatrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const;
  void set_block(std::size_t row0, std::size_t col0, const ComplexMatrix& b);
  void add_block(std::size_t row0, std::size_t col0, const ComplexMatrix& b, cplx scale = 1.0);

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx scalar);
  /// this += scale * other
  void axpy(cplx scale, const ComplexMatrix& other);

  bool operator==(const ComplexMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, cplx s);

/// A^* B without forming A^*.
ComplexMatrix adjoint_times(const ComplexMatrix& a, const ComplexMatrix& b);
/// A B^* without forming B^*.
ComplexMatrix times_adjoint(const ComplexMatrix& a, const ComplexMatrix& b);

std::vector<cplx> operator*(const ComplexMatrix& a, std::span<const cplx> x);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks);
/// AB - BA for square matrices of equal size.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);
/// I_s (x) A, the s-fold direct sum of A.
ComplexMatrix amplify(const ComplexMatrix& a, std::size_t s);

/// Frobenius inner product tr(A^* B).
cplx inner(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// ||M - M^*||_F.
double hermitian_defect(const ComplexMatrix& m);

/// Partial trace over the inner factor of C^s (x) C^d: (ptr Y)_{ab} = sum_k Y_{(a,k),(b,k)}.
ComplexMatrix partial_trace_inner(const ComplexMatrix& y, std::size_t s, std::size_t d);

/// (I_s (x) A) Z (I_s (x) B) computed blockwise. A is p x d, Z is (s d) x (s d), B is d x q.
ComplexMatrix block_sandwich(const ComplexMatrix& a, const ComplexMatrix& z, const ComplexMatrix& b,
                             std::size_t s);

}  // namespace qms
