#pragma once

#include <vector>

#include "qms/matrix.hpp"

namespace qms {

struct HermitianEigenResult {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns, unitary
};

/// Cyclic complex Jacobi. Throws NotHermitian if M is not Hermitian within tolerance.
HermitianEigenResult hermitian_eigen(const ComplexMatrix& m);
/// Same sweep without accumulating eigenvectors.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Largest singular value.
double operator_norm(const ComplexMatrix& m);

/// Top singular triple: m * v = sigma * u, |u| = |v| = 1.
struct SingularPair {
  double sigma = 0.0;
  std::vector<cplx> u;
  std::vector<cplx> v;
};
SingularPair top_singular_pair(const ComplexMatrix& m);

/// Thin QR by Householder reflections. Q is rows x k, R is k x cols with k = min(rows, cols);
/// the diagonal of R is real and nonnegative.
struct QrResult {
  ComplexMatrix q;
  ComplexMatrix r;
};
QrResult householder_qr(const ComplexMatrix& a);

/// Singular values (descending) and right singular vectors of A by one-sided Jacobi.
struct SvdResult {
  std::vector<double> singular_values;
  ComplexMatrix right_vectors;  // cols x cols, columns ordered like singular_values
};
SvdResult jacobi_svd(const ComplexMatrix& a);

/// Orthonormal basis (as columns) of { x : A x = 0 }, deciding rank with
/// sigma <= relative_cutoff * sigma_max.
ComplexMatrix null_space(const ComplexMatrix& a, double relative_cutoff);

/// Numerical rank with the same cutoff convention as null_space.
std::size_t numerical_rank(const ComplexMatrix& a, double relative_cutoff);

/// Frobenius Gram-Schmidt (two passes). Throws InvalidOperatorSystem when the
/// input is linearly dependent at relative tolerance `tol`.
std::vector<ComplexMatrix> gram_schmidt(const std::vector<ComplexMatrix>& vectors, double tol);

}  // namespace qms
