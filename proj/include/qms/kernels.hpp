#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "qms/matrix.hpp"

namespace qms {

/// T(Z) = sum_r (I_s (x) A_r) Z (I_s (x) B_r); a seminorm evaluates max_k weight_k ||T_k(Z)||.
/// s is inferred from the size of Z.
struct SandwichTerm {
  double weight = 1.0;
  std::vector<std::pair<ComplexMatrix, ComplexMatrix>> parts;
};

ComplexMatrix apply_term(const SandwichTerm& term, const ComplexMatrix& z);

namespace kernels {

/// Worker cap for the OpenMP variants. 0 means the OpenMP default.
void set_max_threads(int n);
int max_threads();
/// Reads QMS_THREADS if set.
void init_threads_from_env();
bool parallel_enabled();

// Every kernel has a serial reference and an OpenMP variant; both return identical
// values because the only reductions are max and per-index writes.
namespace serial {
double max_reduce(std::size_t n, const std::function<double(std::size_t)>& f);
void for_each(std::size_t n, const std::function<void(std::size_t)>& f);
double sandwich_max(const std::vector<SandwichTerm>& terms, const ComplexMatrix& z);
/// max over the g x g grid (t1, t2) = (2 pi a / g, 2 pi b / g) of ||symbol(t1, t2)||.
double grid_max_norm(std::size_t g, const std::function<ComplexMatrix(double, double)>& symbol);
}  // namespace serial

namespace omp {
double max_reduce(std::size_t n, const std::function<double(std::size_t)>& f);
void for_each(std::size_t n, const std::function<void(std::size_t)>& f);
double sandwich_max(const std::vector<SandwichTerm>& terms, const ComplexMatrix& z);
double grid_max_norm(std::size_t g, const std::function<ComplexMatrix(double, double)>& symbol);
}  // namespace omp

/// Dispatch to the OpenMP variant when more than one worker is allowed.
double max_reduce(std::size_t n, const std::function<double(std::size_t)>& f);
void for_each(std::size_t n, const std::function<void(std::size_t)>& f);
double sandwich_max(const std::vector<SandwichTerm>& terms, const ComplexMatrix& z);
double grid_max_norm(std::size_t g, const std::function<ComplexMatrix(double, double)>& symbol);

}  // namespace kernels
}  // namespace qms
