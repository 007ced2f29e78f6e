#include "qms/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>

#include "qms/errors.hpp"
#include "qms/linalg.hpp"

namespace qms {

ComplexMatrix apply_term(const SandwichTerm& term, const ComplexMatrix& z) {
  require(!term.parts.empty(), ErrorKind::dimension_mismatch, "empty sandwich term");
  const std::size_t d = term.parts.front().first.cols();
  require(d > 0 && z.rows() % d == 0, ErrorKind::dimension_mismatch, "term does not match element size");
  const std::size_t s = z.rows() / d;
  ComplexMatrix out = block_sandwich(term.parts.front().first, z, term.parts.front().second, s);
  for (std::size_t r = 1; r < term.parts.size(); ++r)
    out += block_sandwich(term.parts[r].first, z, term.parts[r].second, s);
  return out;
}

namespace kernels {
namespace {

std::atomic<int> g_max_threads{0};

// Exceptions may not cross an OpenMP region boundary; capture the first and rethrow.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(qms_exception_slot)
      if (!ptr_) ptr_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (ptr_) std::rethrow_exception(ptr_);
  }

 private:
  std::exception_ptr ptr_;
};

int thread_count() {
  const int cap = g_max_threads.load();
  return cap > 0 ? cap : omp_get_max_threads();
}

double grid_point_norm(std::size_t g, std::size_t idx,
                       const std::function<ComplexMatrix(double, double)>& symbol) {
  // 2 pi (a / g) rather than (2 pi / g) a, so that a refined grid hits the coarse points exactly.
  const double gd = static_cast<double>(g);
  const double t1 = 2.0 * std::numbers::pi * (static_cast<double>(idx / g) / gd);
  const double t2 = 2.0 * std::numbers::pi * (static_cast<double>(idx % g) / gd);
  return operator_norm(symbol(t1, t2));
}

}  // namespace

void set_max_threads(int n) { g_max_threads.store(std::max(0, n)); }
int max_threads() { return thread_count(); }

void init_threads_from_env() {
  if (const char* env = std::getenv("QMS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) set_max_threads(static_cast<int>(v));
  }
}

bool parallel_enabled() { return thread_count() > 1; }

namespace serial {

double max_reduce(std::size_t n, const std::function<double(std::size_t)>& f) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, f(i));
  return best;
}

void for_each(std::size_t n, const std::function<void(std::size_t)>& f) {
  for (std::size_t i = 0; i < n; ++i) f(i);
}

double sandwich_max(const std::vector<SandwichTerm>& terms, const ComplexMatrix& z) {
  double best = 0.0;
  for (const auto& t : terms) best = std::max(best, t.weight * operator_norm(apply_term(t, z)));
  return best;
}

double grid_max_norm(std::size_t g, const std::function<ComplexMatrix(double, double)>& symbol) {
  double best = 0.0;
  for (std::size_t i = 0; i < g * g; ++i) best = std::max(best, grid_point_norm(g, i, symbol));
  return best;
}

}  // namespace serial

namespace omp {

double max_reduce(std::size_t n, const std::function<double(std::size_t)>& f) {
  double best = 0.0;
  ExceptionSlot slot;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for reduction(max : best) num_threads(thread_count()) schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    slot.run([&] { best = std::max(best, f(static_cast<std::size_t>(i))); });
  }
  slot.rethrow();
  return best;
}

void for_each(std::size_t n, const std::function<void(std::size_t)>& f) {
  ExceptionSlot slot;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for num_threads(thread_count()) schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    slot.run([&] { f(static_cast<std::size_t>(i)); });
  }
  slot.rethrow();
}

double sandwich_max(const std::vector<SandwichTerm>& terms, const ComplexMatrix& z) {
  return max_reduce(terms.size(), [&](std::size_t k) {
    return terms[k].weight * operator_norm(apply_term(terms[k], z));
  });
}

double grid_max_norm(std::size_t g, const std::function<ComplexMatrix(double, double)>& symbol) {
  return max_reduce(g * g, [&](std::size_t i) { return grid_point_norm(g, i, symbol); });
}

}  // namespace omp

double max_reduce(std::size_t n, const std::function<double(std::size_t)>& f) {
  return parallel_enabled() && n > 1 && !omp_in_parallel() ? omp::max_reduce(n, f) : serial::max_reduce(n, f);
}

void for_each(std::size_t n, const std::function<void(std::size_t)>& f) {
  if (parallel_enabled() && n > 1 && !omp_in_parallel())
    omp::for_each(n, f);
  else
    serial::for_each(n, f);
}

double sandwich_max(const std::vector<SandwichTerm>& terms, const ComplexMatrix& z) {
  return parallel_enabled() && terms.size() > 1 && !omp_in_parallel() ? omp::sandwich_max(terms, z)
                                                                      : serial::sandwich_max(terms, z);
}

double grid_max_norm(std::size_t g, const std::function<ComplexMatrix(double, double)>& symbol) {
  return parallel_enabled() && !omp_in_parallel() ? omp::grid_max_norm(g, symbol)
                                                  : serial::grid_max_norm(g, symbol);
}

}  // namespace kernels
}  // namespace qms
