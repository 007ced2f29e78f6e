#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qms/matrix.hpp"

namespace qms {

struct QuotientOptions {
  int restarts = 8;
  int iterations = 500;
  std::uint64_t seed = 0x5eed;
};

struct QuotientResult {
  double value = 0.0;
  ComplexMatrix shift;  // the minimizing v in M_s(C)
  int iterations = 0;
  bool converged = true;
};

/// min over v in M_s(C) of ||Z - v (x) I_d|| for Z of size s*d. The first start is the
/// normalized partial trace; the value is always attained by the returned shift, so it is
/// an upper bound for the true minimum.
QuotientResult minimize_scalar_distance(const ComplexMatrix& z, std::size_t s, const QuotientOptions& options = {});

/// Real-valued function of a real coordinate vector. When `grad` is non-null it receives a
/// (super)gradient of the same length as y.
using Objective = std::function<double(std::span<const double> y, std::vector<double>* grad)>;

/// Norm functional y -> max_k weight_k ||sum_j y_j images_k[j]||, with the supergradient of
/// the active term taken from its top singular pair.
struct NormTerm {
  double weight = 1.0;
  std::vector<ComplexMatrix> images;
};
Objective max_norm_objective(std::vector<NormTerm> terms);
/// Value and supergradient of ||sum_j y_j m[j]|| (the single-term case).
double norm_with_gradient(std::span<const ComplexMatrix> images, std::span<const double> y, std::vector<double>* grad);

struct RatioOptions {
  int restarts = 8;
  int iterations = 500;
  std::uint64_t seed = 0;
  double initial_step = 0.5;
  int probes = 6;
  std::vector<std::vector<double>> warm_starts;  // used as the first restarts
};

struct RatioResult {
  double value = 0.0;
  std::vector<double> argmax;
  int iterations = 0;
  int restarts = 0;
  bool converged = true;
  std::vector<double> history;  // best value after each iteration of the winning restart
};

/// Maximize num(y) / den(y) over the unit sphere of R^k by projected ascent along great
/// circles with step decay 1/sqrt(t), backtracking and random probes. Restarts use seeds
/// fixed up front and run independently; the result is the max-value reduction.
RatioResult maximize_ratio(std::size_t k, const Objective& num, const Objective& den, const RatioOptions& options);

}  // namespace qms
