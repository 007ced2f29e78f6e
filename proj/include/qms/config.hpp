#pragma once

namespace qms {

/// Numerical thresholds shared by every module. One record so that tests and
/// the CLI can reason about a single set of constants.
struct Tolerances {
  double hermitian = 1e-10;      // ||M - M*||_F relative slack for Hermitian inputs
  double compare = 1e-9;         // inequality / equality checks between computed reals
  double algebraic = 1e-12;      // exact algebraic identities (Clifford, Weyl relations)
  double identity = 1e-10;       // unitality, grading and recovery identities
  double span_residual = 1e-10;  // membership in a span (unit, adjoints, products)
  double kernel_cutoff = 1e-8;   // relative singular-value cutoff for rank decisions
  double infinite_ratio = 1e6;   // kernel-violation witness ratio treated as +infinity
};

inline constexpr Tolerances kTolerances{};

}  // namespace qms
