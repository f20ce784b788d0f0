#pragma once

// Optimal fixed-rule pools as solutions of the budgeted program
//
//   maximize  sum_{i<n} u(y_i) delta^i   subject to  sum_i y_i <= B, y >= 0,
//
// solved in closed form for power utility and by multiplier bisection
// (water-filling on discounted marginal utility) for any concave utility.

#include <cstddef>
#include <vector>

#include "minepool/allocation.hpp"
#include "minepool/core_model.hpp"

namespace minepool {

struct TruncatedSolution {
  /// Currency amounts per offset, y_i >= 0.
  std::vector<double> y;
  /// Multiplier equalizing u'(y_i) delta^i over the positive coordinates.
  double lambda = 0.0;
  /// sum_i u(y_i) delta^i
  double objective = 0.0;
  /// sum_i y_i
  double budget_used = 0.0;
};

/// Closed form for u(x) = x^alpha, 0 < alpha < 1:
///   y_i = B (1 - r) / (1 - r^n) r^i,   r = delta^{1/(1-alpha)},
///   lambda = alpha y_0^{alpha-1}.
TruncatedSolution truncated_lagrange_power(std::size_t n, double alpha,
                                           double delta, double block_reward);

/// Bisects lambda so that sum_i (u')^-1(lambda delta^{-i}) = B within
/// tol * B. Concavity makes the KKT point the global maximum.
TruncatedSolution solve_fixed_rule_kkt(const UtilityFunction& u, double delta,
                                       double block_reward, std::size_t n,
                                       double tol = 1e-10);

/// Zero-padded extension of a window solution: a Custom rule with weights
/// y_i / sum(y).
AllocationRule extend_truncated(const TruncatedSolution& sol);

/// Largest violation of the KKT conditions, relative to lambda:
/// |u'(y_i) delta^i - lambda| for y_i > 0 and max(0, u'(0+) delta^i - lambda)
/// for y_i == 0. Coordinates below the normal floating-point range are
/// skipped.
double kkt_violation(const TruncatedSolution& sol, const UtilityFunction& u,
                     double delta);

}  // namespace minepool
