#pragma once

// Closed-form steady-state utilities and optimal parameters for PPLNS and
// geometric pools under power utility, plus the generic fixed-rule sum and
// a summation oracle for proportional pay.

#include <cstddef>

#include "minepool/allocation.hpp"
#include "minepool/core_model.hpp"

namespace minepool {

struct OptimalPplns {
  /// Continuous maximizer of (1/N)^alpha (1 - delta^N).
  double n_real = 1.0;
  /// Better of floor(n_real) and ceil(n_real), ties to the smaller.
  std::size_t n_int = 1;
  double utility_at_n_int = 0.0;
};

/// p B^alpha (1/N)^alpha (1 - delta^N) / (1 - delta); N >= 1 may be real.
///
/// This equals the PPLNS share utility summed over offsets 0 .. N-1 (the
/// block share itself is offset 0), the same convention as every other
/// utility in this library.
double pplns_steady_state_utility(const PoolParams& params, double alpha,
                                  double n);

/// Optimal PPLNS window. For alpha < 1,
///   n_real = (W_{-1}(-alpha e^{-alpha}) + alpha) / ln(delta);
/// for alpha == 1 the optimum is solo mining (N = 1).
///
/// The maximizer does not depend on p or B; `params` only scales
/// utility_at_n_int.
OptimalPplns optimal_pplns_n(const PoolParams& params, double alpha);

/// Geometric rule c = 1 - delta^{1/(1-alpha)}, r = delta^{1/(1-alpha)}.
/// Throws DomainError for alpha >= 1 (the limit is solo mining).
AllocationRule geometric_optimal_rule(double alpha, double delta);

/// p B^alpha (1 - delta^{1/(1-alpha)})^{alpha-1}.
double geometric_steady_state_utility(const PoolParams& params, double alpha);

/// p u(B).
double solo_utility(const PoolParams& params, const UtilityFunction& u);

/// sum_{i<d} p u(B w_i) delta^i with d = truncation_depth(rule, ..., eps).
double fixed_rule_steady_state_utility(const AllocationRule& rule,
                                       const PoolParams& params,
                                       const UtilityFunction& u, double eps);

/// Expected DEU of a stationary share under proportional pay. With A shares
/// earlier in the round and F shares until the block, A and F independent
/// Geometric(p):
///   sum_{a,f} p^2 (1-p)^{a+f} u(B / (a+f+1)) delta^f.
/// Truncated once the remaining mass bound drops below eps.
double proportional_pay_expected_utility(const PoolParams& params,
                                         const UtilityFunction& u, double eps);

}  // namespace minepool
