#include "minepool/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "minepool/lambert_w.hpp"

namespace minepool {
namespace {

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in (0, 1]");
  }
}

// delta^{1/(1-alpha)}, the ratio of the optimal geometric rule.
double geometric_ratio(double alpha, double delta) {
  return std::exp(std::log(delta) / (1.0 - alpha));
}

// 1 - delta^{1/(1-alpha)} without cancellation.
double geometric_head(double alpha, double delta) {
  return -std::expm1(std::log(delta) / (1.0 - alpha));
}

}  // namespace

double pplns_steady_state_utility(const PoolParams& params, double alpha,
                                  double n) {
  validate_alpha(alpha);
  if (!(n >= 1.0)) throw DomainError("PPLNS window N must be >= 1");
  const double delta = params.delta();
  const double window_sum = -std::expm1(n * std::log(delta)) / (1.0 - delta);
  return params.p() * std::pow(params.block_reward(), alpha) *
         std::pow(1.0 / n, alpha) * window_sum;
}

OptimalPplns optimal_pplns_n(const PoolParams& params, double alpha) {
  validate_alpha(alpha);
  OptimalPplns out;
  if (alpha == 1.0) {
    out.n_real = 1.0;
    out.n_int = 1;
    out.utility_at_n_int = pplns_steady_state_utility(params, alpha, 1.0);
    return out;
  }
  const double w = lambert_w_minus1(-alpha * std::exp(-alpha)).value;
  out.n_real = (w + alpha) / std::log(params.delta());

  const double lo = std::max(1.0, std::floor(out.n_real));
  const double hi = std::max(1.0, std::ceil(out.n_real));
  const double u_lo = pplns_steady_state_utility(params, alpha, lo);
  const double u_hi = pplns_steady_state_utility(params, alpha, hi);
  if (u_hi > u_lo) {
    out.n_int = static_cast<std::size_t>(hi);
    out.utility_at_n_int = u_hi;
  } else {
    out.n_int = static_cast<std::size_t>(lo);
    out.utility_at_n_int = u_lo;
  }
  return out;
}

AllocationRule geometric_optimal_rule(double alpha, double delta) {
  validate_delta(delta);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("geometric optimum needs alpha in (0, 1); use solo for alpha = 1");
  }
  // c = 1 - r taken literally keeps the rule's mass at exactly 1.
  const double r = geometric_ratio(alpha, delta);
  return AllocationRule::geometric(1.0 - r, r);
}

double geometric_steady_state_utility(const PoolParams& params, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("geometric optimum needs alpha in (0, 1)");
  }
  return params.p() * std::pow(params.block_reward(), alpha) *
         std::pow(geometric_head(alpha, params.delta()), alpha - 1.0);
}

double solo_utility(const PoolParams& params, const UtilityFunction& u) {
  return params.p() * u.value(params.block_reward());
}

double fixed_rule_steady_state_utility(const AllocationRule& rule,
                                       const PoolParams& params,
                                       const UtilityFunction& u, double eps) {
  mass(rule);
  const std::size_t depth = truncation_depth(rule, params, u, eps);
  std::vector<double> terms(depth);
  for (std::size_t i = 0; i < depth; ++i) {
    terms[i] = params.p() * u.value(params.block_reward() * weight(rule, i));
  }
  return deu(terms, params.delta());
}

double proportional_pay_expected_utility(const PoolParams& params,
                                         const UtilityFunction& u, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double p = params.p();
  const double q = 1.0 - p;
  const double delta = params.delta();
  const double big_b = params.block_reward();

  // Grouping by round length s + 1 = a + f + 1, the inner sum over f is a
  // finite geometric series. The tail beyond s >= S is at most
  // p u(B) q^S / (1 - delta).
  std::size_t terms = 1;
  if (q > 0.0) {
    const double scaled = eps * (1.0 - delta) / (p * u.value(big_b));
    if (scaled < 1.0) {
      terms = static_cast<std::size_t>(std::ceil(std::log(scaled) / std::log1p(-p)));
      terms = std::max<std::size_t>(terms, 1);
    }
  }
  const double log_q = q > 0.0 ? std::log1p(-p) : 0.0;
  const double log_delta = std::log(delta);
  CompensatedSum acc;
  for (std::size_t s = 0; s < terms; ++s) {
    const double len = static_cast<double>(s + 1);
    const double round_weight =
        s == 0 ? 1.0 : std::exp(static_cast<double>(s) * log_q);
    const double discount_sum = -std::expm1(len * log_delta) / (1.0 - delta);
    acc.add(p * p * round_weight * u.value(big_b / len) * discount_sum);
  }
  return acc.value();
}

}  // namespace minepool
