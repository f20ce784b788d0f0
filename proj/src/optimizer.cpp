#include "minepool/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minepool {
namespace {

void validate_window(std::size_t n, double block_reward) {
  if (n == 0) throw DomainError("window n must be positive");
  if (!(block_reward > 0.0) || !std::isfinite(block_reward)) {
    throw DomainError("B must be positive and finite");
  }
}

void finish(TruncatedSolution& sol, const UtilityFunction& u, double delta) {
  CompensatedSum used;
  std::vector<double> utilities(sol.y.size());
  for (std::size_t i = 0; i < sol.y.size(); ++i) {
    used.add(sol.y[i]);
    utilities[i] = u.value(sol.y[i]);
  }
  sol.budget_used = used.value();
  sol.objective = deu(utilities, delta);
}

// Water level: y_i = (u')^-1(lambda delta^{-i}), evaluated in log space so
// that delta^{-i} never overflows.
double fill(const UtilityFunction& u, double log_lambda, double log_delta,
            std::vector<double>& y) {
  CompensatedSum total;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = std::exp(log_lambda - static_cast<double>(i) * log_delta);
    y[i] = u.inverse_marginal(z);
    total.add(y[i]);
  }
  return total.value();
}

}  // namespace

TruncatedSolution truncated_lagrange_power(std::size_t n, double alpha,
                                           double delta, double block_reward) {
  validate_window(n, block_reward);
  validate_delta(delta);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("closed form needs alpha in (0, 1)");
  }
  const double log_r = std::log(delta) / (1.0 - alpha);
  const double head = -std::expm1(log_r);
  const double tail = -std::expm1(static_cast<double>(n) * log_r);
  const double y0 = block_reward * head / tail;

  TruncatedSolution sol;
  sol.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.y[i] = y0 * std::exp(static_cast<double>(i) * log_r);
  }
  sol.lambda = alpha * std::pow(y0, alpha - 1.0);
  finish(sol, UtilityFunction::power(alpha), delta);
  return sol;
}

TruncatedSolution solve_fixed_rule_kkt(const UtilityFunction& u, double delta,
                                       double block_reward, std::size_t n,
                                       double tol) {
  validate_window(n, block_reward);
  validate_delta(delta);
  if (!(tol > 0.0)) throw DomainError("tol must be positive");

  TruncatedSolution sol;
  sol.y.assign(n, 0.0);

  // Constant marginal utility: discounting alone decides, so the whole
  // budget goes to offset 0.
  if (u.is_linear()) {
    sol.y[0] = block_reward;
    sol.lambda = u.marginal(block_reward);
    finish(sol, u, delta);
    return sol;
  }

  const double log_delta = std::log(delta);
  const double target = block_reward;

  // Sum(lambda) is continuous and nonincreasing. At lambda_hi every
  // coordinate is at most B * 1e-16.
  double log_hi = std::log(u.marginal(block_reward * 1e-16));
  if (!std::isfinite(log_hi)) {
    throw DomainError("utility marginal is not finite near zero");
  }
  double log_lo = log_hi;
  double sum_lo = fill(u, log_lo, log_delta, sol.y);
  for (int it = 0; sum_lo < target; ++it) {
    if (it > 4000) {
      throw DomainError("budget unreachable: inverse marginal utility is bounded");
    }
    log_hi = log_lo;
    log_lo -= std::log(2.0);
    sum_lo = fill(u, log_lo, log_delta, sol.y);
  }

  double log_mid = log_lo;
  double sum_mid = sum_lo;
  for (int it = 0; it < 400; ++it) {
    if (std::abs(sum_mid - target) <= tol * target) break;
    const double next = 0.5 * (log_lo + log_hi);
    if (next <= log_lo || next >= log_hi) break;
    log_mid = next;
    sum_mid = fill(u, log_mid, log_delta, sol.y);
    if (sum_mid >= target) {
      log_lo = log_mid;
    } else {
      log_hi = log_mid;
    }
  }
  if (!(std::abs(sum_mid - target) <= tol * target)) {
    throw DomainError("multiplier bisection could not meet the budget tolerance");
  }
  // sol.y holds the fill at log_mid.
  sol.lambda = std::exp(log_mid);
  finish(sol, u, delta);
  return sol;
}

AllocationRule extend_truncated(const TruncatedSolution& sol) {
  if (sol.y.empty() || !(sol.budget_used > 0.0)) {
    throw DomainError("solution has no allocated budget");
  }
  std::vector<double> w(sol.y.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = sol.y[i] / sol.budget_used;
  return AllocationRule::custom(std::move(w));
}

double kkt_violation(const TruncatedSolution& sol, const UtilityFunction& u,
                     double delta) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.y.size(); ++i) {
    const double discount = std::pow(delta, static_cast<double>(i));
    const double y = sol.y[i];
    double v;
    if (y > 0.0) {
      if (y < std::numeric_limits<double>::min()) continue;
      v = std::abs(u.marginal(y) * discount - sol.lambda);
    } else {
      const double m0 = u.marginal(0.0);
      if (std::isinf(m0)) continue;  // underflowed interior coordinate
      v = std::max(0.0, m0 * discount - sol.lambda);
    }
    worst = std::max(worst, v / sol.lambda);
  }
  return worst;
}

}  // namespace minepool
