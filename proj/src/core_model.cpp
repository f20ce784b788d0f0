#include "minepool/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace minepool {

PoolParams::PoolParams(double p, double block_reward, double delta)
    : p_(p), block_reward_(block_reward), delta_(delta) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("p must lie in (0, 1]");
  }
  if (!(block_reward > 0.0) || !std::isfinite(block_reward)) {
    throw DomainError("B must be positive and finite");
  }
  validate_delta(delta);
}

void validate_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
}

UtilityFunction UtilityFunction::power(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in (0, 1]");
  }
  UtilityFunction u;
  u.kind_ = Kind::kPower;
  u.alpha_ = alpha;
  u.name_ = "power";
  return u;
}

UtilityFunction UtilityFunction::log_shifted() {
  UtilityFunction u;
  u.kind_ = Kind::kLogShifted;
  u.name_ = "log_shifted";
  return u;
}

UtilityFunction UtilityFunction::custom(std::string name, Fn value, Fn marginal,
                                        Fn inverse_marginal) {
  if (!value || !marginal || !inverse_marginal) {
    throw DomainError("custom utility needs u, u' and (u')^-1");
  }
  if (value(0.0) != 0.0) {
    throw DomainError("custom utility must satisfy u(0) = 0");
  }
  UtilityFunction u;
  u.kind_ = Kind::kCustom;
  u.name_ = std::move(name);
  u.value_ = std::move(value);
  u.marginal_ = std::move(marginal);
  u.inverse_marginal_ = std::move(inverse_marginal);
  return u;
}

double UtilityFunction::value(double x) const {
  switch (kind_) {
    case Kind::kPower:
      if (x == 0.0) return 0.0;
      return alpha_ == 1.0 ? x : std::pow(x, alpha_);
    case Kind::kLogShifted:
      return std::log1p(x);
    case Kind::kCustom:
      return value_(x);
  }
  return 0.0;
}

double UtilityFunction::marginal(double x) const {
  switch (kind_) {
    case Kind::kPower:
      if (alpha_ == 1.0) return 1.0;
      if (x == 0.0) return std::numeric_limits<double>::infinity();
      return alpha_ * std::pow(x, alpha_ - 1.0);
    case Kind::kLogShifted:
      return 1.0 / (1.0 + x);
    case Kind::kCustom:
      return marginal_(x);
  }
  return 0.0;
}

double UtilityFunction::inverse_marginal(double z) const {
  if (std::isinf(z)) return 0.0;
  switch (kind_) {
    case Kind::kPower:
      if (alpha_ == 1.0) {
        // u' is the constant 1: any amount is optimal at z == 1.
        if (z < 1.0) return std::numeric_limits<double>::infinity();
        return 0.0;
      }
      return std::pow(z / alpha_, 1.0 / (alpha_ - 1.0));
    case Kind::kLogShifted:
      return std::max(0.0, 1.0 / z - 1.0);
    case Kind::kCustom:
      return std::max(0.0, inverse_marginal_(z));
  }
  return 0.0;
}

double eval_utility(const UtilityFunction& u, double x) {
  if (!(x >= 0.0)) {
    throw DomainError("utility argument must be nonnegative");
  }
  return u.value(x);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double deu(std::span<const double> expected_utilities, double delta) {
  validate_delta(delta);
  CompensatedSum acc;
  for (std::size_t i = 0; i < expected_utilities.size(); ++i) {
    acc.add(expected_utilities[i] * std::pow(delta, static_cast<double>(i)));
  }
  return acc.value();
}

}  // namespace minepool
