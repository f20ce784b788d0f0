#pragma once

// Environment parameters, utility functions and the discounted expected
// utility (DEU) primitive shared by every other module.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace minepool {

/// Raised when an argument is outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for allocation rules that pay out more than a block earns, or that
/// carry negative weights.
class InvalidRuleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for malformed experiment or command configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The mining environment: share win probability, block reward and the
/// per-share discount factor.
///
/// One share is one discount step; there is no wall-clock time in the model.
/// `p == 1` is accepted as the degenerate every-share-is-a-block stream.
class PoolParams {
 public:
  PoolParams(double p, double block_reward, double delta);

  double p() const { return p_; }
  double block_reward() const { return block_reward_; }
  double delta() const { return delta_; }

 private:
  double p_;
  double block_reward_;
  double delta_;
};

/// Checks 0 < delta < 1. Every DEU series diverges at delta == 1.
void validate_delta(double delta);

/// A concave, nondecreasing von Neumann-Morgenstern utility with u(0) = 0.
class UtilityFunction {
 public:
  enum class Kind { kPower, kLogShifted, kCustom };

  using Fn = std::function<double(double)>;

  /// u(x) = x^alpha, alpha in (0, 1]. alpha == 1 is risk neutral.
  static UtilityFunction power(double alpha);
  /// u(x) = ln(1 + x).
  static UtilityFunction log_shifted();
  /// User-supplied u, u' and (u')^-1. The caller guarantees the contract
  /// (concave, nondecreasing, u(0) = 0); only u(0) is checked.
  static UtilityFunction custom(std::string name, Fn value, Fn marginal,
                                Fn inverse_marginal);

  Kind kind() const { return kind_; }
  /// Exponent for Power utilities; 0 for other kinds.
  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }
  bool is_linear() const { return kind_ == Kind::kPower && alpha_ == 1.0; }

  double value(double x) const;
  /// u'(x). Returns +inf at x == 0 for Power with alpha < 1.
  double marginal(double x) const;
  /// (u')^-1(z), clamped to [0, inf). Returns 0 for z == inf.
  double inverse_marginal(double z) const;

 private:
  UtilityFunction() = default;

  Kind kind_ = Kind::kPower;
  double alpha_ = 0.0;
  std::string name_;
  Fn value_;
  Fn marginal_;
  Fn inverse_marginal_;
};

/// u(x) for x >= 0; throws DomainError for negative x.
double eval_utility(const UtilityFunction& u, double x);

/// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// sum_i a_i * delta^i, accumulated in ascending offset order with
/// compensated summation.
double deu(std::span<const double> expected_utilities, double delta);

}  // namespace minepool
