#pragma once

// Fixed-rule allocation schemes. A rule pays the fraction w_i of the block
// reward to the i-th share preceding a block (offset 0 is the block share
// itself), independently of any pool state.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minepool/core_model.hpp"

namespace minepool {

/// Tolerance on the total payout fraction of a rule.
inline constexpr double kMassTolerance = 1e-12;

/// Per-offset reward fractions for a finite window.
struct RewardProfile {
  std::vector<double> weights;
};

class AllocationRule {
 public:
  struct Solo {};
  struct Pplns {
    std::size_t n;
  };
  struct Geometric {
    double c;
    double r;
  };
  struct Custom {
    RewardProfile profile;
  };
  using Kind = std::variant<Solo, Pplns, Geometric, Custom>;

  static AllocationRule solo();
  /// Pay-per-last-N-shares: w_i = 1/N for i < N.
  static AllocationRule pplns(std::size_t n);
  /// w_i = c r^i with c in (0, 1], r in (0, 1) and c / (1 - r) <= 1.
  static AllocationRule geometric(double c, double r);
  static AllocationRule custom(std::vector<double> weights);

  const Kind& kind() const { return kind_; }
  std::string name() const;

  /// Number of offsets with (possibly) nonzero weight, or nullopt for
  /// infinite rules.
  std::optional<std::size_t> natural_window() const;

 private:
  explicit AllocationRule(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
};

/// w_i; zero beyond the window of finite rules.
double weight(const AllocationRule& rule, std::size_t i);

/// sum_i w_i. Throws InvalidRuleError if the rule pays more than a block.
double mass(const AllocationRule& rule);

/// Smallest d with u(B) delta^d / (1 - delta) < eps, capped at the natural
/// window of finite rules and never below 1. Truncating the rule at depth d
/// moves every share's utility by less than eps.
std::size_t truncation_depth(const AllocationRule& rule,
                             const PoolParams& params,
                             const UtilityFunction& u, double eps);

/// The first `depth` weights of `rule` as a Custom rule.
AllocationRule truncate(const AllocationRule& rule, std::size_t depth);

/// Weights w_0 .. w_{depth-1}.
std::vector<double> weights(const AllocationRule& rule, std::size_t depth);

}  // namespace minepool
