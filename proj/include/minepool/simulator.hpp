#pragma once

// Seeded Monte Carlo engine over Bernoulli share streams.
//
// Every trial draws `num_shares` independent shares, each a block with
// probability p, and pays blocks out either by a fixed allocation rule or by
// proportional pay. The realized DEU of share k is the discounted sum of the
// utilities of the payments it receives. Shares whose forward window runs
// past the end of the stream are excluded from every estimate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "minepool/allocation.hpp"
#include "minepool/core_model.hpp"

namespace minepool {

/// Infinite rules (geometric) are truncated at this utility error.
inline constexpr double kSimTruncationEps = 1e-9;

/// Round-based pay: a block's reward is split evenly over all shares since
/// the previous block, then the round restarts.
struct ProportionalPay {};

using PayoutScheme = std::variant<AllocationRule, ProportionalPay>;

struct SimConfig {
  PoolParams params{1e-3, 1e3, 0.999};
  UtilityFunction utility = UtilityFunction::power(0.5);
  PayoutScheme scheme = AllocationRule::solo();
  std::size_t num_shares = 1'000'000;
  std::size_t trials = 20;
  std::uint64_t seed = 0x5eed;
  /// Leading share indices reported individually.
  std::size_t report_k = 0;
  /// Trailing fraction of the counted shares averaged for the steady state.
  double steady_window = 0.5;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct KEstimate {
  double mean = 0.0;
  double se = 0.0;
};

struct UkEstimates {
  /// Mean realized DEU and standard error over trials for k < report_k.
  std::vector<KEstimate> per_k;
  double steady_mean = 0.0;
  double steady_se = 0.0;
  /// Shares with a complete forward window, per trial.
  std::size_t shares_counted = 0;
  /// Forward window (payout depth) of the scheme.
  std::size_t window = 0;
  /// Mean over trials of the least-squares slope of U_k on k across the
  /// steady window, and its standard error.
  double drift = 0.0;
  double drift_se = 0.0;
  /// Mean over trials of (second-half mean - first-half mean) of the steady
  /// window, and its standard error.
  double half_diff = 0.0;
  double half_diff_se = 0.0;
};

/// Raw reward bookkeeping for one trial, in currency units.
struct TrialTotals {
  std::size_t blocks = 0;
  std::size_t counted_shares = 0;
  double paid_counted = 0.0;
  double paid_edge = 0.0;
};

struct SimResult {
  UkEstimates estimates;
  std::vector<TrialTotals> totals;
};

struct BalanceReport {
  double mean_reward_per_share = 0.0;
  double rel_se = 0.0;
  bool balance_ok = false;
};

struct ConvergenceReport {
  bool converged = false;
  /// Steady-state utility if converged, 0 otherwise.
  double steady_state_utility = 0.0;
  bool balance_ok = false;
  double mean_reward_per_share = 0.0;
  double drift = 0.0;
  std::optional<double> analytic_hint;
  /// |steady_mean - analytic_hint| / steady_se, when a hint is given.
  std::optional<double> z_score;
};

/// Seed of trial `trial`: splitmix64(seed XOR trial). Each trial runs its own
/// std::mt19937_64 from that seed.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// Forward window of the configured scheme: the rule's truncation depth at
/// kSimTruncationEps, or for proportional pay the round length exceeded with
/// probability below kSimTruncationEps.
std::size_t forward_window(const SimConfig& cfg);

/// Runs a fixed-rule configuration. Until the stream holds a full window,
/// the payout of a block is spread over the existing shares in proportion
/// to the rule's weights, so each block still pays the rule's full mass.
SimResult simulate_fixed_rule(const SimConfig& cfg);

SimResult simulate_proportional(const SimConfig& cfg);

/// Dispatches on cfg.scheme.
SimResult simulate(const SimConfig& cfg);

/// Mean undiscounted reward per counted share against the p B bound.
BalanceReport balance_report(const SimConfig& cfg,
                             const std::vector<TrialTotals>& totals);

/// Converged iff |drift| <= 2 drift_se and |half_diff| <= 3 half_diff_se.
/// Balance fields are left unset; see assess().
ConvergenceReport convergence_report(const UkEstimates& est,
                                     std::optional<double> analytic_hint = {});

/// convergence_report() plus balance_report().
ConvergenceReport assess(const SimConfig& cfg, const SimResult& result,
                         std::optional<double> analytic_hint = {});

}  // namespace minepool
