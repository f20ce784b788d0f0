#include "minepool/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace minepool {
namespace {

// Per-trial output, merged in trial order.
struct TrialOutput {
  std::vector<double> leading;  // realized DEU of shares k < report_k
  double window_mean = 0.0;
  double slope = 0.0;
  double half_diff = 0.0;
  TrialTotals totals;
};

class ShareStream {
 public:
  explicit ShareStream(std::uint64_t seed, double p) : gen_(seed), p_(p) {}

  bool next_is_block() {
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return u < p_;
  }

 private:
  std::mt19937_64 gen_;
  double p_;
};

void validate(const SimConfig& cfg, std::size_t window) {
  if (cfg.trials == 0) throw ConfigError("trials must be at least 1");
  if (!(cfg.steady_window > 0.0 && cfg.steady_window < 1.0)) {
    throw ConfigError("steady_window must lie in (0, 1)");
  }
  // At least four counted shares so the steady window has two halves.
  if (cfg.num_shares < window + 3) {
    throw ConfigError("num_shares (" + std::to_string(cfg.num_shares) +
                      ") must exceed the payout window (" +
                      std::to_string(window) + ") by at least 3");
  }
}

// Summaries of the realized DEU of counted shares [0, counted).
void summarize(const SimConfig& cfg, const std::vector<double>& realized,
               std::size_t counted, TrialOutput& out) {
  const std::size_t lead = std::min(cfg.report_k, counted);
  out.leading.assign(realized.begin(), realized.begin() + lead);

  auto len = static_cast<std::size_t>(
      std::ceil(cfg.steady_window * static_cast<double>(counted)));
  len = std::clamp<std::size_t>(len, 4, counted);
  const std::size_t begin = counted - len;
  const std::size_t half = len / 2;

  CompensatedSum total;
  CompensatedSum first;
  CompensatedSum second;
  for (std::size_t j = 0; j < len; ++j) {
    const double v = realized[begin + j];
    total.add(v);
    (j < half ? first : second).add(v);
  }
  const double n = static_cast<double>(len);
  out.window_mean = total.value() / n;
  out.half_diff = second.value() / static_cast<double>(len - half) -
                  first.value() / static_cast<double>(half);

  // Least-squares slope on the centred index.
  const double centre = 0.5 * (n - 1.0);
  CompensatedSum cross;
  for (std::size_t j = 0; j < len; ++j) {
    cross.add((static_cast<double>(j) - centre) *
              (realized[begin + j] - out.window_mean));
  }
  const double sxx = n * (n * n - 1.0) / 12.0;
  out.slope = cross.value() / sxx;
}

TrialOutput run_fixed_trial(const SimConfig& cfg, const AllocationRule& rule,
                            std::size_t window, std::size_t trial) {
  const double big_b = cfg.params.block_reward();
  const double delta = cfg.params.delta();
  const std::size_t shares = cfg.num_shares;
  const std::size_t counted = shares - window + 1;
  const std::size_t last_counted = counted - 1;

  const std::vector<double> w = weights(rule, window);
  std::vector<double> utility_term(window);
  std::vector<double> reward_prefix(window + 1, 0.0);
  CompensatedSum mass_acc;
  for (std::size_t i = 0; i < window; ++i) {
    utility_term[i] = cfg.utility.value(big_b * w[i]) *
                      std::pow(delta, static_cast<double>(i));
    reward_prefix[i + 1] = reward_prefix[i] + big_b * w[i];
    mass_acc.add(w[i]);
  }
  const double window_mass = mass_acc.value();

  std::vector<double> realized(shares, 0.0);
  ShareStream stream(trial_seed(cfg.seed, trial), cfg.params.p());
  TrialOutput out;
  CompensatedSum paid_counted;
  CompensatedSum paid_edge;

  double warm_prefix = 0.0;  // sum of w_0..w_t while t < window
  for (std::size_t t = 0; t < shares; ++t) {
    if (t < window) warm_prefix += w[t];
    if (!stream.next_is_block()) continue;
    ++out.totals.blocks;

    if (t + 1 >= window) {
      double* dst = realized.data() + (t + 1 - window);
      for (std::size_t i = 0; i < window; ++i) {
        dst[window - 1 - i] += utility_term[i];
      }
      // Offsets i >= first_counted land on counted shares.
      const std::size_t first_counted =
          t > last_counted ? std::min(window, t - last_counted) : 0;
      paid_counted.add(reward_prefix[window] - reward_prefix[first_counted]);
      paid_edge.add(reward_prefix[first_counted]);
      continue;
    }

    // Warm-up: only shares 0..t exist.
    if (!(warm_prefix > 0.0)) continue;
    const double scale = window_mass / warm_prefix;
    for (std::size_t i = 0; i <= t; ++i) {
      const double x = big_b * w[i] * scale;
      realized[t - i] +=
          cfg.utility.value(x) * std::pow(delta, static_cast<double>(i));
      (t - i <= last_counted ? paid_counted : paid_edge).add(x);
    }
  }

  out.totals.counted_shares = counted;
  out.totals.paid_counted = paid_counted.value();
  out.totals.paid_edge = paid_edge.value();
  summarize(cfg, realized, counted, out);
  return out;
}

TrialOutput run_proportional_trial(const SimConfig& cfg, std::size_t window,
                                   std::size_t trial) {
  const double big_b = cfg.params.block_reward();
  const double delta = cfg.params.delta();
  const std::size_t shares = cfg.num_shares;
  const std::size_t counted = shares - window + 1;
  const std::size_t last_counted = counted - 1;

  std::vector<double> realized(shares, 0.0);
  ShareStream stream(trial_seed(cfg.seed, trial), cfg.params.p());
  TrialOutput out;
  CompensatedSum paid_counted;
  CompensatedSum paid_edge;

  std::size_t round_start = 0;
  for (std::size_t t = 0; t < shares; ++t) {
    if (!stream.next_is_block()) continue;
    ++out.totals.blocks;
    const std::size_t len = t - round_start + 1;
    const double x = big_b / static_cast<double>(len);
    const double ux = cfg.utility.value(x);
    double discount = 1.0;
    for (std::size_t k = t + 1; k-- > round_start;) {
      realized[k] += ux * discount;
      discount *= delta;
    }
    const std::size_t in_counted =
        t <= last_counted ? len
                          : (round_start <= last_counted ? last_counted - round_start + 1 : 0);
    paid_counted.add(x * static_cast<double>(in_counted));
    paid_edge.add(x * static_cast<double>(len - in_counted));
    round_start = t + 1;
  }

  out.totals.counted_shares = counted;
  out.totals.paid_counted = paid_counted.value();
  out.totals.paid_edge = paid_edge.value();
  summarize(cfg, realized, counted, out);
  return out;
}

template <class TrialFn>
std::vector<TrialOutput> run_trials(const SimConfig& cfg, TrialFn run) {
  std::vector<TrialOutput> outputs(cfg.trials);
  unsigned workers = cfg.threads != 0 ? cfg.threads
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.trials));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < cfg.trials; r = next++) {
      try {
        outputs[r] = run(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return outputs;
}

KEstimate mean_and_se(const std::vector<double>& xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  const double n = static_cast<double>(xs.size());
  KEstimate out{acc.value() / n, 0.0};
  if (xs.size() > 1) {
    CompensatedSum sq;
    for (double x : xs) sq.add((x - out.mean) * (x - out.mean));
    out.se = std::sqrt(sq.value() / (n - 1.0) / n);
  }
  return out;
}

SimResult merge(std::size_t window,
                const std::vector<TrialOutput>& outputs) {
  SimResult result;
  UkEstimates& est = result.estimates;
  est.window = window;
  est.shares_counted = outputs.front().totals.counted_shares;

  const std::size_t lead = outputs.front().leading.size();
  std::vector<double> column(outputs.size());
  est.per_k.resize(lead);
  for (std::size_t k = 0; k < lead; ++k) {
    for (std::size_t r = 0; r < outputs.size(); ++r) column[r] = outputs[r].leading[k];
    est.per_k[k] = mean_and_se(column);
  }

  auto collect = [&](auto field) {
    for (std::size_t r = 0; r < outputs.size(); ++r) column[r] = field(outputs[r]);
    return mean_and_se(column);
  };
  const KEstimate steady = collect([](const TrialOutput& o) { return o.window_mean; });
  const KEstimate drift = collect([](const TrialOutput& o) { return o.slope; });
  const KEstimate halves = collect([](const TrialOutput& o) { return o.half_diff; });
  est.steady_mean = steady.mean;
  est.steady_se = steady.se;
  est.drift = drift.mean;
  est.drift_se = drift.se;
  est.half_diff = halves.mean;
  est.half_diff_se = halves.se;

  result.totals.reserve(outputs.size());
  for (const auto& o : outputs) result.totals.push_back(o.totals);
  return result;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  std::uint64_t z = seed ^ static_cast<std::uint64_t>(trial);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t forward_window(const SimConfig& cfg) {
  if (const auto* rule = std::get_if<AllocationRule>(&cfg.scheme)) {
    return truncation_depth(*rule, cfg.params, cfg.utility, kSimTruncationEps);
  }
  const double p = cfg.params.p();
  if (p >= 1.0) return 1;
  return static_cast<std::size_t>(
      std::ceil(std::log(kSimTruncationEps) / std::log1p(-p)));
}

SimResult simulate_fixed_rule(const SimConfig& cfg) {
  const auto* rule = std::get_if<AllocationRule>(&cfg.scheme);
  if (rule == nullptr) throw ConfigError("simulate_fixed_rule needs a fixed allocation rule");
  mass(*rule);
  const std::size_t window = forward_window(cfg);
  validate(cfg, window);
  auto outputs = run_trials(cfg, [&](std::size_t r) {
    return run_fixed_trial(cfg, *rule, window, r);
  });
  return merge(window, outputs);
}

SimResult simulate_proportional(const SimConfig& cfg) {
  if (!std::holds_alternative<ProportionalPay>(cfg.scheme)) {
    throw ConfigError("simulate_proportional needs the proportional-pay scheme");
  }
  const std::size_t window = forward_window(cfg);
  validate(cfg, window);
  auto outputs = run_trials(cfg, [&](std::size_t r) {
    return run_proportional_trial(cfg, window, r);
  });
  return merge(window, outputs);
}

SimResult simulate(const SimConfig& cfg) {
  if (std::holds_alternative<ProportionalPay>(cfg.scheme)) {
    return simulate_proportional(cfg);
  }
  return simulate_fixed_rule(cfg);
}

BalanceReport balance_report(const SimConfig& cfg,
                             const std::vector<TrialTotals>& totals) {
  if (totals.empty()) throw ConfigError("no trials to assess");
  std::vector<double> per_trial(totals.size());
  for (std::size_t r = 0; r < totals.size(); ++r) {
    per_trial[r] = totals[r].paid_counted / static_cast<double>(totals[r].counted_shares);
  }
  const KEstimate m = mean_and_se(per_trial);
  BalanceReport out;
  out.mean_reward_per_share = m.mean;
  out.rel_se = m.mean > 0.0 ? m.se / m.mean : 0.0;
  const double bound = cfg.params.p() * cfg.params.block_reward();
  out.balance_ok = m.mean <= bound * (1.0 + 3.0 * out.rel_se);
  return out;
}

ConvergenceReport convergence_report(const UkEstimates& est,
                                     std::optional<double> analytic_hint) {
  ConvergenceReport out;
  // Rounding floor so that a noiseless stream (SE == 0) can still converge.
  const double floor = 1e-12 * std::abs(est.steady_mean);
  const bool flat = std::abs(est.drift) <= 2.0 * est.drift_se + floor;
  const bool halves_agree = std::abs(est.half_diff) <= 3.0 * est.half_diff_se + floor;
  out.converged = flat && halves_agree;
  out.steady_state_utility = out.converged ? est.steady_mean : 0.0;
  out.drift = est.drift;
  if (analytic_hint) {
    out.analytic_hint = analytic_hint;
    const double gap = std::abs(est.steady_mean - *analytic_hint);
    out.z_score = est.steady_se > 0.0 ? gap / est.steady_se
                                      : (gap == 0.0 ? 0.0 : HUGE_VAL);
  }
  return out;
}

ConvergenceReport assess(const SimConfig& cfg, const SimResult& result,
                         std::optional<double> analytic_hint) {
  ConvergenceReport out = convergence_report(result.estimates, analytic_hint);
  const BalanceReport balance = balance_report(cfg, result.totals);
  out.balance_ok = balance.balance_ok;
  out.mean_reward_per_share = balance.mean_reward_per_share;
  return out;
}

}  // namespace minepool
