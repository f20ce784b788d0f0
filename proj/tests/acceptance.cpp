// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from naive oracles in this file and in
// oracles.hpp, never from the code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "minepool/analytic.hpp"
#include "minepool/lambert_w.hpp"
#include "minepool/optimizer.hpp"
#include "minepool/simulator.hpp"
#include "oracles.hpp"

using namespace minepool;

namespace {

const PoolParams kDesk(1e-3, 1e3, 0.999);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> body;
};

// Explicit double sum over (a, f) for proportional pay, truncated where the
// remaining mass q^S u(B) / (1 - delta) is below 1e-15.
double proportional_double_sum(const PoolParams& params, double alpha) {
  const double p = params.p();
  const double q = 1.0 - p;
  const double delta = params.delta();
  const double u_b = std::pow(params.block_reward(), alpha);
  const auto s_max = static_cast<std::size_t>(
      std::ceil(std::log(1e-15 * (1.0 - delta) / (p * u_b)) / std::log(q)));
  double total = 0.0;
  double q_s = 1.0;
  for (std::size_t s = 0; s <= s_max; ++s) {
    double inner = 0.0;
    double delta_f = 1.0;
    for (std::size_t f = 0; f <= s; ++f) {
      inner += delta_f;
      delta_f *= delta;
    }
    total += p * p * q_s * std::pow(params.block_reward() / static_cast<double>(s + 1), alpha) *
             inner;
    q_s *= q;
  }
  return total;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome lambert_w_criterion() {
  Outcome o;
  std::mt19937_64 gen(20240601);
  const double bp = -std::exp(-1.0);
  std::uniform_real_distribution<double> dist(bp, 0.0);
  double worst = 0.0;
  int checked = 0;
  while (checked < 10000) {
    const double x = dist(gen);
    if (x <= bp || x >= 0.0) continue;
    const double w = lambert_w_minus1(x).value;
    const double residual = std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x));
    worst = std::max(worst, residual);
    o.require(residual <= 1e-12 && w <= -1.0, fmt::format("x={} residual {:.3g}", x, residual));
    ++checked;
  }
  o.require(lambert_w_minus1(bp).value == -1.0, "W(-1/e) != -1");
  if (o.pass) o.detail = fmt::format("max scaled residual {:.2e} over 10^4 points", worst);
  return o;
}

Outcome optimal_n_criterion() {
  Outcome o;
  double worst = 0.0;
  for (int a = 1; a <= 9; ++a) {
    const double alpha = a / 10.0;
    for (double delta : {0.9, 0.99, 0.999}) {
      const double n = optimal_pplns_n(PoolParams(1e-3, 1e3, delta), alpha).n_real;
      const double search = oracle::argmax_pplns(alpha, delta);
      worst = std::max(worst, std::abs(n - search));
      o.require(std::abs(n - search) <= 0.5,
                fmt::format("alpha={} delta={}: {} vs {}", alpha, delta, n, search));
    }
  }
  const auto linear = optimal_pplns_n(kDesk, 1.0);
  o.require(linear.n_int == 1 && linear.n_real == 1.0, "alpha=1 does not give N=1");
  if (o.pass) o.detail = fmt::format("max |n_real - search| = {:.2e}", worst);
  return o;
}

Outcome kkt_criterion() {
  Outcome o;
  double worst_rel = 0.0;
  for (std::size_t n : {1u, 2u, 10u, 1000u}) {
    for (double alpha : {0.3, 0.5, 0.9}) {
      for (double delta : {0.9, 0.99}) {
        const auto closed = truncated_lagrange_power(n, alpha, delta, 1.0);
        const auto kkt = solve_fixed_rule_kkt(UtilityFunction::power(alpha), delta, 1.0, n);
        for (std::size_t i = 0; i < n; ++i) {
          // Below the normal range only absolute agreement is meaningful.
          if (closed.y[i] < std::numeric_limits<double>::min()) {
            o.require(kkt.y[i] < std::numeric_limits<double>::min(),
                      fmt::format("n={} i={} underflow mismatch", n, i));
            continue;
          }
          const double rel = std::abs(kkt.y[i] - closed.y[i]) / closed.y[i];
          worst_rel = std::max(worst_rel, rel);
          o.require(rel <= 1e-8, fmt::format("n={} alpha={} delta={} i={} rel {:.3g}", n, alpha,
                                             delta, i, rel));
        }
      }
    }
  }
  double worst_abs = 0.0;
  for (double alpha : {0.3, 0.5, 0.9}) {
    for (double delta : {0.9, 0.99}) {
      const auto kkt = solve_fixed_rule_kkt(UtilityFunction::power(alpha), delta, 1.0, 10000);
      const double r = std::pow(delta, 1.0 / (1.0 - alpha));
      double x = 1.0 - r;
      for (std::size_t i = 0; i < 10000; ++i) {
        const double gap = std::abs(kkt.y[i] - x);
        worst_abs = std::max(worst_abs, gap);
        o.require(gap <= 1e-6, fmt::format("n=1e4 alpha={} delta={} i={} gap {:.3g}", alpha,
                                           delta, i, gap));
        x *= r;
      }
    }
  }
  if (o.pass) {
    o.detail = fmt::format("max rel {:.2e} vs closed form; max gap {:.2e} vs infinite rule",
                           worst_rel, worst_abs);
  }
  return o;
}

Outcome dominance_criterion() {
  Outcome o;
  double min_gap = INFINITY;
  for (int a = 1; a <= 9; ++a) {
    const double alpha = a / 10.0;
    const double n = std::round(oracle::argmax_pplns(alpha, kDesk.delta()));
    // Direct sums, independent of the closed forms.
    double pplns = 0.0;
    for (int i = 0; i < static_cast<int>(n); ++i) {
      pplns += 1e-3 * std::pow(1e3 / n, alpha) * std::pow(0.999, i);
    }
    const double r = std::pow(0.999, 1.0 / (1.0 - alpha));
    double geo_sum = 0.0;
    for (int i = 0; i < 2'000'000; ++i) {
      const double term = 1e-3 * std::pow(1e3 * (1.0 - r) * std::pow(r, i), alpha) *
                          std::pow(0.999, i);
      geo_sum += term;
      if (term < 1e-18) break;
    }
    const double geo = geometric_steady_state_utility(kDesk, alpha);
    const double opt = optimal_pplns_n(kDesk, alpha).utility_at_n_int;
    const double solo = solo_utility(kDesk, UtilityFunction::power(alpha));
    o.require(std::abs(geo - geo_sum) <= 1e-9 * geo, fmt::format("alpha={} geometric sum", alpha));
    o.require(opt >= pplns * (1.0 - 1e-12), fmt::format("alpha={} PPLNS below search", alpha));
    o.require(geo > opt && opt > solo, fmt::format("alpha={}: {} {} {}", alpha, geo, opt, solo));
    min_gap = std::min({min_gap, geo - opt, opt - solo});
  }
  if (o.pass) o.detail = fmt::format("strict at every alpha, smallest gap {:.3e}", min_gap);
  return o;
}

struct DeskRuns {
  bool done = false;
  std::vector<bool> balance_ok;
};
DeskRuns g_desk;

Outcome simulation_criterion() {
  Outcome o;
  const double alpha = 0.5;
  const auto n_star = optimal_pplns_n(kDesk, alpha).n_int;
  const double r = std::pow(0.999, 2.0);
  const auto pplns_oracle = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n_star; ++i) {
      s += 1e-3 * std::sqrt(1e3 / static_cast<double>(n_star)) * std::pow(0.999, i);
    }
    return s;
  }();
  struct Case {
    const char* name;
    PayoutScheme scheme;
    double oracle;
    bool fixed;
  };
  const Case cases[] = {
      {"solo", AllocationRule::solo(), 1e-3 * std::sqrt(1e3), true},
      {"pplns", AllocationRule::pplns(n_star), pplns_oracle, true},
      {"geometric", geometric_optimal_rule(alpha, 0.999),
       1e-3 * std::sqrt(1e3) * std::pow(1.0 - r, -0.5), true},
      {"proportional", ProportionalPay{}, proportional_double_sum(kDesk, alpha), false},
  };
  std::string summary;
  for (const auto& c : cases) {
    SimConfig cfg;
    cfg.params = kDesk;
    cfg.utility = UtilityFunction::power(alpha);
    cfg.scheme = c.scheme;
    cfg.num_shares = 1'000'000;
    cfg.trials = 20;
    cfg.seed = 0x5eed;
    const auto result = simulate(cfg);
    const auto report = assess(cfg, result, c.oracle);
    const double z = *report.z_score;
    o.require(z <= 3.0, fmt::format("{}: z = {:.2f}", c.name, z));
    if (c.fixed) {
      o.require(report.converged, fmt::format("{}: not converged", c.name));
      o.require(report.balance_ok, fmt::format("{}: balance", c.name));
    }
    g_desk.balance_ok.push_back(report.balance_ok);
    summary += fmt::format("{}{} z={:.2f}", summary.empty() ? "" : ", ", c.name, z);
  }
  g_desk.done = true;
  if (o.pass) o.detail = summary;
  return o;
}

Outcome mass_balance_criterion() {
  Outcome o;
  double worst = 0.0;
  for (int a = 1; a < 100; ++a) {
    for (double delta : {0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999}) {
      const double m = mass(geometric_optimal_rule(a / 100.0, delta));
      worst = std::max(worst, std::abs(m - 1.0));
      o.require(std::abs(m - 1.0) <= 1e-12, fmt::format("alpha={} delta={}", a / 100.0, delta));
    }
  }
  o.require(g_desk.done, "desk runs missing");
  for (bool ok : g_desk.balance_ok) o.require(ok, "simulated balance violated");
  if (o.pass) {
    o.detail = fmt::format("max |mass-1| {:.1e}; balance ok in {} desk runs", worst,
                           g_desk.balance_ok.size());
  }
  return o;
}

Outcome epsilon_criterion() {
  Outcome o;
  const double eps = 1e-6;
  double worst = 0.0;
  for (int a = 1; a <= 9; ++a) {
    const double alpha = a / 10.0;
    const auto u = UtilityFunction::power(alpha);
    const auto rule = geometric_optimal_rule(alpha, kDesk.delta());
    const std::size_t depth = truncation_depth(rule, kDesk, u, eps);
    const double r = std::pow(kDesk.delta(), 1.0 / (1.0 - alpha));
    // Discarded tail, summed directly.
    double tail = 0.0;
    for (std::size_t i = depth; i < depth + 5'000'000; ++i) {
      const double term = 1e-3 * std::pow(1e3 * (1.0 - r) * std::pow(r, static_cast<double>(i)),
                                          alpha) *
                          std::pow(kDesk.delta(), static_cast<double>(i));
      tail += term;
      if (term < 1e-20) break;
    }
    const double full = geometric_steady_state_utility(kDesk, alpha);
    const double cut = fixed_rule_steady_state_utility(truncate(rule, depth), kDesk, u, 1e-300);
    const double change = std::abs(full - cut);
    worst = std::max(worst, change);
    o.require(change <= eps, fmt::format("alpha={} change {:.3g}", alpha, change));
    o.require(tail <= eps, fmt::format("alpha={} tail {:.3g}", alpha, tail));
  }
  if (o.pass) o.detail = fmt::format("max utility change {:.2e}", worst);
  return o;
}

Outcome monotonicity_criterion() {
  Outcome o;
  const std::vector<double> deltas{0.5, 0.8, 0.9, 0.95, 0.99, 0.995, 0.999, 0.9999, 0.99999};
  for (double delta : deltas) {
    double prev = INFINITY;
    for (int a = 1; a < 100; ++a) {
      const double n = optimal_pplns_n(PoolParams(1e-3, 1e3, delta), a / 100.0).n_real;
      o.require(n <= prev, fmt::format("alpha not monotone at delta={} alpha={}", delta, a));
      prev = n;
    }
  }
  for (int a = 1; a < 100; ++a) {
    double prev = 0.0;
    for (double delta : deltas) {
      const double n = optimal_pplns_n(PoolParams(1e-3, 1e3, delta), a / 100.0).n_real;
      o.require(n >= prev, fmt::format("delta not monotone at alpha={} delta={}", a, delta));
      prev = n;
    }
  }
  for (int a = 1; a <= 9; ++a) {
    for (double delta : {0.9, 0.99, 0.999}) {
      std::size_t reference = 0;
      for (double p : {1e-2, 1e-4}) {
        for (double b : {1.0, 1e6}) {
          const auto n = optimal_pplns_n(PoolParams(p, b, delta), a / 10.0).n_int;
          if (reference == 0) reference = n;
          o.require(n == reference, fmt::format("argmax moved at p={} B={}", p, b));
        }
      }
    }
  }
  if (o.pass) o.detail = "alpha and delta grids monotone; argmax invariant under p and B";
  return o;
}

Outcome cli_criterion() {
  Outcome o;
  auto run = [](const std::vector<std::string>& args, std::string* out = nullptr) {
    std::ostringstream os;
    std::ostringstream es;
    const int code = cli::run_cli(args, os, es);
    if (out) *out = os.str();
    return code;
  };
  const std::filesystem::path dir(MINEPOOL_GOLDEN_DIR);
  const std::pair<std::vector<std::string>, const char*> goldens[] = {
      {{"sweep"}, "sweep_analytic.csv"},
      {{"sweep", "--simulate"}, "sweep_simulated.csv"},
      {{"payoff"}, "payoff.csv"},
  };
  for (const auto& [args, file] : goldens) {
    std::string out;
    o.require(run(args, &out) == 0, fmt::format("{} failed", file));
    o.require(out == read_file(dir / file), fmt::format("{} differs", file));
  }
  o.require(run({"optimize", "--delta", "1"}) == 2, "bad delta did not exit 2");
  o.require(run({"simulate", "/nonexistent/config.json"}) == 2, "missing config did not exit 2");
  o.require(run({"sweep", "--alphas", "0,0.5"}) == 2, "bad alpha did not exit 2");
  o.require(run({"evaluate", "--rule", R"({"kind":"custom","weights":[0.5,0.6]})"}) == 3,
            "mass > 1 did not exit 3");
  if (o.pass) o.detail = "3 goldens byte-identical; exit codes 2 and 3 fire";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Lambert W correctness", 1.0, lambert_w_criterion},
      {2, "optimal N closed form vs search", 1.0, optimal_n_criterion},
      {3, "KKT solver vs closed form", 5.0, kkt_criterion},
      {4, "dominance geometric > PPLNS > solo", 1.0, dominance_criterion},
      {5, "simulation vs analytic at desk scale", 120.0, simulation_criterion},
      {6, "mass and balance invariants", 1.0, mass_balance_criterion},
      {7, "epsilon-approximation", 1.0, epsilon_criterion},
      {8, "monotonicity and p/B invariance", 1.0, monotonicity_criterion},
      {9, "CLI goldens and exit codes", INFINITY, cli_criterion},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt::format(" (over the {:g} s budget)", c.budget_s);
    }
    failures += o.pass ? 0 : 1;
    fmt::print("{} criterion {}: {} [{:.2f} s] {}\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
               secs, o.detail);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
