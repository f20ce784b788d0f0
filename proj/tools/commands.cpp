#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "minepool/analytic.hpp"
#include "minepool/optimizer.hpp"

namespace minepool::cli {

using nlohmann::json;

std::string version() { return MINEPOOL_VERSION; }

json rule_to_json(const AllocationRule& rule) {
  return std::visit(
      [](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, AllocationRule::Solo>) {
          return {{"kind", "solo"}};
        } else if constexpr (std::is_same_v<T, AllocationRule::Pplns>) {
          return {{"kind", "pplns"}, {"n", k.n}};
        } else if constexpr (std::is_same_v<T, AllocationRule::Geometric>) {
          return {{"kind", "geometric"}, {"c", k.c}, {"r", k.r}};
        } else {
          return {{"kind", "custom"}, {"weights", k.profile.weights}};
        }
      },
      rule.kind());
}

namespace {

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(fmt::format("rule is missing \"{}\"", key));
  return j.at(key);
}

double number_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) throw ConfigError(fmt::format("rule field \"{}\" must be a number", key));
  return v.get<double>();
}

std::string rule_kind(const json& j) {
  if (!j.is_object()) throw ConfigError("rule must be a JSON object");
  const json& kind = field(j, "kind");
  if (!kind.is_string()) throw ConfigError("rule field \"kind\" must be a string");
  return kind.get<std::string>();
}

}  // namespace

AllocationRule rule_from_json(const json& j) {
  const std::string kind = rule_kind(j);
  if (kind == "solo") return AllocationRule::solo();
  if (kind == "pplns") {
    const json& n = field(j, "n");
    if (!n.is_number_integer() || n.get<long long>() < 1) {
      throw ConfigError("rule field \"n\" must be a positive integer");
    }
    return AllocationRule::pplns(n.get<std::size_t>());
  }
  if (kind == "geometric") {
    return AllocationRule::geometric(number_field(j, "c"), number_field(j, "r"));
  }
  if (kind == "custom") {
    const json& w = field(j, "weights");
    if (!w.is_array()) throw ConfigError("rule field \"weights\" must be an array");
    std::vector<double> weights;
    for (const auto& x : w) {
      if (!x.is_number()) throw ConfigError("rule weights must be numbers");
      weights.push_back(x.get<double>());
    }
    return AllocationRule::custom(std::move(weights));
  }
  throw ConfigError(fmt::format("unknown rule kind \"{}\"", kind));
}

PayoutScheme scheme_from_json(const json& j) {
  if (rule_kind(j) == "proportional") return ProportionalPay{};
  return rule_from_json(j);
}

UtilityFunction parse_utility(const std::string& descriptor) {
  if (descriptor == "log") return UtilityFunction::log_shifted();
  const std::string prefix = "power:";
  if (descriptor.rfind(prefix, 0) == 0) {
    const std::string value = descriptor.substr(prefix.size());
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw ConfigError(fmt::format("utility \"{}\": bad exponent", descriptor));
    }
    return UtilityFunction::power(alpha);
  }
  throw ConfigError(
      fmt::format("utility \"{}\": expected power:<alpha> or log", descriptor));
}

json load_json(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(fmt::format("malformed JSON: {}", e.what()));
    }
  }
  std::ifstream in(text);
  if (!in) throw ConfigError(fmt::format("cannot open \"{}\"", text));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed JSON in \"{}\": {}", text, e.what()));
  }
}

namespace {

// Desk-scale defaults.
constexpr double kDeskP = 1e-3;
constexpr double kDeskB = 1e3;
constexpr double kDeskDelta = 0.999;
constexpr std::size_t kDeskShares = 1'000'000;
constexpr std::size_t kDeskTrials = 20;
constexpr std::uint64_t kDeskSeed = 0x5eed;

std::string num(double x) { return fmt::format("{:.10g}", x); }

json report(const std::string& command, json inputs, json results,
            std::optional<std::uint64_t> seed = {}) {
  json out;
  out["command"] = command;
  out["version"] = version();
  out["seed"] = seed ? json(*seed) : json(nullptr);
  out["inputs"] = std::move(inputs);
  out["results"] = std::move(results);
  return out;
}

void write_to(const std::string& path, std::ostream& out,
              const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw ConfigError(fmt::format("cannot write \"{}\"", path));
  body(file);
}

struct PoolOptions {
  double p = kDeskP;
  double block_reward = kDeskB;
  double delta = kDeskDelta;

  void attach(CLI::App* cmd) {
    cmd->add_option("--p", p, "Probability that a share is a block")->capture_default_str();
    cmd->add_option("--B,--block-reward", block_reward, "Block reward")->capture_default_str();
    cmd->add_option("--delta", delta, "Per-share discount factor")->capture_default_str();
  }
  PoolParams params() const { return PoolParams(p, block_reward, delta); }
  json echo() const { return {{"p", p}, {"B", block_reward}, {"delta", delta}}; }
};

struct UtilityOptions {
  double alpha = 0.5;
  std::string descriptor;

  void attach(CLI::App* cmd) {
    auto* alpha_opt =
        cmd->add_option("--alpha", alpha, "Power utility exponent")->capture_default_str();
    cmd->add_option("--utility", descriptor, "power:<alpha> or log")->excludes(alpha_opt);
  }
  UtilityFunction utility() const {
    return descriptor.empty() ? UtilityFunction::power(alpha) : parse_utility(descriptor);
  }
  std::string label() const {
    return descriptor.empty() ? fmt::format("power:{}", alpha) : descriptor;
  }
};

// ---------------------------------------------------------------- optimize

struct OptimizeCmd {
  PoolOptions pool;
  double alpha = 0.5;

  void attach(CLI::App* cmd) {
    pool.attach(cmd);
    cmd->add_option("--alpha", alpha, "Power utility exponent")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const auto params = pool.params();
    const auto u = UtilityFunction::power(alpha);
    const auto opt = optimal_pplns_n(params, alpha);

    json geometric;
    if (alpha < 1.0) {
      const auto rule = geometric_optimal_rule(alpha, params.delta());
      const auto& g = std::get<AllocationRule::Geometric>(rule.kind());
      geometric = {{"rule", rule_to_json(rule)},
                   {"c", g.c},
                   {"r", g.r},
                   {"mass", mass(rule)},
                   {"utility", geometric_steady_state_utility(params, alpha)}};
    } else {
      geometric = {{"rule", rule_to_json(AllocationRule::solo())},
                   {"degenerate", "solo"},
                   {"mass", 1.0},
                   {"utility", solo_utility(params, u)}};
    }
    json results = {
        {"solo", {{"rule", rule_to_json(AllocationRule::solo())}, {"utility", solo_utility(params, u)}}},
        {"pplns",
         {{"rule", rule_to_json(AllocationRule::pplns(opt.n_int))},
          {"n_real", opt.n_real},
          {"n_int", opt.n_int},
          {"utility", opt.utility_at_n_int}}},
        {"geometric", geometric}};
    json inputs = pool.echo();
    inputs["alpha"] = alpha;
    out << report("optimize", inputs, results).dump(2) << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCmd {
  PoolOptions pool;
  UtilityOptions util;
  std::string rule_text;
  double eps = 1e-9;

  void attach(CLI::App* cmd) {
    pool.attach(cmd);
    util.attach(cmd);
    cmd->add_option("--rule", rule_text, "Rule as JSON text or a path to a JSON file")->required();
    cmd->add_option("--eps", eps, "Truncation error for infinite rules")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const auto params = pool.params();
    const auto u = util.utility();
    const json rule_json = load_json(rule_text);
    const auto rule = rule_from_json(rule_json);
    const std::size_t depth = truncation_depth(rule, params, u, eps);
    json results = {{"rule", rule_to_json(rule)},
                    {"utility", fixed_rule_steady_state_utility(rule, params, u, eps)},
                    {"mass", mass(rule)},
                    {"truncation_depth", depth}};
    json inputs = pool.echo();
    inputs["utility"] = util.label();
    inputs["rule"] = rule_json;
    inputs["eps"] = eps;
    out << report("evaluate", inputs, results).dump(2) << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------- simulate

std::optional<double> analytic_utility(const SimConfig& cfg) {
  if (std::holds_alternative<ProportionalPay>(cfg.scheme)) {
    return proportional_pay_expected_utility(cfg.params, cfg.utility, 1e-12);
  }
  return fixed_rule_steady_state_utility(std::get<AllocationRule>(cfg.scheme), cfg.params,
                                         cfg.utility, 1e-12);
}

json scheme_to_json(const PayoutScheme& scheme) {
  if (std::holds_alternative<ProportionalPay>(scheme)) return {{"kind", "proportional"}};
  return rule_to_json(std::get<AllocationRule>(scheme));
}

void write_per_k(std::ostream& os, const UkEstimates& est) {
  os << "k,mean,se\n";
  for (std::size_t k = 0; k < est.per_k.size(); ++k) {
    os << k << ',' << num(est.per_k[k].mean) << ',' << num(est.per_k[k].se) << '\n';
  }
}

json simulation_results(const SimConfig& cfg, const SimResult& result,
                        std::optional<double> hint) {
  const auto report = assess(cfg, result, hint);
  const auto balance = balance_report(cfg, result.totals);
  const auto& est = result.estimates;
  return {{"converged", report.converged},
          {"steady_state_utility", report.steady_state_utility},
          {"steady_mean", est.steady_mean},
          {"steady_se", est.steady_se},
          {"shares_counted", est.shares_counted},
          {"window", est.window},
          {"drift", est.drift},
          {"drift_se", est.drift_se},
          {"half_diff", est.half_diff},
          {"half_diff_se", est.half_diff_se},
          {"balance_ok", report.balance_ok},
          {"mean_reward_per_share", report.mean_reward_per_share},
          {"reward_rel_se", balance.rel_se},
          {"analytic_hint", hint ? json(*hint) : json(nullptr)},
          {"z_score", report.z_score ? json(*report.z_score) : json(nullptr)}};
}

struct SimulateCmd {
  std::string config_path;
  PoolOptions pool;
  UtilityOptions util;
  std::string rule_text;
  std::size_t num_shares = kDeskShares;
  std::size_t trials = kDeskTrials;
  std::uint64_t seed = kDeskSeed;
  std::size_t report_k = 100;
  double steady_window = 0.5;
  unsigned threads = 0;
  std::string csv_path;
  std::string json_path = "-";
  CLI::App* cmd = nullptr;

  void attach(CLI::App* c) {
    cmd = c;
    cmd->add_option("config", config_path, "JSON config file; flags override its values");
    pool.attach(cmd);
    util.attach(cmd);
    cmd->add_option("--rule", rule_text, "Rule JSON text or file; kind may be \"proportional\"");
    cmd->add_option("--num-shares", num_shares, "Shares per trial")->capture_default_str();
    cmd->add_option("--trials", trials, "Independent trials")->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
    cmd->add_option("--report-k", report_k, "Leading shares reported individually")
        ->capture_default_str();
    cmd->add_option("--steady-window", steady_window, "Trailing fraction averaged")
        ->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
    cmd->add_option("--csv", csv_path, "Per-k CSV output path, - for stdout");
    cmd->add_option("--json", json_path, "Report output path, - for stdout")->capture_default_str();
  }

  bool given(const char* name) const { return cmd->count(name) > 0; }

  // Values from the config file fill every option the command line left unset.
  void apply_config(const json& config) {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known = {
        "p", "B", "delta", "alpha", "utility", "rule", "num_shares", "trials",
        "seed", "report_k", "steady_window", "threads"};
    for (const auto& [key, value] : config.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError(fmt::format("config: unknown key \"{}\"", key));
      }
    }
    auto take = [&](const char* key, const char* flag, auto& target) {
      if (!config.contains(key) || given(flag)) return;
      try {
        target = config.at(key).get<std::decay_t<decltype(target)>>();
      } catch (const json::exception&) {
        throw ConfigError(fmt::format("config: bad value for \"{}\"", key));
      }
    };
    take("p", "--p", pool.p);
    take("B", "--B", pool.block_reward);
    take("delta", "--delta", pool.delta);
    if (!given("--alpha") && !given("--utility")) {
      take("alpha", "--alpha", util.alpha);
      take("utility", "--utility", util.descriptor);
      if (config.contains("alpha") && config.contains("utility")) {
        throw ConfigError("config: give either \"alpha\" or \"utility\"");
      }
    }
    if (config.contains("rule") && !given("--rule")) rule_text = config.at("rule").dump();
    take("num_shares", "--num-shares", num_shares);
    take("trials", "--trials", trials);
    take("seed", "--seed", seed);
    take("report_k", "--report-k", report_k);
    take("steady_window", "--steady-window", steady_window);
    take("threads", "--threads", threads);
  }

  int run(std::ostream& out) {
    if (!config_path.empty()) apply_config(load_json(config_path));
    if (rule_text.empty()) throw ConfigError("no rule given (--rule or config \"rule\")");
    const json scheme_json = load_json(rule_text);

    SimConfig cfg;
    cfg.params = pool.params();
    cfg.utility = util.utility();
    cfg.scheme = scheme_from_json(scheme_json);
    cfg.num_shares = num_shares;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.report_k = report_k;
    cfg.steady_window = steady_window;
    cfg.threads = threads;

    const auto hint = analytic_utility(cfg);
    const auto result = simulate(cfg);

    json inputs = pool.echo();
    inputs["utility"] = util.label();
    inputs["rule"] = scheme_to_json(cfg.scheme);
    inputs["num_shares"] = num_shares;
    inputs["trials"] = trials;
    inputs["report_k"] = report_k;
    inputs["steady_window"] = steady_window;

    if (!csv_path.empty()) {
      write_to(csv_path, out, [&](std::ostream& os) { write_per_k(os, result.estimates); });
    }
    const json doc = report("simulate", inputs, simulation_results(cfg, result, hint), seed);
    write_to(json_path, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    return kExitOk;
  }
};

// ------------------------------------------------------------------- sweep

const std::vector<std::string> kSweepSchemes = {"solo", "pplns_lo", "pplns_opt", "geometric",
                                                "proportional"};

struct SweepCmd {
  PoolOptions pool;
  std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::string> schemes = kSweepSchemes;
  bool run_simulation = false;
  std::size_t num_shares = kDeskShares;
  std::size_t trials = kDeskTrials;
  std::uint64_t seed = kDeskSeed;
  unsigned threads = 0;
  double eps = 1e-12;
  std::string out_path = "-";

  void attach(CLI::App* cmd) {
    pool.attach(cmd);
    cmd->add_option("--alphas", alphas, "Comma-separated risk exponents")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--schemes", schemes, "Comma-separated subset of the schemes")
        ->delimiter(',')
        ->check(CLI::IsMember(kSweepSchemes))
        ->capture_default_str();
    cmd->add_flag("--simulate", run_simulation, "Also run the simulator per row");
    cmd->add_option("--num-shares", num_shares, "Shares per trial")->capture_default_str();
    cmd->add_option("--trials", trials, "Independent trials")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed shared by every row")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
    cmd->add_option("--eps", eps, "Truncation error of the proportional-pay sum")
        ->capture_default_str();
    cmd->add_option("--out", out_path, "CSV output path, - for stdout")->capture_default_str();
  }

  struct Row {
    std::string param;
    double analytic;
    PayoutScheme scheme;
  };

  Row row(const std::string& name, const PoolParams& params, double alpha) const {
    const auto u = UtilityFunction::power(alpha);
    if (name == "solo") return {"", solo_utility(params, u), AllocationRule::solo()};
    if (name == "pplns_lo") {
      return {"N=1", pplns_steady_state_utility(params, alpha, 1.0), AllocationRule::pplns(1)};
    }
    if (name == "pplns_opt") {
      const auto opt = optimal_pplns_n(params, alpha);
      return {fmt::format("N={}", opt.n_int), opt.utility_at_n_int,
              AllocationRule::pplns(opt.n_int)};
    }
    if (name == "geometric") {
      if (alpha >= 1.0) return {"solo", solo_utility(params, u), AllocationRule::solo()};
      const auto rule = geometric_optimal_rule(alpha, params.delta());
      const auto& g = std::get<AllocationRule::Geometric>(rule.kind());
      return {fmt::format("c={};r={}", num(g.c), num(g.r)),
              geometric_steady_state_utility(params, alpha), rule};
    }
    return {"", proportional_pay_expected_utility(params, u, eps), ProportionalPay{}};
  }

  int run(std::ostream& out) const {
    const auto params = pool.params();
    for (double alpha : alphas) static_cast<void>(UtilityFunction::power(alpha));

    std::ostringstream csv;
    csv << "alpha,scheme,param,analytic_utility,sim_utility,sim_se\n";
    for (double alpha : alphas) {
      for (const auto& name : schemes) {
        const Row r = row(name, params, alpha);
        csv << fmt::format("{:g},{},{},{}", alpha, name, r.param, num(r.analytic));
        if (run_simulation) {
          SimConfig cfg;
          cfg.params = params;
          cfg.utility = UtilityFunction::power(alpha);
          cfg.scheme = r.scheme;
          cfg.num_shares = num_shares;
          cfg.trials = trials;
          cfg.seed = seed;
          cfg.threads = threads;
          const auto est = simulate(cfg).estimates;
          csv << ',' << num(est.steady_mean) << ',' << num(est.steady_se) << '\n';
        } else {
          csv << ",,\n";
        }
      }
    }
    write_to(out_path, out, [&](std::ostream& os) { os << csv.str(); });
    return kExitOk;
  }
};

// ------------------------------------------------------------------ payoff

struct PayoffCmd {
  PoolOptions pool;
  double alpha = 0.5;
  std::size_t n = 0;
  std::size_t max_offset = 2000;
  std::string out_path = "-";

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Power utility exponent")->capture_default_str();
    cmd->add_option("--delta", pool.delta, "Per-share discount factor")->capture_default_str();
    cmd->add_option("--B,--block-reward", pool.block_reward, "Block reward (validated only)")
        ->capture_default_str();
    cmd->add_option("--N", n, "PPLNS window; default is the optimal N")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-offset", max_offset, "Last offset emitted")->capture_default_str();
    cmd->add_option("--out", out_path, "CSV output path, - for stdout")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const auto params = pool.params();
    static_cast<void>(UtilityFunction::power(alpha));
    const std::size_t window = n > 0 ? n : optimal_pplns_n(params, alpha).n_int;
    const auto pplns = AllocationRule::pplns(window);
    const auto geometric =
        alpha < 1.0 ? geometric_optimal_rule(alpha, params.delta()) : AllocationRule::solo();

    std::ostringstream csv;
    csv << "offset,geometric_weight,pplns_weight\n";
    for (std::size_t i = 0; i <= max_offset; ++i) {
      csv << i << ',' << num(weight(geometric, i)) << ',' << num(weight(pplns, i)) << '\n';
    }
    write_to(out_path, out, [&](std::ostream& os) { os << csv.str(); });
    return kExitOk;
  }
};

// ------------------------------------------------------------------- check

struct CheckCmd {
  PoolOptions pool;
  UtilityOptions util;
  std::string rule_text;
  double eps = 1e-6;
  bool run_simulation = false;
  std::size_t num_shares = 200'000;
  std::size_t trials = 8;
  std::uint64_t seed = kDeskSeed;
  unsigned threads = 0;

  void attach(CLI::App* cmd) {
    pool.attach(cmd);
    util.attach(cmd);
    cmd->add_option("--rule", rule_text, "Rule as JSON text or a path to a JSON file")->required();
    cmd->add_option("--eps", eps, "Approximation tolerance")->capture_default_str();
    cmd->add_flag("--simulate", run_simulation, "Add simulated balance and fairness checks");
    cmd->add_option("--num-shares", num_shares, "Shares per trial")->capture_default_str();
    cmd->add_option("--trials", trials, "Independent trials")->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const auto params = pool.params();
    const auto u = util.utility();
    const json rule_json = load_json(rule_text);
    const auto rule = rule_from_json(rule_json);

    json checks = json::array();
    bool all = true;
    auto record = [&](const char* name, bool pass, json detail) {
      all = all && pass;
      detail["name"] = name;
      detail["pass"] = pass;
      checks.push_back(std::move(detail));
    };

    const double m = mass(rule);
    record("mass_at_most_one", m <= 1.0 + kMassTolerance, {{"mass", m}});

    // Utilities are summed far past the truncation point so the reference is
    // exact to well below eps.
    const double fine = eps * 1e-6;
    const std::size_t depth = truncation_depth(rule, params, u, eps);
    const double full = fixed_rule_steady_state_utility(rule, params, u, fine);
    const double cut = fixed_rule_steady_state_utility(truncate(rule, depth), params, u, fine);
    record("epsilon_approximation", std::abs(full - cut) <= eps,
           {{"depth", depth}, {"utility", full}, {"truncated_utility", cut}});

    // No fixed rule beats the optimum over its own window plus the tail bound.
    const auto best = solve_fixed_rule_kkt(u, params.delta(), params.block_reward(), depth);
    const double tail =
        params.p() * u.value(params.block_reward()) * std::pow(params.delta(), depth) /
        (1.0 - params.delta());
    const double bound = params.p() * best.objective + tail;
    record("below_optimal_bound", full <= bound * (1.0 + 1e-9), {{"bound", bound}});

    if (run_simulation) {
      SimConfig cfg;
      cfg.params = params;
      cfg.utility = u;
      cfg.scheme = rule;
      cfg.num_shares = num_shares;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.threads = threads;
      const auto result = simulate(cfg);
      const auto rep = assess(cfg, result, full);
      record("balance", rep.balance_ok, {{"mean_reward_per_share", rep.mean_reward_per_share}});
      record("steady_state_fairness", rep.converged, {{"drift", rep.drift}});
      record("simulation_agrees", *rep.z_score <= 3.0, {{"z_score", *rep.z_score}});
    }

    json inputs = pool.echo();
    inputs["utility"] = util.label();
    inputs["rule"] = rule_json;
    inputs["eps"] = eps;
    if (run_simulation) {
      inputs["num_shares"] = num_shares;
      inputs["trials"] = trials;
    }
    const json doc = report("check", inputs, {{"all_passed", all}, {"checks", checks}},
                            run_simulation ? std::optional<std::uint64_t>(seed) : std::nullopt);
    out << doc.dump(2) << '\n';
    return all ? kExitOk : kExitInvalidRule;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mining pool reward allocation: optimal rules, utilities and simulation",
               "minepool"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  OptimizeCmd optimize;
  EvaluateCmd evaluate;
  SimulateCmd simulate_cmd;
  SweepCmd sweep;
  PayoffCmd payoff;
  CheckCmd check;
  auto* optimize_app = app.add_subcommand("optimize", "Optimal PPLNS and geometric parameters");
  auto* evaluate_app = app.add_subcommand("evaluate", "Steady-state utility of a rule");
  auto* simulate_app = app.add_subcommand("simulate", "Monte Carlo run with per-k estimates");
  auto* sweep_app = app.add_subcommand("sweep", "Utility of every scheme across alphas");
  auto* payoff_app = app.add_subcommand("payoff", "Per-offset payout weights");
  auto* check_app = app.add_subcommand("check", "Invariant suite for a rule");
  optimize.attach(optimize_app);
  evaluate.attach(evaluate_app);
  simulate_cmd.attach(simulate_app);
  sweep.attach(sweep_app);
  payoff.attach(payoff_app);
  check.attach(check_app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*optimize_app) return optimize.run(out);
    if (*evaluate_app) return evaluate.run(out);
    if (*simulate_app) return simulate_cmd.run(out);
    if (*sweep_app) return sweep.run(out);
    if (*payoff_app) return payoff.run(out);
    return check.run(out);
  } catch (const InvalidRuleError& e) {
    err << "error: invalid rule: " << e.what() << '\n';
    return kExitInvalidRule;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
}

}  // namespace minepool::cli
