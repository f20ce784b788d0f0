#include "minepool/allocation.hpp"

#include <algorithm>
#include <cmath>

namespace minepool {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double checked_mass(double m) {
  if (!(m <= 1.0 + kMassTolerance)) {
    throw InvalidRuleError("rule pays out more than the block reward (mass " +
                           std::to_string(m) + " > 1)");
  }
  return m;
}

}  // namespace

AllocationRule AllocationRule::solo() { return AllocationRule(Solo{}); }

AllocationRule AllocationRule::pplns(std::size_t n) {
  if (n == 0) throw DomainError("PPLNS window N must be positive");
  return AllocationRule(Pplns{n});
}

AllocationRule AllocationRule::geometric(double c, double r) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("geometric c must lie in (0, 1]");
  if (!(r > 0.0 && r < 1.0)) throw DomainError("geometric r must lie in (0, 1)");
  AllocationRule rule(Geometric{c, r});
  checked_mass(mass(rule));
  return rule;
}

AllocationRule AllocationRule::custom(std::vector<double> weights) {
  if (weights.empty()) throw InvalidRuleError("custom rule needs at least one weight");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidRuleError("custom rule weights must be finite and nonnegative");
    }
  }
  AllocationRule rule(Custom{RewardProfile{std::move(weights)}});
  checked_mass(mass(rule));
  return rule;
}

std::string AllocationRule::name() const {
  return std::visit(Overloaded{
                        [](const Solo&) { return std::string("solo"); },
                        [](const Pplns&) { return std::string("pplns"); },
                        [](const Geometric&) { return std::string("geometric"); },
                        [](const Custom&) { return std::string("custom"); },
                    },
                    kind_);
}

std::optional<std::size_t> AllocationRule::natural_window() const {
  return std::visit(
      Overloaded{
          [](const Solo&) -> std::optional<std::size_t> { return 1; },
          [](const Pplns& r) -> std::optional<std::size_t> { return r.n; },
          [](const Geometric&) -> std::optional<std::size_t> { return std::nullopt; },
          [](const Custom& r) -> std::optional<std::size_t> {
            return r.profile.weights.size();
          },
      },
      kind_);
}

double weight(const AllocationRule& rule, std::size_t i) {
  return std::visit(
      Overloaded{
          [&](const AllocationRule::Solo&) { return i == 0 ? 1.0 : 0.0; },
          [&](const AllocationRule::Pplns& r) {
            return i < r.n ? 1.0 / static_cast<double>(r.n) : 0.0;
          },
          [&](const AllocationRule::Geometric& r) {
            return r.c * std::pow(r.r, static_cast<double>(i));
          },
          [&](const AllocationRule::Custom& r) {
            return i < r.profile.weights.size() ? r.profile.weights[i] : 0.0;
          },
      },
      rule.kind());
}

double mass(const AllocationRule& rule) {
  const double m = std::visit(
      Overloaded{
          [](const AllocationRule::Solo&) { return 1.0; },
          [](const AllocationRule::Pplns&) { return 1.0; },
          [](const AllocationRule::Geometric& r) { return r.c / (1.0 - r.r); },
          [](const AllocationRule::Custom& r) {
            CompensatedSum acc;
            for (double w : r.profile.weights) acc.add(w);
            return acc.value();
          },
      },
      rule.kind());
  return checked_mass(m);
}

std::size_t truncation_depth(const AllocationRule& rule,
                             const PoolParams& params,
                             const UtilityFunction& u, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const double delta = params.delta();
  const double scale = u.value(params.block_reward()) / (1.0 - delta);
  const auto bound_below = [&](double d) {
    return scale * std::pow(delta, d) < eps;
  };

  std::size_t depth = 0;
  if (!bound_below(0.0)) {
    const double t = std::log(eps / scale) / std::log(delta);
    depth = static_cast<std::size_t>(std::max(0.0, std::floor(t)));
    while (depth > 0 && bound_below(static_cast<double>(depth - 1))) --depth;
    while (!bound_below(static_cast<double>(depth))) ++depth;
  }
  if (auto window = rule.natural_window()) depth = std::min(depth, *window);
  return std::max<std::size_t>(depth, 1);
}

std::vector<double> weights(const AllocationRule& rule, std::size_t depth) {
  std::vector<double> out(depth);
  for (std::size_t i = 0; i < depth; ++i) out[i] = weight(rule, i);
  return out;
}

AllocationRule truncate(const AllocationRule& rule, std::size_t depth) {
  if (depth == 0) throw DomainError("truncation depth must be positive");
  return AllocationRule::custom(weights(rule, depth));
}

}  // namespace minepool
