#pragma once

// Command-line front end. run_cli() is the whole program minus process
// plumbing, so tests can drive it with in-memory streams.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "minepool/allocation.hpp"
#include "minepool/simulator.hpp"

namespace minepool::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitInvalidRule = 3;

/// Build version reported in every JSON document.
std::string version();

/// {"kind":"solo"}, {"kind":"pplns","n":N}, {"kind":"geometric","c":c,"r":r}
/// or {"kind":"custom","weights":[...]}.
nlohmann::json rule_to_json(const AllocationRule& rule);

/// Inverse of rule_to_json(). Throws ConfigError for malformed objects and
/// InvalidRuleError for rules that pay out more than the block reward.
AllocationRule rule_from_json(const nlohmann::json& j);

/// Like rule_from_json() but also accepts {"kind":"proportional"}.
PayoutScheme scheme_from_json(const nlohmann::json& j);

/// "power:<alpha>" or "log".
UtilityFunction parse_utility(const std::string& descriptor);

/// Parses JSON text, or reads the file at `text` when it does not start with
/// '{'. Throws ConfigError on failure.
nlohmann::json load_json(const std::string& text);

/// Runs one invocation; args excludes the program name. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace minepool::cli
