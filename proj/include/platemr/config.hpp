#pragma once

// Line-oriented key=value run configuration: per-command schemas, typed
// parsing, merging with command-line flags and validation that collects
// every error instead of stopping at the first.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace platemr {

enum class ParamType { real, integer, text, choice, flag };

struct ParamSpec {
  std::string key;
  ParamType type = ParamType::real;
  std::string fallback;  // default value; empty with required = true means mandatory
  bool required = false;
  std::string help;
  std::vector<std::string> choices;
  std::optional<double> lo;  // range for real / integer keys
  std::optional<double> hi;
  bool lo_open = false;
  bool hi_open = false;
};

struct RunConfig;

struct CommandSchema {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  // Cross-key preconditions; appends messages for every violation.
  std::function<void(const RunConfig&, std::vector<std::string>&)> cross_check;

  const ParamSpec* find(const std::string& key) const;
};

struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;  // every schema key after defaults
  std::uint64_t seed = 1;
  std::string csv_path;
  std::string report_path;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;  // comma separated
};

struct ConfigResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return config.has_value(); }
};

// All commands; every schema also carries seed, csv and report.
const std::vector<CommandSchema>& command_schemas();
const CommandSchema* find_command(const std::string& name);

// '#' starts a comment, blank lines are skipped, keys may repeat (last wins).
std::map<std::string, std::string> parse_key_values(std::string_view text, std::vector<std::string>& errors);

ConfigResult parse_config(const std::string& command, std::string_view text);

// Flags override file values key by key, then defaults fill the rest.
ConfigResult make_config(const std::string& command, const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& flag_values);

}  // namespace platemr
