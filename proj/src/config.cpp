#include "platemr/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "platemr/errors.hpp"
#include "platemr/evolution.hpp"
#include "platemr/pencil.hpp"
#include "platemr/weighted.hpp"

namespace platemr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_real(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<bool> to_flag(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  return std::nullopt;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string range_text(const ParamSpec& p) {
  std::string s;
  if (p.lo) s += p.key + (p.lo_open ? " > " : " >= ") + fmt(*p.lo);
  if (p.hi) s += (s.empty() ? "" : " and ") + p.key + (p.hi_open ? " < " : " <= ") + fmt(*p.hi);
  return s;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

// Small builders for the schema tables.
ParamSpec real(std::string key, std::string fallback, std::string help, std::optional<double> lo = {},
               bool lo_open = false, std::optional<double> hi = {}, bool hi_open = false) {
  ParamSpec p;
  p.key = std::move(key);
  p.type = ParamType::real;
  p.fallback = std::move(fallback);
  p.required = p.fallback.empty();
  p.help = std::move(help);
  p.lo = lo;
  p.lo_open = lo_open;
  p.hi = hi;
  p.hi_open = hi_open;
  return p;
}

ParamSpec integer(std::string key, std::string fallback, std::string help, std::optional<double> lo = {},
                  std::optional<double> hi = {}) {
  ParamSpec p = real(std::move(key), std::move(fallback), std::move(help), lo, false, hi, false);
  p.type = ParamType::integer;
  return p;
}

ParamSpec choice(std::string key, std::string fallback, std::string help, std::vector<std::string> choices) {
  ParamSpec p;
  p.key = std::move(key);
  p.type = ParamType::choice;
  p.fallback = std::move(fallback);
  p.required = p.fallback.empty();
  p.help = std::move(help);
  p.choices = std::move(choices);
  return p;
}

ParamSpec text(std::string key, std::string fallback, std::string help) {
  ParamSpec p;
  p.key = std::move(key);
  p.type = ParamType::text;
  p.fallback = std::move(fallback);
  p.required = p.fallback.empty();
  p.help = std::move(help);
  return p;
}

ParamSpec flag(std::string key, std::string fallback, std::string help) {
  ParamSpec p;
  p.key = std::move(key);
  p.type = ParamType::flag;
  p.fallback = std::move(fallback);
  p.help = std::move(help);
  return p;
}

const std::vector<std::string> kSources{"zero", "sine-quartic", "gauss-pulse", "oscillating", "manufactured"};

void sector_check(const RunConfig& c, std::vector<std::string>& errors) {
  const double theta = damping_angle(c.real("rho"));
  const double sigma = c.real("sigma");
  if (!(sigma > theta && sigma < std::numbers::pi)) {
    errors.push_back("sigma: must satisfy damping_angle(rho) = " + fmt(theta) + " < sigma < pi (got " + fmt(sigma) + ")");
  }
}

void dense_limit(const RunConfig& c, std::vector<std::string>& errors) {
  const long long n = c.integer("n");
  const long long dim = c.integer("dim");
  const long long size = 2 * (dim == 1 ? n : n * n);
  if (size > 4000) errors.push_back("n: block dimension 2 n^dim = " + std::to_string(size) + " exceeds the dense limit 4000");
}

void norm_check(const RunConfig& c, std::vector<std::string>& errors) {
  NormSpec s;
  s.q = c.real("q");
  s.mu = c.real("mu");
  s.p = c.real("p");
  s.gamma = c.real("gamma");
  s.k = c.has("k") ? static_cast<int>(c.integer("k")) : 2;
  try {
    validate_norm_spec(s);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
}

std::vector<CommandSchema> build_schemas() {
  const double pi = std::numbers::pi;
  std::vector<CommandSchema> s;

  s.push_back({"pencil", "pencil roots, damping angle and root identities",
               {real("rho", "", "damping strength", 0.0, true)}, {}});

  s.push_back({"traces", "multi-indices whose traces vanish in W^{k,p}(w_gamma)",
               {integer("k", "", "Sobolev order", 0.0), real("p", "2", "integrability", 1.0, true),
                real("gamma", "0", "weight exponent", -1.0, true), integer("dim", "2", "dimension", 1.0, 2.0)},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 try {
                   vanishing_trace_set(static_cast<int>(c.integer("k")), c.real("p"), c.real("gamma"),
                                       static_cast<int>(c.integer("dim")));
                 } catch (const std::exception& e) {
                   errors.push_back(std::string("gamma: ") + e.what());
                 }
               }});

  s.push_back({"hardy", "Hardy quotient of a trace-zero profile on a graded half-line grid",
               {real("p", "2", "integrability", 1.0, true), real("gamma", "0", "weight exponent", -1.0, true),
                choice("profile", "x-exp", "test profile", {"x-exp", "x2-exp", "bump12"}),
                integer("nodes", "2048", "graded grid nodes", 64.0), real("length", "40", "truncation length", 0.0, true)},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 if (!(c.real("gamma") < c.real("p") - 1.0)) errors.push_back("gamma: must satisfy gamma < p - 1");
               }});

  s.push_back({"pullback-check", "pullback composition, distance equivalence and derivative blow-up",
               {choice("h-profile", "holder", "boundary height profile", {"zero", "hat", "bump", "holder"}),
                real("seminorm", "0.1", "Lipschitz constant of h", 0.0), real("c", "0.25", "mollifier scale", 0.0, true, 1.0, true),
                real("kappa", "0.5", "Holder exponent of the holder profile", 0.0, true, 1.0, true),
                integer("order", "2", "derivative order of the blow-up fit", 2.0, 3.0),
                integer("samples", "10000", "sample points", 10.0),
                real("y1-min", "1e-4", "fit window start", 0.0, true), real("y1-max", "0.1", "fit window end", 0.0, true),
                integer("fit-samples", "16", "fit points", 3.0)},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 if (!(c.real("y1-min") < c.real("y1-max"))) errors.push_back("y1-min: must be below y1-max");
                 if (c.real("c") * c.real("seminorm") >= 1.0) errors.push_back("c: must satisfy c * seminorm < 1");
               }});

  s.push_back({"partition-check", "partition of unity sum eta^2 = 1 and the retraction identity",
               {integer("samples", "1000", "random sample nodes", 10.0), integer("dim", "1", "dimension", 1.0, 2.0),
                real("overlap", "0.5", "half width of the patch overlap", 0.0, true, 1.0, true)},
               {}});

  s.push_back({"multiplier-scan", "sup of the graded symbol multiplier over a sector",
               {real("rho", "", "damping strength", 0.0, true), real("sigma", "", "sector half-opening", 0.0, true, pi, true),
                integer("n", "64", "lambda magnitudes", 2.0), integer("xi-samples", "64", "|xi| samples", 2.0),
                real("rmin", "1e-3", "smallest |lambda|", 0.0, true), real("rmax", "1e3", "largest |lambda|", 0.0, true),
                real("xi-min", "1e-3", "smallest |xi|", 0.0, true), real("xi-max", "1e3", "largest |xi|", 0.0, true),
                integer("angles", "181", "angles per magnitude", 3.0)},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 sector_check(c, errors);
                 if (!(c.real("rmin") < c.real("rmax"))) errors.push_back("rmin: must be below rmax");
                 if (!(c.real("xi-min") < c.real("xi-max"))) errors.push_back("xi-min: must be below xi-max");
               }});

  s.push_back({"spectrum", "eigenvalues of the discrete block operator",
               {integer("dim", "1", "dimension", 1.0, 2.0), integer("n", "", "interior nodes per axis", 5.0),
                real("rho", "", "damping strength", 0.0, true), real("eta", "0", "shift of B", 0.0),
                integer("count", "0", "eigenvalues to report (0 = all)", 0.0)},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 dense_limit(c, errors);
                 const long long n = c.integer("n");
                 const long long size = 2 * (c.integer("dim") == 1 ? n : n * n);
                 if (c.integer("count") > size) errors.push_back("count: exceeds the block dimension " + std::to_string(size));
               }});

  s.push_back({"resolvent-scan", "||mu (mu + lambda0 + A_h)^{-1}|| along the rays arg mu = +-(pi - sigma)",
               {integer("dim", "1", "dimension", 1.0, 2.0), integer("n", "64", "interior nodes per axis", 5.0),
                real("rho", "", "damping strength", 0.0, true), real("sigma", "", "sector half-opening", 0.0, true, pi, true),
                real("lambda0", "1", "spectral shift", 0.0), real("eta", "0", "shift of B", 0.0),
                real("rmin", "1e-2", "smallest |mu|", 0.0, true), real("rmax", "1e6", "largest |mu|", 0.0, true),
                integer("samples", "25", "magnitudes per ray", 2.0),
                choice("norm", "energy", "operator norm", {"energy", "euclidean"})},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 sector_check(c, errors);
                 dense_limit(c, errors);
                 if (!(c.real("rmin") < c.real("rmax"))) errors.push_back("rmin: must be below rmax");
               }});

  s.push_back({"rademacher", "randomised Rademacher bound of an operator family",
               {choice("family", "resolvent", "operator family", {"identity", "random", "resolvent"}),
                integer("members", "6", "operators in the family", 1.0), integer("size", "8", "matrix size / grid nodes", 1.0),
                integer("trials", "4096", "sign patterns", 1000.0), integer("tuples", "8", "random start tuples", 0.0),
                integer("ascent", "30", "power-ascent steps", 0.0), flag("phases", "false", "complex phases"),
                real("rho", "1", "damping strength (resolvent family)", 0.0, true)},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 if (c.text("family") == "resolvent" && c.integer("size") < 5) {
                   errors.push_back("size: the resolvent family needs size >= 5 grid nodes");
                 }
               }});

  s.push_back({"solve", "theta-scheme run of the clamped plate with energy and boundary diagnostics",
               {integer("dim", "1", "dimension", 1.0, 2.0), integer("n", "63", "interior nodes per axis", 5.0),
                real("rho", "1", "damping strength", 0.0, true), real("theta", "0.5", "theta of the scheme", 0.5, false, 1.0, false),
                real("dt", "0.015625", "time step", 0.0, true), real("T", "1", "horizon", 0.0, true),
                choice("source", "sine-quartic", "source profile", kSources),
                choice("lift", "zero", "boundary lift profile", {"zero", "ramp", "cutoff"}),
                choice("initial", "zero", "initial state", {"zero", "slow-modes"}),
                flag("truncated", "false", "horizon stands in for T = infinity"),
                real("q", "2", "temporal integrability", 1.0, true), real("mu", "0", "temporal weight exponent"),
                real("p", "2", "spatial integrability", 1.0, true), real("gamma", "0.5", "spatial weight exponent")},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 norm_check(c, errors);
                 const double steps = c.real("T") / c.real("dt");
                 if (std::abs(steps - std::round(steps)) > 1e-9 * steps || std::round(steps) < 2) {
                   errors.push_back("dt: T / dt must be an integer >= 2");
                 }
                 if (c.text("initial") == "slow-modes") dense_limit(c, errors);
               }});

  s.push_back({"mr-ratio", "maximal-regularity ratios over grid refinements",
               {integer("dim", "1", "dimension", 1.0, 2.0), integer("n", "63", "interior nodes of the coarsest grid", 5.0),
                integer("levels", "3", "refinement levels (n -> 2n + 1)", 2.0, 6.0),
                real("rho", "1", "damping strength", 0.0, true), real("T", "1", "horizon", 0.0, true),
                real("theta", "0.5", "theta of the scheme", 0.5, false, 1.0, false),
                real("dt-per-h", "1", "time step over mesh width", 0.0, true),
                real("q", "2", "temporal integrability", 1.0, true), real("mu", "0", "temporal weight exponent"),
                real("p", "2", "spatial integrability", 1.0, true), real("gamma", "0.5", "spatial weight exponent"),
                integer("k", "2", "regularity index"),
                text("sources", "sine-quartic,gauss-pulse,oscillating", "comma-separated source profiles"),
                real("drift-bound", "0.2", "allowed max/min ratio drift", 0.0, true)},
               [](const RunConfig& c, std::vector<std::string>& errors) {
                 norm_check(c, errors);
                 for (const auto& name : c.list("sources")) {
                   if (std::find(kSources.begin(), kSources.end(), name) == kSources.end()) {
                     errors.push_back("sources: unknown profile '" + name + "' (" + join(kSources, ", ") + ")");
                   }
                 }
                 if (c.list("sources").empty()) errors.push_back("sources: at least one profile is required");
               }});

  for (auto& schema : s) {
    schema.params.push_back(integer("seed", "1", "random seed", 0.0));
    schema.params.push_back(text("csv", schema.name + ".csv", "CSV output path"));
    schema.params.push_back(text("report", schema.name + ".jsonl", "JSON-lines report path"));
  }
  return s;
}

std::optional<std::string> check_value(const ParamSpec& p, const std::string& v) {
  switch (p.type) {
    case ParamType::real:
    case ParamType::integer: {
      double x = 0.0;
      if (p.type == ParamType::integer) {
        auto i = to_integer(v);
        if (!i) return p.key + ": expected an integer, got '" + v + "'";
        x = static_cast<double>(*i);
      } else {
        auto r = to_real(v);
        if (!r || !std::isfinite(*r)) return p.key + ": expected a finite real number, got '" + v + "'";
        x = *r;
      }
      const bool low_bad = p.lo && (p.lo_open ? !(x > *p.lo) : !(x >= *p.lo));
      const bool high_bad = p.hi && (p.hi_open ? !(x < *p.hi) : !(x <= *p.hi));
      if (low_bad || high_bad) return p.key + ": must satisfy " + range_text(p) + " (got " + v + ")";
      return std::nullopt;
    }
    case ParamType::choice:
      if (std::find(p.choices.begin(), p.choices.end(), v) == p.choices.end()) {
        return p.key + ": expected one of " + join(p.choices, ", ") + ", got '" + v + "'";
      }
      return std::nullopt;
    case ParamType::flag:
      if (!to_flag(v)) return p.key + ": expected true or false, got '" + v + "'";
      return std::nullopt;
    case ParamType::text:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

const ParamSpec* CommandSchema::find(const std::string& key) const {
  for (const auto& p : params) {
    if (p.key == key) return &p;
  }
  return nullptr;
}

double RunConfig::real(const std::string& key) const { return *to_real(values.at(key)); }
long long RunConfig::integer(const std::string& key) const { return *to_integer(values.at(key)); }
const std::string& RunConfig::text(const std::string& key) const { return values.at(key); }
bool RunConfig::flag(const std::string& key) const { return *to_flag(values.at(key)); }

std::vector<std::string> RunConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(values.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<CommandSchema>& command_schemas() {
  static const std::vector<CommandSchema> schemas = build_schemas();
  return schemas;
}

const CommandSchema* find_command(const std::string& name) {
  for (const auto& s : command_schemas()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::map<std::string, std::string> parse_key_values(std::string_view text, std::vector<std::string>& errors) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected key=value, got '" + body + "'");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    out[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

ConfigResult parse_config(const std::string& command, std::string_view text) {
  std::vector<std::string> errors;
  auto values = parse_key_values(text, errors);
  ConfigResult r = make_config(command, values, {});
  errors.insert(errors.end(), r.errors.begin(), r.errors.end());
  if (!errors.empty()) return ConfigResult{std::nullopt, errors};
  return r;
}

ConfigResult make_config(const std::string& command, const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& flag_values) {
  ConfigResult result;
  const CommandSchema* schema = find_command(command);
  if (!schema) {
    std::vector<std::string> names;
    for (const auto& s : command_schemas()) names.push_back(s.name);
    result.errors.push_back("unknown command '" + command + "' (" + join(names, ", ") + ")");
    return result;
  }
  std::map<std::string, std::string> merged = file_values;
  for (const auto& [k, v] : flag_values) merged[k] = v;

  RunConfig cfg;
  cfg.command = command;
  for (const auto& [k, v] : merged) {
    if (!schema->find(k)) result.errors.push_back("unknown key '" + k + "' for command " + command);
  }
  std::vector<std::string> missing;
  bool typed_ok = true;
  for (const auto& p : schema->params) {
    auto it = merged.find(p.key);
    if (it == merged.end()) {
      if (p.required) {
        missing.push_back(p.key);
        typed_ok = false;
        continue;
      }
      cfg.values[p.key] = p.fallback;
      continue;
    }
    if (auto err = check_value(p, it->second)) {
      result.errors.push_back(*err);
      typed_ok = false;
      continue;
    }
    cfg.values[p.key] = it->second;
  }
  if (!missing.empty()) result.errors.push_back("missing required keys for " + command + ": " + join(missing, ", "));
  // cross-key preconditions need every key typed
  if (typed_ok && schema->cross_check) schema->cross_check(cfg, result.errors);
  if (!result.errors.empty()) return result;
  cfg.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  cfg.csv_path = cfg.text("csv");
  cfg.report_path = cfg.text("report");
  result.config = std::move(cfg);
  return result;
}

}  // namespace platemr
