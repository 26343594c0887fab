#pragma once

// Scenario configuration: flat `key = value` documents, one scenario per file.

#include "qlab/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qlab {

enum class Scenario { coherent, decreasing, dispersion_table, two_state, multi_state, collide, classify };

inline constexpr std::string_view kScenarioNames[] = {"coherent",  "decreasing", "dispersion-table", "two-state",
                                                      "multi-state", "collide",  "classify"};

inline std::string_view to_string(Scenario s) { return kScenarioNames[static_cast<int>(s)]; }

inline std::optional<Scenario> parse_scenario(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kScenarioNames); ++i)
    if (kScenarioNames[i] == name) return static_cast<Scenario>(i);
  return std::nullopt;
}

enum class OutputFormat { csv, json };

class config_error : public std::runtime_error {
 public:
  explicit config_error(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& m : v) s += (s.empty() ? "" : "\n") + m;
    return s;
  }
  std::vector<std::string> violations_;
};

enum class Kind { real, integer, text };
enum class Rule { any, positive, nonnegative, at_least_8, at_least_2, choice, power_of_two_hint };

struct ParamSpec {
  std::string_view key;
  Kind kind;
  std::string_view fallback;
  Rule rule;
  std::string_view help;
  std::string_view choices = {};  // '|' separated when rule == choice
};

using ParamValue = std::variant<double, long long, std::string>;

namespace detail {

// fallback strings are literals, so the views stay valid
inline std::vector<ParamSpec> grid_params(std::string_view n, std::string_view length) {
  return {{"n", Kind::integer, n, Rule::power_of_two_hint, "lattice points (rounded up to a power of two)"},
          {"length", Kind::real, length, Rule::positive, "periodic box length"}};
}

inline std::vector<ParamSpec> params_for(Scenario s) {
  const ParamSpec eps{"eps", Kind::real, "1e-6", Rule::positive, "classification tolerance in nats"};
  const ParamSpec hbar{"hbar_over_m", Kind::real, "1", Rule::positive, "hbar / m"};
  const ParamSpec c{"c", Kind::real, "1", Rule::positive, "speed of light"};
  const ParamSpec seed{"seed", Kind::integer, "0", Rule::nonnegative, "random seed (overridden by --seed)"};
  std::vector<ParamSpec> p;
  auto add = [&](std::initializer_list<ParamSpec> more) { p.insert(p.end(), more); };
  switch (s) {
    case Scenario::coherent:
    case Scenario::decreasing:
      p = grid_params("1024", "100");
      add({{"sigma2", Kind::real, "1", Rule::positive, "amplitude variance of the packet"},
           {"k0", Kind::real, "0", Rule::any, "momentum center"},
           {"r0", Kind::real, "0", Rule::any, "position center"},
           hbar, c,
           {"t_max", Kind::real, "10", Rule::positive, "end of the time window (T for decreasing)"},
           {"n_steps", Kind::integer, "41", Rule::at_least_8, "number of sampled times"},
           {"propagator", Kind::text, "exact", Rule::choice, "free propagator", "exact|taylor"},
           eps, seed});
      break;
    case Scenario::dispersion_table:
      add({{"k_min", Kind::real, "-10", Rule::any, "first wave number"},
           {"k_max", Kind::real, "10", Rule::any, "last wave number"},
           {"n_k", Kind::integer, "81", Rule::at_least_2, "number of rows"}, hbar, c, seed});
      break;
    case Scenario::two_state:
      p = grid_params("256", "40");
      add({{"omega1", Kind::real, "1", Rule::any, "unperturbed frequency of state 1"},
           {"omega2", Kind::real, "2", Rule::any, "unperturbed frequency of state 2"},
           {"w11", Kind::real, "0", Rule::any, "interaction element 11"},
           {"w12", Kind::real, "0.1", Rule::any, "interaction element 12 (= 21)"},
           {"w22", Kind::real, "0", Rule::any, "interaction element 22"},
           {"t_max", Kind::real, "0", Rule::nonnegative, "end of the window; 0 means one full period 2 pi / eta"},
           {"n_steps", Kind::integer, "201", Rule::at_least_8, "number of sampled times"},
           {"basis_sigma2", Kind::real, "1", Rule::positive, "width of the oscillator-shaped basis"},
           eps, seed});
      break;
    case Scenario::multi_state:
      p = grid_params("256", "40");
      add({{"levels", Kind::integer, "5", Rule::at_least_2, "number of states N"},
           {"spacing", Kind::real, "1", Rule::any, "diagonal entries are (i + 1) * spacing"},
           {"coupling", Kind::real, "0.1", Rule::nonnegative, "off-diagonal entries uniform in [-coupling, coupling]"},
           {"t_max", Kind::real, "20", Rule::positive, "end of the time window"},
           {"n_steps", Kind::integer, "201", Rule::at_least_8, "number of sampled times"},
           {"basis_sigma2", Kind::real, "1", Rule::positive, "width of the oscillator-shaped basis"},
           eps, seed});
      break;
    case Scenario::collide:
      p = grid_params("1024", "320");
      add({{"k1", Kind::real, "1", Rule::positive, "momentum magnitude (packets at +k1 and -k1)"},
           {"c1", Kind::real, "-30", Rule::any, "left packet center"},
           {"c2", Kind::real, "30", Rule::any, "right packet center"},
           {"sigma2", Kind::real, "1", Rule::positive, "shared amplitude variance"},
           hbar, c,
           {"t_max", Kind::real, "80", Rule::positive, "end of the time window"},
           {"n_steps", Kind::integer, "161", Rule::at_least_8, "number of sampled times"},
           {"statistics", Kind::text, "fermion", Rule::choice, "exchange statistics", "fermion|boson"},
           {"snapshot_stride", Kind::real, "20", Rule::nonnegative, "time between density snapshots; 0 disables"},
           {"snapshot_decimation", Kind::integer, "4", Rule::positive, "keep every k-th lattice point in snapshots"},
           eps, seed});
      break;
    case Scenario::classify:
      add({{"series", Kind::text, "", Rule::any, "path of a CSV file to classify (required)"},
           {"column", Kind::text, "s_total", Rule::any, "column holding the entropy values"}, eps, seed});
      break;
  }
  return p;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool parse_real(const std::string& s, double& out) {
  std::istringstream is(s);
  is.imbue(std::locale::classic());
  is >> out;
  return !is.fail() && is.eof() && std::isfinite(out);
}

inline bool parse_integer(const std::string& s, long long& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

inline std::vector<ParamSpec> scenario_params(Scenario s) { return detail::params_for(s); }

struct ScenarioConfig {
  Scenario scenario = Scenario::coherent;
  std::map<std::string, ParamValue> values;  // every documented key, defaults filled in
  std::set<std::string> given;               // keys present in the document
  std::vector<std::string> notes;            // adjustments such as grid rounding
  std::string output = "out";
  OutputFormat format = OutputFormat::csv;

  double real(const std::string& key) const { return std::get<double>(values.at(key)); }
  long long integer(const std::string& key) const { return std::get<long long>(values.at(key)); }
  const std::string& text(const std::string& key) const { return std::get<std::string>(values.at(key)); }
  std::size_t count(const std::string& key) const { return static_cast<std::size_t>(integer(key)); }
};

/// Parses `key = value` lines (`#` starts a comment) for the given scenario.
/// Every violation is collected; a config_error lists all of them.
inline ScenarioConfig parse_config(std::string_view text, Scenario scenario) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  const auto specs = detail::params_for(scenario);
  std::vector<std::string> errors;
  std::map<std::string, std::string> raw;

  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected `key = value`");
      continue;
    }
    const auto key = detail::trim(std::string_view(body).substr(0, eq));
    const auto value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (raw.contains(key)) errors.push_back(key + ": given more than once");
    raw[key] = value;
  }

  if (auto it = raw.find("scenario"); it != raw.end()) {
    if (it->second != to_string(scenario))
      errors.push_back("scenario: file declares `" + it->second + "` but `" + std::string(to_string(scenario)) +
                       "` was requested");
    raw.erase(it);
  }

  std::set<std::string> known;
  for (const auto& spec : specs) known.insert(std::string(spec.key));
  for (const auto& [key, _] : raw)
    if (!known.contains(key)) errors.push_back(key + ": unknown key for scenario " + std::string(to_string(scenario)));

  for (const auto& spec : specs) {
    const std::string key(spec.key);
    const bool present = raw.contains(key);
    const std::string src = present ? raw.at(key) : std::string(spec.fallback);
    if (present) cfg.given.insert(key);
    switch (spec.kind) {
      case Kind::real: {
        double v = 0.0;
        if (!detail::parse_real(src, v)) {
          errors.push_back(key + ": expected a finite real number, got `" + src + "`");
          continue;
        }
        if (spec.rule == Rule::positive && !(v > 0.0)) errors.push_back(key + ": must be > 0, got " + src);
        if (spec.rule == Rule::nonnegative && v < 0.0) errors.push_back(key + ": must be >= 0, got " + src);
        cfg.values[key] = v;
        break;
      }
      case Kind::integer: {
        long long v = 0;
        if (!detail::parse_integer(src, v)) {
          errors.push_back(key + ": expected an integer, got `" + src + "`");
          continue;
        }
        if (spec.rule == Rule::positive && v <= 0) errors.push_back(key + ": must be > 0, got " + src);
        if (spec.rule == Rule::nonnegative && v < 0) errors.push_back(key + ": must be >= 0, got " + src);
        if (spec.rule == Rule::at_least_8 && v < 8) errors.push_back(key + ": must be >= 8, got " + src);
        if (spec.rule == Rule::at_least_2 && v < 2) errors.push_back(key + ": must be >= 2, got " + src);
        if (spec.rule == Rule::power_of_two_hint) {
          if (v < 1 || v > (1LL << 24)) {
            errors.push_back(key + ": must be in [1, 2^24], got " + src);
          } else if (!is_power_of_two(static_cast<std::size_t>(v)) || v < 8) {
            const auto rounded = static_cast<long long>(std::max<std::size_t>(8, round_up_pow2(static_cast<std::size_t>(v))));
            cfg.notes.push_back(key + " = " + src + " rounded up to " + std::to_string(rounded) +
                                " (transform sizes are powers of two)");
            v = rounded;
          }
        }
        cfg.values[key] = v;
        break;
      }
      case Kind::text: {
        if (spec.rule == Rule::choice) {
          bool ok = false;
          std::string_view ch = spec.choices;
          while (!ch.empty()) {
            const auto bar = ch.find('|');
            if (ch.substr(0, bar) == src) ok = true;
            ch = bar == std::string_view::npos ? std::string_view{} : ch.substr(bar + 1);
          }
          if (!ok) errors.push_back(key + ": must be one of " + std::string(spec.choices) + ", got `" + src + "`");
        }
        cfg.values[key] = src;
        break;
      }
    }
  }

  if (scenario == Scenario::collide && cfg.values.contains("c1") && cfg.values.contains("c2") &&
      !(cfg.real("c1") < cfg.real("c2")))
    errors.push_back("c1: must be < c2 (left packet moves right)");
  if (scenario == Scenario::classify && cfg.text("series").empty())
    errors.push_back("series: required path of the CSV file to classify");
  if (scenario == Scenario::dispersion_table && cfg.values.contains("k_min") && cfg.values.contains("k_max") &&
      !(cfg.real("k_min") < cfg.real("k_max")))
    errors.push_back("k_min: must be < k_max");

  if (!errors.empty()) throw config_error(std::move(errors));
  return cfg;
}

}  // namespace qlab
