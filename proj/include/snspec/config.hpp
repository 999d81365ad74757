#pragma once

// INI experiment configuration:
//
//   [experiment] kind, constraint, profile, smallness
//   [domain]     kind = concentric | eccentric | star, n, R1, R2, d, rho_coefficients, m_out, m_in
//   [solver]     N, m_out, m_in, tau_M, tau_0, mode, flux_threshold, self_convergence, convergence_threshold
//   [grid]       values | start, stop, count; resolutions, random, nodes
//   [output]     csv, svg
//   [assert]     enabled, tolerance
//
// Every key is validated; unknown sections or keys are errors.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "snspec/trefftz_solver.hpp"

namespace snspec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainConfig {
  std::string kind;  // concentric | eccentric | star
  int n = 2;
  std::optional<double> R1;
  std::optional<double> R2;
  double d = 0.0;
  std::vector<double> rho;
  int m_out = 0;
  int m_in = 0;
};

struct GridConfig {
  std::vector<double> values;
  std::vector<int> resolutions{256};
  int random = 10;
  int nodes = 256;
};

struct OutputConfig {
  std::string csv;
  bool svg = true;
};

struct AssertConfig {
  bool enabled = true;
  double tolerance = 1e-8;
};

struct ExperimentConfig {
  std::string kind;
  std::string constraint = "both";
  std::string profile = "euclidean";
  double smallness = 0.05;
  DomainConfig domain;
  SolverOptions solver;
  double convergence_threshold = 1e-9;
  GridConfig grid;
  OutputConfig output;
  AssertConfig asserts;
};

inline const std::set<std::string>& experiment_kinds() {
  static const std::set<std::string> k{"exact",  "solve",    "eccentricity", "hole_shrink", "lemmas",
                                       "nodal",  "dumbbell", "sandwich",     "isoperimetric"};
  return k;
}

namespace detail {

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> k{
      {"experiment", {"kind", "constraint", "profile", "smallness"}},
      {"domain", {"kind", "n", "R1", "R2", "d", "rho_coefficients", "m_out", "m_in"}},
      {"solver",
       {"N", "m_out", "m_in", "tau_M", "tau_0", "mode", "flux_threshold", "self_convergence",
        "convergence_threshold"}},
      {"grid", {"values", "start", "stop", "count", "resolutions", "random", "nodes"}},
      {"output", {"csv", "svg"}},
      {"assert", {"enabled", "tolerance"}},
  };
  return k;
}

inline double parse_double(const std::string& key, std::string text) {
  const auto b = text.find_first_not_of(" \t");
  const auto e = text.find_last_not_of(" \t");
  if (b == std::string::npos) throw ConfigError(key + ": empty value");
  text = text.substr(b, e - b + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key + ": not a finite number: '" + text + "'");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + ": not an integer: '" + text + "'");
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, std::string text) {
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + text + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_double(key, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace detail

/// Parses and validates the structure of a config. Experiment-specific
/// checks happen in the experiment runners.
inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }

  std::map<std::string, std::map<std::string, std::string>> raw;
  for (const auto& [section, body] : tree) {
    const auto allowed = detail::allowed_keys().find(section);
    if (allowed == detail::allowed_keys().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      if (!allowed->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      raw[section][key] = detail::trimmed(value.data());
    }
  }
  auto get = [&](const std::string& s, const std::string& k) -> std::optional<std::string> {
    const auto si = raw.find(s);
    if (si == raw.end()) return std::nullopt;
    const auto ki = si->second.find(k);
    if (ki == si->second.end()) return std::nullopt;
    return ki->second;
  };
  auto name = [](const std::string& s, const std::string& k) { return s + "." + k; };

  ExperimentConfig c;
  if (auto v = get("experiment", "kind")) c.kind = *v;
  if (auto v = get("experiment", "constraint")) c.constraint = *v;
  if (auto v = get("experiment", "profile")) c.profile = *v;
  if (auto v = get("experiment", "smallness")) c.smallness = detail::parse_double(name("experiment", "smallness"), *v);

  auto& d = c.domain;
  if (auto v = get("domain", "kind")) d.kind = *v;
  if (auto v = get("domain", "n")) d.n = detail::parse_int(name("domain", "n"), *v);
  if (auto v = get("domain", "R1")) d.R1 = detail::parse_double(name("domain", "R1"), *v);
  if (auto v = get("domain", "R2")) d.R2 = detail::parse_double(name("domain", "R2"), *v);
  if (auto v = get("domain", "d")) d.d = detail::parse_double(name("domain", "d"), *v);
  if (auto v = get("domain", "rho_coefficients")) d.rho = detail::parse_list(name("domain", "rho_coefficients"), *v);
  if (auto v = get("domain", "m_out")) d.m_out = detail::parse_int(name("domain", "m_out"), *v);
  if (auto v = get("domain", "m_in")) d.m_in = detail::parse_int(name("domain", "m_in"), *v);

  auto& s = c.solver;
  if (auto v = get("solver", "N")) s.N = detail::parse_int(name("solver", "N"), *v);
  if (auto v = get("solver", "m_out")) s.m_out = detail::parse_int(name("solver", "m_out"), *v);
  if (auto v = get("solver", "m_in")) s.m_in = detail::parse_int(name("solver", "m_in"), *v);
  if (auto v = get("solver", "tau_M")) s.tau_M = detail::parse_double(name("solver", "tau_M"), *v);
  if (auto v = get("solver", "tau_0")) s.tau_0 = detail::parse_double(name("solver", "tau_0"), *v);
  if (auto v = get("solver", "flux_threshold"))
    s.flux_threshold = detail::parse_double(name("solver", "flux_threshold"), *v);
  if (auto v = get("solver", "self_convergence"))
    s.self_convergence = detail::parse_bool(name("solver", "self_convergence"), *v);
  if (auto v = get("solver", "convergence_threshold"))
    c.convergence_threshold = detail::parse_double(name("solver", "convergence_threshold"), *v);
  if (auto v = get("solver", "mode")) {
    if (*v == "steklov_neumann") s.mode = ProblemMode::steklov_neumann;
    else if (*v == "steklov") s.mode = ProblemMode::steklov;
    else throw ConfigError("solver.mode: expected steklov_neumann or steklov, got '" + *v + "'");
  }

  auto& g = c.grid;
  const auto values = get("grid", "values");
  const auto start = get("grid", "start");
  const auto stop = get("grid", "stop");
  const auto count = get("grid", "count");
  if (values && (start || stop || count)) throw ConfigError("grid: give either values or start/stop/count");
  if (values) g.values = detail::parse_list(name("grid", "values"), *values);
  if (start || stop || count) {
    if (!(start && stop && count)) throw ConfigError("grid: start, stop and count must be given together");
    const double a = detail::parse_double(name("grid", "start"), *start);
    const double b = detail::parse_double(name("grid", "stop"), *stop);
    const int n = detail::parse_int(name("grid", "count"), *count);
    if (n < 1) throw ConfigError("grid.count must be >= 1");
    for (int i = 0; i < n; ++i) g.values.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  }
  if (auto v = get("grid", "resolutions")) {
    g.resolutions.clear();
    for (double r : detail::parse_list(name("grid", "resolutions"), *v)) {
      if (r != std::floor(r)) throw ConfigError("grid.resolutions: integers expected");
      g.resolutions.push_back(static_cast<int>(r));
    }
  }
  if (auto v = get("grid", "random")) g.random = detail::parse_int(name("grid", "random"), *v);
  if (auto v = get("grid", "nodes")) g.nodes = detail::parse_int(name("grid", "nodes"), *v);

  if (auto v = get("output", "csv")) c.output.csv = *v;
  if (auto v = get("output", "svg")) c.output.svg = detail::parse_bool(name("output", "svg"), *v);
  if (auto v = get("assert", "enabled")) c.asserts.enabled = detail::parse_bool(name("assert", "enabled"), *v);
  if (auto v = get("assert", "tolerance")) c.asserts.tolerance = detail::parse_double(name("assert", "tolerance"), *v);
  return c;
}

/// SNSPEC_TAU_M and SNSPEC_TAU_0 override the solver tolerances.
inline void apply_environment(ExperimentConfig& c) {
  auto read = [](const char* var, double& target) {
    if (const char* env = std::getenv(var)) target = detail::parse_double(var, env);
  };
  read("SNSPEC_TAU_M", c.solver.tau_M);
  read("SNSPEC_TAU_0", c.solver.tau_0);
}

}  // namespace snspec
