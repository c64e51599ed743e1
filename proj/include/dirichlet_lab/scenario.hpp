#pragma once

// Scenario files (JSON, "schema_version": 1). See docs/scenario.md for the schema.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirichlet_lab/class_e.hpp"
#include "dirichlet_lab/dirichlet.hpp"
#include "dirichlet_lab/function_spec.hpp"
#include "dirichlet_lab/numeric_limit.hpp"
#include "dirichlet_lab/quadrature.hpp"

namespace dirichlet_lab {

/// Validation failure; `path()` names the offending field, e.g. "sweep[2].n".
class ScenarioError : public std::runtime_error {
public:
  ScenarioError(std::string path, const std::string& message)
      : std::runtime_error((path.empty() ? std::string("scenario") : path) + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

enum class Check { coeffs, partial_sum, error_repr, lebesgue, bound, k, class_e, converge };

inline const std::vector<std::pair<Check, const char*>>& check_names() {
  static const std::vector<std::pair<Check, const char*>> names{
      {Check::coeffs, "coeffs"}, {Check::partial_sum, "partial-sum"}, {Check::error_repr, "error-repr"},
      {Check::lebesgue, "lebesgue"}, {Check::bound, "bound"},         {Check::k, "k"},
      {Check::class_e, "class-e"}, {Check::converge, "converge"},
  };
  return names;
}

inline const char* to_string(Check c) {
  for (const auto& [check, name] : check_names()) {
    if (check == c) return name;
  }
  return "?";
}

inline std::optional<Check> parse_check(const std::string& name) {
  for (const auto& [check, n] : check_names()) {
    if (name == n) return check;
  }
  return std::nullopt;
}

/// Geometric sweep: l_j = l0 * ratio^j, n_j = ceil(l_j^exponent), j = 0..steps-1.
inline std::vector<GridParams> geometric_sweep(double l0, double ratio, int steps, double exponent) {
  std::vector<GridParams> out;
  for (int j = 0; j < steps; ++j) {
    const double l = l0 * std::pow(ratio, j);
    out.emplace_back(l, static_cast<long>(std::ceil(std::pow(l, exponent) - 1e-9)));
  }
  return out;
}

/// l strictly increasing and eta strictly decreasing along the sweep.
inline void validate_sweep(const std::vector<GridParams>& sweep) {
  if (sweep.empty()) throw ScenarioError("sweep", "must contain at least one (n, l) step");
  for (std::size_t j = 1; j < sweep.size(); ++j) {
    const std::string path = "sweep[" + std::to_string(j) + "]";
    if (!(sweep[j].l() > sweep[j - 1].l())) throw ScenarioError(path + ".l", "l must increase strictly along the sweep");
    if (!(sweep[j].eta() < sweep[j - 1].eta())) {
      throw ScenarioError(path + ".n", "eta = l/n must decrease strictly along the sweep");
    }
  }
}

struct Scenario {
  int schema_version = 1;
  std::string name;
  FunctionSpec function;
  std::vector<double> x_points;
  bool uniform = false;  // x_points came from an interval grid
  std::vector<GridParams> sweep;
  QuadratureConfig quadrature;
  std::vector<Check> checks;
  SumRoute route = SumRoute::kernel_convolution;
  double converge_threshold = 0.05;
  bool converge_with_bound = false;
  double h_min = 1e-3;
  double h_max = 1e3;
  int points_per_decade = 4;
  std::vector<double> c_list = default_class_e_c_list();
  std::vector<double> t_grid = default_class_e_t_grid();
  long samples = 10000;
  std::uint64_t seed = 1;
  LimitTestConfig limit;

  bool has(Check c) const {
    for (Check x : checks) {
      if (x == c) return true;
    }
    return false;
  }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw ScenarioError(path.empty() ? key : path + "." + key, "is required");
  return obj.at(key);
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ScenarioError(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioError(path, "must be finite");
  return d;
}

inline double positive(const json& v, const std::string& path) {
  const double d = number(v, path);
  if (!(d > 0.0)) throw ScenarioError(path, "must be > 0");
  return d;
}

inline long integer(const json& v, const std::string& path, long min_value) {
  if (!v.is_number_integer()) throw ScenarioError(path, "must be an integer");
  const long n = v.get<long>();
  if (n < min_value) throw ScenarioError(path, "must be >= " + std::to_string(min_value));
  return n;
}

inline std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ScenarioError(path, "must be a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline void apply_quadrature(const json& q, QuadratureConfig& cfg) {
  if (!q.is_object()) throw ScenarioError("quadrature", "must be an object");
  for (const auto& [key, value] : q.items()) {
    const std::string path = "quadrature." + key;
    if (key == "nodes_per_panel") {
      cfg.nodes_per_panel = static_cast<int>(integer(value, path, 2));
    } else if (key == "min_panels_per_oscillation") {
      cfg.min_panels_per_oscillation = static_cast<int>(integer(value, path, 1));
    } else if (key == "abs_tol") {
      cfg.abs_tol = positive(value, path);
    } else if (key == "rel_tol") {
      cfg.rel_tol = positive(value, path);
    } else if (key == "singularity_switch_radius") {
      cfg.singularity_switch_radius = positive(value, path);
    } else if (key == "max_panels") {
      cfg.max_panels = integer(value, path, 1);
    } else {
      throw ScenarioError(path, "unknown quadrature setting");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("quadrature", e.what());
  }
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) {
  using detail::json;
  if (!doc.is_object()) throw ScenarioError("", "top level must be a JSON object");
  Scenario s;

  s.schema_version = static_cast<int>(detail::integer(detail::require(doc, "schema_version", ""), "schema_version", 1));
  if (s.schema_version != 1) throw ScenarioError("schema_version", "unsupported version (expected 1)");
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ScenarioError("name", "must be a string");
    s.name = doc["name"].get<std::string>();
  }

  const json& fn = detail::require(doc, "function", "");
  if (!fn.is_string()) throw ScenarioError("function", "must be a DSL string");
  std::optional<double> period;
  std::optional<Interval> support;
  if (doc.contains("period_hint")) period = detail::positive(doc["period_hint"], "period_hint");
  if (doc.contains("support_hint")) {
    const auto iv = detail::number_list(doc["support_hint"], "support_hint");
    if (iv.size() != 2 || !(iv[0] <= iv[1])) throw ScenarioError("support_hint", "must be [lo, hi] with lo <= hi");
    support = Interval{iv[0], iv[1]};
  }
  try {
    s.function = FunctionSpec(fn.get<std::string>(), period, support);
  } catch (const ParseError& e) {
    throw ScenarioError("function", e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("function", e.what());
  }

  const json& checks = detail::require(doc, "checks", "");
  if (!checks.is_array() || checks.empty()) throw ScenarioError("checks", "must be a nonempty array");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string path = "checks[" + std::to_string(i) + "]";
    if (!checks[i].is_string()) throw ScenarioError(path, "must be a string");
    const auto c = parse_check(checks[i].get<std::string>());
    if (!c) throw ScenarioError(path, "unknown check '" + checks[i].get<std::string>() + "'");
    if (!s.has(*c)) s.checks.push_back(*c);
  }

  if (doc.contains("x_points")) {
    const json& xp = doc["x_points"];
    if (xp.is_object()) {
      const auto iv = detail::number_list(detail::require(xp, "interval", "x_points"), "x_points.interval");
      if (iv.size() != 2 || !(iv[0] <= iv[1])) throw ScenarioError("x_points.interval", "must be [a, b] with a <= b");
      const long count = detail::integer(detail::require(xp, "count", "x_points"), "x_points.count", 1);
      for (long i = 0; i < count; ++i) {
        s.x_points.push_back(count == 1 ? iv[0]
                                        : iv[0] + (iv[1] - iv[0]) * static_cast<double>(i) / static_cast<double>(count - 1));
      }
      s.uniform = true;
    } else {
      s.x_points = detail::number_list(xp, "x_points");
    }
  }

  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    if (sw.is_array()) {
      if (sw.empty()) throw ScenarioError("sweep", "must contain at least one (n, l) step");
      for (std::size_t j = 0; j < sw.size(); ++j) {
        const std::string path = "sweep[" + std::to_string(j) + "]";
        if (!sw[j].is_object()) throw ScenarioError(path, "must be an object with n and l");
        const long n = detail::integer(detail::require(sw[j], "n", path), path + ".n", 1);
        const double l = detail::positive(detail::require(sw[j], "l", path), path + ".l");
        s.sweep.emplace_back(l, n);
      }
    } else if (sw.is_object()) {
      const double l0 = detail::positive(detail::require(sw, "l0", "sweep"), "sweep.l0");
      const int steps = static_cast<int>(detail::integer(detail::require(sw, "steps", "sweep"), "sweep.steps", 1));
      const double ratio = sw.contains("ratio") ? detail::positive(sw["ratio"], "sweep.ratio") : 2.0;
      const double exponent = sw.contains("exponent") ? detail::positive(sw["exponent"], "sweep.exponent") : 2.0;
      if (!(ratio > 1.0)) throw ScenarioError("sweep.ratio", "must be > 1");
      if (!(exponent > 1.0)) throw ScenarioError("sweep.exponent", "must be > 1 so that eta -> 0");
      s.sweep = geometric_sweep(l0, ratio, steps, exponent);
    } else {
      throw ScenarioError("sweep", "must be an array of {n, l} or a rule {l0, steps, ratio, exponent}");
    }
    validate_sweep(s.sweep);
  }

  if (doc.contains("quadrature")) detail::apply_quadrature(doc["quadrature"], s.quadrature);

  if (doc.contains("route")) {
    const json& r = doc["route"];
    if (r == "kernel_convolution") {
      s.route = SumRoute::kernel_convolution;
    } else if (r == "coefficient_sum") {
      s.route = SumRoute::coefficient_sum;
    } else {
      throw ScenarioError("route", "must be \"kernel_convolution\" or \"coefficient_sum\"");
    }
  }

  if (doc.contains("converge")) {
    const json& c = doc["converge"];
    if (!c.is_object()) throw ScenarioError("converge", "must be an object");
    if (c.contains("threshold")) s.converge_threshold = detail::positive(c["threshold"], "converge.threshold");
    if (c.contains("with_bound")) {
      if (!c["with_bound"].is_boolean()) throw ScenarioError("converge.with_bound", "must be a boolean");
      s.converge_with_bound = c["with_bound"].get<bool>();
    }
  }

  if (doc.contains("lebesgue")) {
    const json& l = doc["lebesgue"];
    if (!l.is_object()) throw ScenarioError("lebesgue", "must be an object");
    if (l.contains("h_min")) s.h_min = detail::positive(l["h_min"], "lebesgue.h_min");
    if (l.contains("h_max")) s.h_max = detail::positive(l["h_max"], "lebesgue.h_max");
    if (l.contains("points_per_decade")) {
      s.points_per_decade = static_cast<int>(detail::integer(l["points_per_decade"], "lebesgue.points_per_decade", 1));
    }
    if (!(s.h_min < s.h_max)) throw ScenarioError("lebesgue.h_max", "must exceed h_min");
  }

  if (doc.contains("class_e")) {
    const json& c = doc["class_e"];
    if (!c.is_object()) throw ScenarioError("class_e", "must be an object");
    if (c.contains("c_list")) {
      s.c_list = detail::number_list(c["c_list"], "class_e.c_list");
      for (std::size_t i = 0; i < s.c_list.size(); ++i) {
        if (!(s.c_list[i] > 0.0)) throw ScenarioError("class_e.c_list[" + std::to_string(i) + "]", "must be > 0");
      }
    }
    if (c.contains("T_grid")) {
      s.t_grid = detail::number_list(c["T_grid"], "class_e.T_grid");
      for (std::size_t i = 0; i < s.t_grid.size(); ++i) {
        const std::string path = "class_e.T_grid[" + std::to_string(i) + "]";
        if (!(s.t_grid[i] > 0.0)) throw ScenarioError(path, "must be > 0");
        if (i > 0 && !(s.t_grid[i] > s.t_grid[i - 1])) throw ScenarioError(path, "T grid must increase");
      }
    }
  }

  if (doc.contains("samples")) s.samples = detail::integer(doc["samples"], "samples", 1);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long>() >= 0)) {
      throw ScenarioError("seed", "must be a nonnegative integer");
    }
    s.seed = doc["seed"].get<std::uint64_t>();
  }

  const bool needs_x = s.has(Check::partial_sum) || s.has(Check::error_repr) || s.has(Check::lebesgue) ||
                       s.has(Check::bound) || s.has(Check::k) || s.has(Check::converge);
  const bool needs_sweep = s.has(Check::coeffs) || s.has(Check::partial_sum) || s.has(Check::error_repr) ||
                           s.has(Check::bound) || s.has(Check::k) || s.has(Check::converge);
  if (needs_x && s.x_points.empty()) throw ScenarioError("x_points", "is required by the requested checks");
  if (needs_sweep && s.sweep.empty()) throw ScenarioError("sweep", "is required by the requested checks");
  return s;
}

inline Scenario parse_scenario_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

}  // namespace dirichlet_lab
