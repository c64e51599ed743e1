#pragma once

// Scenario execution. Every check produces in-memory files plus pass flags;
// nothing touches the filesystem until write_report().

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dirichlet_lab/class_e.hpp"
#include "dirichlet_lab/dirichlet.hpp"
#include "dirichlet_lab/lebesgue.hpp"
#include "dirichlet_lab/report.hpp"
#include "dirichlet_lab/scenario.hpp"

namespace dirichlet_lab {

inline constexpr double route_tolerance = 1e-7;
inline constexpr double split_tolerance = 1e-8;
inline constexpr double k_identity_tolerance = 1e-7;
inline constexpr double ratio_tolerance = 1e-12;
inline constexpr double periodic_tolerance = 1e-8;

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_invalid_scenario = 2, exit_quadrature_failure = 3 };

struct OutputFile {
  std::string name;
  std::string content;
};

struct CheckOutcome {
  Check check = Check::coeffs;
  bool hard_pass = true;
  bool soft_pass = true;
  nlohmann::json details = nlohmann::json::object();
};

struct RunReport {
  std::vector<OutputFile> files;
  std::vector<CheckOutcome> outcomes;

  bool hard_pass() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.hard_pass; });
  }
  bool soft_pass() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.soft_pass; });
  }
  int exit_code(bool strict) const {
    return hard_pass() && (!strict || soft_pass()) ? exit_ok : exit_check_failed;
  }
  const OutputFile* find(const std::string& name) const {
    for (const auto& f : files) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
};

struct RunOptions {
  unsigned threads = 1;
};

/// Runs body(i) for i in [0, count) on up to `threads` workers. Results must be
/// written to per-index slots. The exception of the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (count == 0) return;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Abs errors ordered by sweep step: the trailing strictly decreasing run spans at
/// least three steps and ends at or below the threshold. Sequences that sit
/// entirely at the round-off floor count as converged.
inline bool convergence_demonstrated(std::span<const double> errors, double threshold, double zero_floor = 1e-12) {
  if (errors.empty()) return false;
  if (std::all_of(errors.begin(), errors.end(), [&](double e) { return e <= zero_floor; })) return true;
  if (errors.size() < 3) return false;
  std::size_t run = 1;
  for (std::size_t i = errors.size() - 1; i > 0 && errors[i - 1] > errors[i]; --i) ++run;
  return run >= 3 && errors.back() <= threshold;
}

namespace detail {

// JSON numbers carry the same 12 significant digits as the CSV files.
inline nlohmann::json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::strtod(format_value(v).c_str(), nullptr);
}

inline std::uint64_t task_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct GridPoint {
  std::size_t j;
  std::size_t xi;
};

inline std::vector<GridPoint> grid_points(const Scenario& s) {
  std::vector<GridPoint> out;
  for (std::size_t j = 0; j < s.sweep.size(); ++j) {
    for (std::size_t i = 0; i < s.x_points.size(); ++i) out.push_back({j, i});
  }
  return out;
}

inline CheckOutcome run_coeffs(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::coeffs};
  std::vector<std::vector<CoefficientPair>> tables(s.sweep.size());
  parallel_for(s.sweep.size(), opt.threads, [&](std::size_t j) {
    const GridParams& g = s.sweep[j];
    for (long k = 0; k <= g.n(); ++k) tables[j].push_back(coeff(s.function, g.l(), k, s.quadrature));
  });
  for (std::size_t j = 0; j < tables.size(); ++j) {
    CsvTable csv{"k", "a", "b"};
    for (const auto& c : tables[j]) csv.row(c.k, c.a, c.b);
    report.files.push_back({"coeffs_j" + std::to_string(j) + ".csv", csv.text()});
  }
  out.details["grids"] = s.sweep.size();
  return out;
}

inline CheckOutcome run_partial_sum(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::partial_sum};
  const auto points = grid_points(s);
  std::vector<std::pair<double, double>> values(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const GridParams& g = s.sweep[points[i].j];
    const double x = s.x_points[points[i].xi];
    values[i] = {partial_sum(s.function, x, g, s.quadrature).value,
                 partial_sum_via_kernel(s.function, x, g, s.quadrature).value};
  });
  CsvTable csv{"x", "n", "l", "value", "via"};
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GridParams& g = s.sweep[points[i].j];
    const double x = s.x_points[points[i].xi];
    csv.row(x, g.n(), g.l(), values[i].first, to_string(SumRoute::coefficient_sum));
    csv.row(x, g.n(), g.l(), values[i].second, to_string(SumRoute::kernel_convolution));
    worst = std::max(worst, std::abs(values[i].first - values[i].second));
  }
  report.files.push_back({"partial_sum.csv", csv.text()});
  out.hard_pass = worst <= route_tolerance;
  out.details["max_route_gap"] = num(worst);
  out.details["tolerance"] = route_tolerance;
  return out;
}

inline CheckOutcome run_error_repr(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::error_repr};
  const auto points = grid_points(s);
  std::vector<std::pair<ErrorRepresentation, DecompositionResult>> rows(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const GridParams& g = s.sweep[points[i].j];
    const double x = s.x_points[points[i].xi];
    rows[i] = {error_representation(s.function, x, g, s.quadrature, s.route), mn_split(s.function, x, g, s.quadrature)};
  });
  CsvTable csv{"j", "x", "n", "l", "lhs", "integral_term", "residual", "M", "N", "split_gap"};
  double worst_gap = 0.0;
  std::vector<std::vector<double>> residuals(s.x_points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GridParams& g = s.sweep[points[i].j];
    const auto& [er, mn] = rows[i];
    const double gap = mn.total - er.integral_term;
    csv.row(points[i].j, s.x_points[points[i].xi], g.n(), g.l(), er.lhs, er.integral_term, er.residual, mn.M, mn.N, gap);
    worst_gap = std::max(worst_gap, std::abs(gap));
    residuals[points[i].xi].push_back(std::abs(er.residual));
  }
  report.files.push_back({"error_repr.csv", csv.text()});
  // The residual has no rate; only its monotone decay along the sweep is reported.
  bool decays = true;
  for (const auto& r : residuals) {
    for (std::size_t j = 1; j < r.size(); ++j) decays = decays && r[j] <= r[j - 1];
  }
  out.hard_pass = worst_gap <= split_tolerance;
  out.soft_pass = decays;
  out.details["max_split_gap"] = num(worst_gap);
  out.details["residual_nonincreasing"] = decays;
  return out;
}

inline CheckOutcome run_lebesgue(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::lebesgue};
  std::vector<PhiProfile> profiles(s.x_points.size());
  parallel_for(profiles.size(), opt.threads, [&](std::size_t i) {
    profiles[i] = phi_profile(s.function, s.x_points[i], s.h_min, s.h_max, s.points_per_decade, s.quadrature, s.limit);
  });
  const auto points = grid_points(s);
  std::vector<double> modulus(points.size(), std::nan(""));
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const GridParams& g = s.sweep[points[i].j];
    if (g.n() >= 2) modulus[i] = translation_modulus(s.function, s.x_points[points[i].xi], g, s.quadrature);
  });

  nlohmann::json doc;
  doc["function"] = s.function.source();
  doc["profiles"] = nlohmann::json::array();
  bool consistent = true;
  for (const auto& p : profiles) {
    nlohmann::json item;
    item["x0"] = num(p.x0);
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& sample : p.samples) samples.push_back({num(sample.h), num(sample.value)});
    item["samples"] = std::move(samples);
    nlohmann::json slopes = nlohmann::json::array();
    for (double v : p.decade_slopes) slopes.push_back(num(v));
    item["decade_slopes"] = std::move(slopes);
    item["small_slope"] = num(p.small_slope);
    item["large_slope"] = num(p.large_slope);
    item["small_h_consistent"] = p.small_h_consistent;
    item["large_h_consistent"] = p.large_h_consistent;
    consistent = consistent && p.small_h_consistent && p.large_h_consistent;
    doc["profiles"].push_back(std::move(item));
  }
  doc["modulus"] = nlohmann::json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::isnan(modulus[i])) continue;
    const GridParams& g = s.sweep[points[i].j];
    doc["modulus"].push_back({{"j", points[i].j},
                              {"x", num(s.x_points[points[i].xi])},
                              {"n", g.n()},
                              {"l", num(g.l())},
                              {"eta", num(g.eta())},
                              {"value", num(modulus[i])}});
  }
  report.files.push_back({"lebesgue.json", doc.dump(2) + "\n"});
  out.soft_pass = consistent;
  out.details["consistent"] = consistent;
  return out;
}

struct BoundRow {
  bool evaluated = false;
  BoundBreakdown b;
  double ineq3 = 0.0;
  double ineq4 = 0.0;
};

inline CheckOutcome run_bound(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::bound};
  const auto points = grid_points(s);
  std::vector<BoundRow> rows(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const GridParams& g = s.sweep[points[i].j];
    if (!(2.0 * g.eta() <= g.l())) return;
    const double x = s.x_points[points[i].xi];
    const std::uint64_t seed = task_seed(s.seed, i);
    rows[i] = {true, bound_check(s.function, x, g, s.quadrature), inequality_3_sampler(g, s.samples, seed),
               inequality_4_sampler(s.function, x, g, s.samples, seed ^ 0x5DEECE66DULL)};
  });
  CsvTable csv{"j",   "x",     "n",    "l",     "eta",       "term_modulus", "term_tail",
               "term_local", "rhs_total", "lhs", "slack", "holds", "ineq3_max", "ineq3_bound", "ineq4_max"};
  std::size_t skipped = 0;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!rows[i].evaluated) {
      ++skipped;
      continue;
    }
    const GridParams& g = s.sweep[points[i].j];
    const auto& r = rows[i];
    const double cap = std::numbers::pi * static_cast<double>(g.n());
    const bool ok = r.b.holds && r.ineq3 <= cap && r.ineq4 <= 1.0 + ratio_tolerance;
    if (!ok) ++failures;
    csv.row(points[i].j, s.x_points[points[i].xi], g.n(), g.l(), g.eta(), r.b.term_modulus, r.b.term_tail,
            r.b.term_local, r.b.rhs_total, r.b.lhs, r.b.slack, r.b.holds, r.ineq3, cap, r.ineq4);
  }
  report.files.push_back({"bound.csv", csv.text()});
  out.hard_pass = failures == 0;
  out.details["failures"] = failures;
  out.details["skipped"] = skipped;
  out.details["samples"] = s.samples;
  return out;
}

inline CheckOutcome run_k(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::k};
  const auto points = grid_points(s);
  std::vector<std::optional<KBreakdown>> rows(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const GridParams& g = s.sweep[points[i].j];
    if (g.eta() < 1.0 && 1.0 < g.l()) rows[i] = k_decomposition(s.function, s.x_points[points[i].xi], g, s.quadrature);
  });
  CsvTable csv{"j", "x", "n", "l", "eta", "k1", "k2", "k3", "k4", "middle_term", "identity_gap"};
  std::size_t skipped = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!rows[i]) {
      ++skipped;
      continue;
    }
    const GridParams& g = s.sweep[points[i].j];
    const KBreakdown& k = *rows[i];
    worst = std::max(worst, std::abs(k.identity_gap()));
    csv.row(points[i].j, s.x_points[points[i].xi], g.n(), g.l(), g.eta(), k.k1, k.k2, k.k3, k.k4, k.middle_term,
            k.identity_gap());
  }
  report.files.push_back({"k.csv", csv.text()});
  out.hard_pass = worst <= k_identity_tolerance;
  out.details["max_identity_gap"] = num(worst);
  out.details["skipped"] = skipped;
  return out;
}

inline CheckOutcome run_class_e(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::class_e};
  const ClassEReport diag = class_e_diagnostic(s.function, s.c_list, s.t_grid, s.quadrature, s.limit);
  CsvTable csv{"c", "T", "right_value", "left_value"};
  nlohmann::json doc;
  doc["function"] = s.function.source();
  doc["series"] = nlohmann::json::array();
  for (const auto& series : diag.series) {
    for (const auto& sample : series.samples) csv.row(sample.c, sample.T, sample.right_value, sample.left_value);
    doc["series"].push_back({{"c", num(series.c)},
                             {"right_consistent", series.right_consistent},
                             {"left_consistent", series.left_consistent}});
  }
  doc["consistent"] = diag.consistent();
  report.files.push_back({"class_e.csv", csv.text()});

  if (s.function.period_hint()) {
    std::vector<std::pair<double, double>> cases;
    for (double c : s.c_list) {
      for (double T : s.t_grid) cases.emplace_back(c, T);
    }
    std::vector<PeriodicBound> bounds(cases.size());
    parallel_for(cases.size(), opt.threads, [&](std::size_t i) {
      bounds[i] = periodic_bound_check(s.function, cases[i].first, cases[i].second, s.quadrature, periodic_tolerance);
    });
    CsvTable pcsv{"c", "T", "k", "M", "lhs", "bound", "holds"};
    bool all_hold = true;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto& b = bounds[i];
      pcsv.row(cases[i].first, cases[i].second, b.k, b.M, b.lhs, b.bound, b.holds);
      all_hold = all_hold && b.holds;
    }
    report.files.push_back({"class_e_periodic.csv", pcsv.text()});
    doc["periodic_bound_holds"] = all_hold;
    out.hard_pass = all_hold;
  }
  report.files.push_back({"class_e.json", doc.dump(2) + "\n"});
  out.soft_pass = diag.consistent();
  out.details["consistent"] = diag.consistent();
  return out;
}

struct ConvergeRow {
  double S = 0.0;
  double target = 0.0;
  std::optional<double> rhs;
};

inline CheckOutcome run_converge(const Scenario& s, const RunOptions& opt, RunReport& report) {
  CheckOutcome out{Check::converge};
  const auto points = grid_points(s);
  std::vector<ConvergeRow> rows(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    const GridParams& g = s.sweep[points[i].j];
    const double x = s.x_points[points[i].xi];
    rows[i].S = partial_sum(s.function, x, g, s.quadrature, s.route).value;
    rows[i].target = s.function(x);
    if (s.converge_with_bound && 2.0 * g.eta() <= g.l()) {
      rows[i].rhs = bound_check(s.function, x, g, s.quadrature).rhs_total;
    }
  });
  CsvTable csv{"j", "n", "l", "eta", "x", "S", "target", "abs_error", "bound_rhs"};
  std::vector<std::vector<double>> per_x(s.x_points.size());
  std::vector<double> max_per_step(s.sweep.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GridParams& g = s.sweep[points[i].j];
    const auto& r = rows[i];
    const double err = std::abs(r.S - r.target);
    csv.row(points[i].j, g.n(), g.l(), g.eta(), s.x_points[points[i].xi], r.S, r.target, err,
            r.rhs ? format_value(*r.rhs) : std::string());
    per_x[points[i].xi].push_back(err);
    max_per_step[points[i].j] = std::max(max_per_step[points[i].j], err);
  }
  report.files.push_back({"converge.csv", csv.text()});

  nlohmann::json flags = nlohmann::json::array();
  bool pointwise = true;
  for (std::size_t i = 0; i < per_x.size(); ++i) {
    const bool ok = convergence_demonstrated(per_x[i], s.converge_threshold, s.limit.zero_floor);
    pointwise = pointwise && ok;
    flags.push_back({{"x", num(s.x_points[i])}, {"demonstrated", ok}, {"final_abs_error", num(per_x[i].back())}});
  }
  out.details["threshold"] = num(s.converge_threshold);
  out.details["pointwise"] = flags;
  bool demonstrated = pointwise;
  if (s.uniform) {
    const bool uniform = convergence_demonstrated(max_per_step, s.converge_threshold, s.limit.zero_floor);
    nlohmann::json maxima = nlohmann::json::array();
    for (double m : max_per_step) maxima.push_back(num(m));
    out.details["uniform_max_abs_error"] = std::move(maxima);
    out.details["uniform_demonstrated"] = uniform;
    demonstrated = uniform;
  }
  out.details["demonstrated"] = demonstrated;
  out.soft_pass = demonstrated;
  return out;
}

}  // namespace detail

/// Runs every requested check in the canonical order of check_names().
/// Output is a pure function of the scenario; `opt.threads` only changes timing.
inline RunReport run_scenario(const Scenario& s, const RunOptions& opt = {}) {
  RunReport report;
  for (const auto& [check, name] : check_names()) {
    if (!s.has(check)) continue;
    switch (check) {
      case Check::coeffs: report.outcomes.push_back(detail::run_coeffs(s, opt, report)); break;
      case Check::partial_sum: report.outcomes.push_back(detail::run_partial_sum(s, opt, report)); break;
      case Check::error_repr: report.outcomes.push_back(detail::run_error_repr(s, opt, report)); break;
      case Check::lebesgue: report.outcomes.push_back(detail::run_lebesgue(s, opt, report)); break;
      case Check::bound: report.outcomes.push_back(detail::run_bound(s, opt, report)); break;
      case Check::k: report.outcomes.push_back(detail::run_k(s, opt, report)); break;
      case Check::class_e: report.outcomes.push_back(detail::run_class_e(s, opt, report)); break;
      case Check::converge: report.outcomes.push_back(detail::run_converge(s, opt, report)); break;
    }
  }

  nlohmann::json summary;
  summary["schema_version"] = 1;
  summary["name"] = s.name;
  summary["function"] = s.function.source();
  summary["seed"] = s.seed;
  summary["route"] = to_string(s.route);
  summary["quadrature"] = {{"nodes_per_panel", s.quadrature.nodes_per_panel},
                           {"min_panels_per_oscillation", s.quadrature.min_panels_per_oscillation},
                           {"abs_tol", s.quadrature.abs_tol},
                           {"rel_tol", s.quadrature.rel_tol},
                           {"singularity_switch_radius", s.quadrature.singularity_switch_radius},
                           {"max_panels", s.quadrature.max_panels}};
  summary["checks"] = nlohmann::json::array();
  for (const auto& o : report.outcomes) {
    summary["checks"].push_back(
        {{"check", to_string(o.check)}, {"hard_pass", o.hard_pass}, {"soft_pass", o.soft_pass}, {"details", o.details}});
  }
  summary["hard_pass"] = report.hard_pass();
  summary["soft_pass"] = report.soft_pass();
  nlohmann::json names = nlohmann::json::array();
  for (const auto& f : report.files) names.push_back(f.name);
  summary["files"] = std::move(names);
  report.files.push_back({"summary.json", summary.dump(2) + "\n"});
  return report;
}

inline void write_report(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : report.files) {
    std::ofstream out(dir / f.name, std::ios::binary | std::ios::trunc);
    out << f.content;
    if (!out) throw std::runtime_error("cannot write " + (dir / f.name).string());
  }
}

}  // namespace dirichlet_lab
