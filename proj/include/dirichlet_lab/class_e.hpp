#pragma once

// Tail-average diagnostics for the class of locally integrable f with
// (1/T) int_T^{T+c} |f| -> 0 and (1/T) int_{-T-c}^{-T} |f| -> 0 for every c > 0,
// and the one-period bound k M / T for periodic f.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dirichlet_lab/function_spec.hpp"
#include "dirichlet_lab/numeric_limit.hpp"
#include "dirichlet_lab/quadrature.hpp"

namespace dirichlet_lab {

struct TailAverageSample {
  double T = 0.0;
  double c = 0.0;
  double right_value = 0.0;  // (1/T) int_T^{T+c} |f|
  double left_value = 0.0;   // (1/T) int_{-T-c}^{-T} |f|
};

struct ClassESeries {
  double c = 0.0;
  std::vector<TailAverageSample> samples;
  bool right_consistent = false;
  bool left_consistent = false;
  bool consistent() const { return right_consistent && left_consistent; }
};

struct ClassEReport {
  std::vector<ClassESeries> series;
  bool consistent() const {
    for (const auto& s : series) {
      if (!s.consistent()) return false;
    }
    return !series.empty();
  }
};

struct PeriodicBound {
  long k = 0;
  double M = 0.0;  // int_0^m |f|
  double lhs = 0.0;
  double bound = 0.0;
  bool holds = false;
};

inline std::vector<double> default_class_e_c_list() { return {0.5, 1.0, 2.0 * std::numbers::pi}; }
inline std::vector<double> default_class_e_t_grid() {
  return {10.0, std::pow(10.0, 1.5), 100.0, std::pow(10.0, 2.5), 1000.0};
}

/// int_a^b |f| over the part of [a, b] inside f's support.
inline double abs_integral(const FunctionSpec& f, double a, double b, const QuadratureConfig& cfg) {
  const auto domain = f.clip(a, b);
  if (!domain) return 0.0;
  return integrate_abs(f, domain->lo, domain->hi, f.breakpoints_in(domain->lo, domain->hi), f.frequency_hint(), cfg)
      .value;
}

inline TailAverageSample tail_average(const FunctionSpec& f, double T, double c, const QuadratureConfig& cfg) {
  if (!(T > 0.0) || !(c > 0.0)) throw std::invalid_argument("tail_average: need T > 0 and c > 0");
  return {T, c, abs_integral(f, T, T + c, cfg) / T, abs_integral(f, -T - c, -T, cfg) / T};
}

/// Consistency per c uses the running sup from each T onward (the limsup
/// envelope), which must shrink over the last three grid points.
inline ClassEReport class_e_diagnostic(const FunctionSpec& f, const std::vector<double>& c_list,
                                       const std::vector<double>& t_grid, const QuadratureConfig& cfg,
                                       const LimitTestConfig& limit = {}) {
  if (c_list.empty()) throw std::invalid_argument("class_e_diagnostic: c_list must be nonempty");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("class_e_diagnostic: T grid must increase");
  }
  ClassEReport report;
  for (double c : c_list) {
    ClassESeries s;
    s.c = c;
    for (double T : t_grid) s.samples.push_back(tail_average(f, T, c, cfg));
    std::vector<double> right(s.samples.size());
    std::vector<double> left(s.samples.size());
    double sup_r = 0.0;
    double sup_l = 0.0;
    for (std::size_t i = s.samples.size(); i-- > 0;) {
      sup_r = std::max(sup_r, s.samples[i].right_value);
      sup_l = std::max(sup_l, s.samples[i].left_value);
      right[i] = sup_r;
      left[i] = sup_l;
    }
    s.right_consistent = consistent_with_zero_limit(right, limit);
    s.left_consistent = consistent_with_zero_limit(left, limit);
    report.series.push_back(std::move(s));
  }
  return report;
}

/// (1/T) int_T^{T+c} |f| against k M / T with k the least integer with c < k m
/// and M = int_0^m |f| over one declared period.
inline PeriodicBound periodic_bound_check(const FunctionSpec& f, double c, double T, const QuadratureConfig& cfg,
                                          double tolerance = 1e-8) {
  if (!f.period_hint()) throw std::invalid_argument("periodic_bound_check: function has no period_hint");
  if (!(T > 0.0) || !(c > 0.0)) throw std::invalid_argument("periodic_bound_check: need T > 0 and c > 0");
  const double m = *f.period_hint();
  PeriodicBound out;
  out.k = static_cast<long>(std::floor(c / m)) + 1;
  out.M = abs_integral(f, 0.0, m, cfg);
  out.lhs = abs_integral(f, T, T + c, cfg) / T;
  out.bound = static_cast<double>(out.k) * out.M / T;
  out.holds = out.lhs <= out.bound + tolerance;
  return out;
}

}  // namespace dirichlet_lab
