#pragma once

// Quantities of the Lebesgue-type convergence test at a point x0:
// Phi(h) = int_0^h |phi_x0|, the translation modulus, the three-term bound on
// |(1/l) int_0^l phi_x0 D_n^l| and the integration-by-parts split K1..K4 of
// eta int_eta^l |phi_x0| / t^2 dt.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dirichlet_lab/dirichlet.hpp"
#include "dirichlet_lab/function_spec.hpp"
#include "dirichlet_lab/numeric_limit.hpp"
#include "dirichlet_lab/quadrature.hpp"

namespace dirichlet_lab {

struct PhiSample {
  double h = 0.0;
  double value = 0.0;
};

struct PhiProfile {
  FunctionSpec f;
  double x0 = 0.0;
  std::vector<PhiSample> samples;
  std::vector<double> decade_slopes;  // max Phi(h)/h per sampled decade, smallest h first
  double small_slope = 0.0;
  double large_slope = 0.0;
  bool small_h_consistent = false;  // Phi(h) = o(h) as h -> 0
  bool large_h_consistent = false;  // Phi(h) = o(h) as h -> infinity
};

struct BoundBreakdown {
  double term_modulus = 0.0;  // (pi/2) int_eta^l |phi(t) - phi(t+eta)| / t dt
  double term_tail = 0.0;     // eta int_eta^l |phi| / t^2 dt
  double term_local = 0.0;    // (pi/eta) int_0^{2 eta} |phi|
  double rhs_total = 0.0;
  double lhs = 0.0;    // |(1/l) int_0^l phi D_n^l|
  double slack = 0.0;  // allowance standing in for the o(1) term
  bool holds = false;
};

struct KBreakdown {
  double k1 = 0.0;  // Phi(l) / (n l)
  double k2 = 0.0;  // Phi(eta) / eta
  double k3 = 0.0;  // 2 eta int_eta^1 Phi(t) / t^3 dt
  double k4 = 0.0;  // 2 eta int_1^l Phi(t) / t^3 dt
  double middle_term = 0.0;  // eta int_eta^l |phi| / t^2 dt
  double identity_gap() const { return middle_term - (k1 - k2 + k3 + k4); }
};

/// Raised when the K split is requested outside eta < 1 < l.
class KPreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Slack for the three-term bound: max(1e-6, 10 / l).
inline double bound_slack(double l) { return std::max(1e-6, 10.0 / l); }

inline double phi_integral(const FunctionSpec& f, double x0, double h, const QuadratureConfig& cfg) {
  if (!(h >= 0.0)) throw std::invalid_argument("phi_integral: h must be >= 0");
  const SymmetricDifference phi_x(f, x0);
  return integrate_abs(phi_x, 0.0, h, phi_x.breakpoints(h), f.frequency_hint(), cfg).value;
}

/// Kinks of |phi_x| on [0, t_max]: breakpoints of phi_x and its sign changes.
inline std::vector<double> abs_phi_kinks(const SymmetricDifference& phi_x, double t_max) {
  std::vector<double> out = phi_x.breakpoints(t_max);
  for (double z : zero_crossings(phi_x, 0.0, t_max, phi_x.base().frequency_hint())) out.push_back(z);
  std::sort(out.begin(), out.end());
  return out;
}

/// Phi(t) for arbitrary t in [0, t_max], from a table of cumulative values at
/// knots plus one short integral from the nearest knot below.
class CumulativePhi {
public:
  CumulativePhi(const FunctionSpec& f, double x0, double t_max, std::vector<double> extra_knots,
                const QuadratureConfig& cfg)
      : phi_x_(f, x0), cfg_(cfg), freq_(f.frequency_hint()) {
    cfg_.abs_tol = std::max(cfg.abs_tol * 1e-3, 1e-15);
    cfg_.rel_tol = std::max(cfg.rel_tol * 1e-3, 1e-15);
    double step = 0.25;
    if (freq_ > 0.0) step = std::min(step, std::numbers::pi / (4.0 * freq_));
    knots_.push_back(0.0);
    for (double t = step; t < t_max; t += step) knots_.push_back(t);
    for (double k : abs_phi_kinks(phi_x_, t_max)) extra_knots.push_back(k);
    for (double k : extra_knots) {
      if (k > 0.0 && k < t_max) knots_.push_back(k);
    }
    knots_.push_back(t_max);
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
    values_.assign(knots_.size(), 0.0);
    for (std::size_t i = 1; i < knots_.size(); ++i) values_[i] = values_[i - 1] + piece(knots_[i - 1], knots_[i]);
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t i = static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
    if (knots_[i] == t) return values_[i];
    return values_[i] + piece(knots_[i], t);
  }

  const std::vector<double>& knots() const noexcept { return knots_; }

private:
  double piece(double a, double b) const {
    return integrate([&](double s) { return std::abs(phi_x_(s)); }, a, b, freq_, cfg_).value;
  }

  SymmetricDifference phi_x_;
  QuadratureConfig cfg_;
  double freq_;
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Phi sampled log-uniformly on [h_min, h_max], with per-decade max slopes and
/// the o(h) consistency labels at both ends.
inline PhiProfile phi_profile(const FunctionSpec& f, double x0, double h_min, double h_max, int points_per_decade,
                              const QuadratureConfig& cfg, const LimitTestConfig& limit = {}) {
  if (!(h_min > 0.0 && h_min < h_max)) throw std::invalid_argument("phi_profile: need 0 < h_min < h_max");
  if (points_per_decade < 1) throw std::invalid_argument("phi_profile: points_per_decade must be >= 1");
  PhiProfile out;
  out.f = f;
  out.x0 = x0;

  const double span = std::log10(h_max / h_min);
  const int decades = std::max(1, static_cast<int>(std::ceil(span - 1e-12)));
  const int count = static_cast<int>(std::ceil(span * points_per_decade - 1e-9));
  const SymmetricDifference phi_x(f, x0);
  auto abs_phi = [&](double t) { return std::abs(phi_x(t)); };
  const auto cuts = abs_phi_kinks(phi_x, h_max);

  double previous_h = 0.0;
  double running = 0.0;
  for (int i = 0; i <= count; ++i) {
    const double h = i == count ? h_max : h_min * std::pow(10.0, static_cast<double>(i) / points_per_decade);
    running += integrate_with_breakpoints(abs_phi, previous_h, h, cuts, f.frequency_hint(), cfg).value;
    out.samples.push_back({h, running});
    previous_h = h;
  }

  out.decade_slopes.assign(static_cast<std::size_t>(decades), 0.0);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const int d = std::min(decades - 1, static_cast<int>(i) / points_per_decade);
    auto& slot = out.decade_slopes[static_cast<std::size_t>(d)];
    slot = std::max(slot, out.samples[i].value / out.samples[i].h);
  }
  out.small_slope = out.decade_slopes.front();
  out.large_slope = out.decade_slopes.back();

  std::vector<double> toward_zero(out.decade_slopes.rbegin(), out.decade_slopes.rend());
  out.small_h_consistent = consistent_with_zero_limit(toward_zero, limit);
  out.large_h_consistent = consistent_with_zero_limit(out.decade_slopes, limit);
  return out;
}

/// int_eta^l |phi(t) - phi(t + eta)| / t dt with eta = l / n.
inline double translation_modulus(const FunctionSpec& f, double x0, const GridParams& g,
                                  const QuadratureConfig& cfg) {
  const double eta = g.eta();
  if (!(eta < g.l())) throw std::invalid_argument("translation_modulus: need eta < l (n >= 2)");
  const SymmetricDifference phi_x(f, x0);
  std::vector<double> cuts = phi_x.breakpoints(g.l() + eta);
  for (double c : phi_x.breakpoints(g.l() + eta)) cuts.push_back(c - eta);
  return integrate_abs([&](double t) { return (phi_x(t) - phi_x(t + eta)) / t; }, eta, g.l(), cuts,
                       f.frequency_hint(), cfg)
      .value;
}

/// eta int_eta^l |phi| / t^2 dt.
inline double tail_term(const FunctionSpec& f, double x0, const GridParams& g, const QuadratureConfig& cfg) {
  const SymmetricDifference phi_x(f, x0);
  const double eta = g.eta();
  return eta * integrate_abs([&](double t) { return phi_x(t) / (t * t); }, eta, g.l(), phi_x.breakpoints(g.l()),
                             f.frequency_hint(), cfg)
                   .value;
}

inline BoundBreakdown bound_check(const FunctionSpec& f, double x0, const GridParams& g,
                                  const QuadratureConfig& cfg) {
  const double eta = g.eta();
  if (!(2.0 * eta <= g.l())) throw std::invalid_argument("bound_check: need 2 eta <= l (n >= 2)");
  BoundBreakdown out;
  out.term_modulus = 0.5 * std::numbers::pi * translation_modulus(f, x0, g, cfg);
  out.term_tail = tail_term(f, x0, g, cfg);
  out.term_local = std::numbers::pi / eta * phi_integral(f, x0, 2.0 * eta, cfg);
  out.rhs_total = out.term_modulus + out.term_tail + out.term_local;
  out.lhs = std::abs(mn_split(f, x0, g, cfg).total);
  out.slack = bound_slack(g.l());
  out.holds = out.lhs <= out.rhs_total + out.slack;
  return out;
}

inline KBreakdown k_decomposition(const FunctionSpec& f, double x0, const GridParams& g,
                                  const QuadratureConfig& cfg) {
  const double l = g.l();
  const double eta = g.eta();
  if (!(eta < 1.0 && 1.0 < l)) {
    throw KPreconditionError("k_decomposition: need eta < 1 < l (got eta = " + std::to_string(eta) +
                             ", l = " + std::to_string(l) + ")");
  }
  const CumulativePhi big_phi(f, x0, l, {eta, 1.0}, cfg);
  KBreakdown out;
  out.middle_term = tail_term(f, x0, g, cfg);
  out.k1 = big_phi(l) / (static_cast<double>(g.n()) * l);
  out.k2 = big_phi(eta) / eta;
  auto weighted = [&](double t) { return big_phi(t) / (t * t * t); };
  const auto& cuts = big_phi.knots();
  out.k3 = 2.0 * eta * integrate_with_breakpoints(weighted, eta, 1.0, cuts, f.frequency_hint(), cfg).value;
  out.k4 = 2.0 * eta * integrate_with_breakpoints(weighted, 1.0, l, cuts, f.frequency_hint(), cfg).value;
  return out;
}

namespace detail {

inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Max of |(1/2) cot(pi t / 2l) sin(n pi t / l)| over log-uniform t in [l 1e-12, l].
inline double inequality_3_sampler(const GridParams& g, long samples, std::uint64_t seed = 1) {
  if (samples < 1) throw std::invalid_argument("inequality_3_sampler: samples must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double t = g.l() * std::pow(10.0, -12.0 * detail::unit_uniform(rng));
    worst = std::max(worst, std::abs(half_cot_sin(g, t)));
  }
  return worst;
}

/// Worst |chi_l(t) sin(n pi t / l)| / |phi_x(t)| over uniform t in [l - eta, l];
/// points with phi_x(t) = 0 count as ratio 0.
inline double inequality_4_sampler(const FunctionSpec& f, double x, const GridParams& g, long samples,
                                   std::uint64_t seed = 1) {
  if (samples < 1) throw std::invalid_argument("inequality_4_sampler: samples must be >= 1");
  const SymmetricDifference phi_x(f, x);
  std::mt19937_64 rng(seed);
  const double l = g.l();
  const double eta = g.eta();
  double worst = 0.0;
  for (long i = 0; i <= samples; ++i) {
    const double t = i == samples ? l : l - eta * detail::unit_uniform(rng);
    const double p = phi_x(t);
    if (p == 0.0) continue;
    const double half = std::numbers::pi * t / (2.0 * l);
    const double chi = 0.5 * p * std::cos(half) / std::sin(half);
    const double lhs = std::abs(chi * std::sin(std::numbers::pi * static_cast<double>(g.n()) * t / l));
    worst = std::max(worst, lhs / std::abs(p));
  }
  return worst;
}

}  // namespace dirichlet_lab
