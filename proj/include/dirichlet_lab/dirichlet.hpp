#pragma once

// Generalized Fourier coefficients over [-l, l], the partial sums S_n^l, the
// kernel D_n^l, the error representation through phi_x and its split into
// the cot-weighted sine part and the cosine part.

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirichlet_lab/function_spec.hpp"
#include "dirichlet_lab/quadrature.hpp"

namespace dirichlet_lab {

/// The pair (l, n) of one partial-sum evaluation; eta is always derived as l / n.
class GridParams {
public:
  GridParams(double l, long n) : l_(l), n_(n) {
    if (!(l > 0.0 && std::isfinite(l))) throw std::invalid_argument("GridParams: l must be positive and finite");
    if (n < 1) throw std::invalid_argument("GridParams: n must be >= 1");
  }

  double l() const noexcept { return l_; }
  long n() const noexcept { return n_; }
  double eta() const noexcept { return l_ / static_cast<double>(n_); }

  friend bool operator==(const GridParams&, const GridParams&) = default;

private:
  double l_;
  long n_;
};

struct CoefficientPair {
  long k = 0;
  double a = 0.0;
  double b = 0.0;
};

enum class SumRoute { coefficient_sum, kernel_convolution };

inline const char* to_string(SumRoute r) {
  return r == SumRoute::coefficient_sum ? "coefficient_sum" : "kernel_convolution";
}

struct PartialSumResult {
  double x = 0.0;
  GridParams grid{1.0, 1};
  double value = 0.0;
  SumRoute via = SumRoute::coefficient_sum;
};

struct ErrorRepresentation {
  double lhs = 0.0;            // S_n^l(x) - f(x)
  double integral_term = 0.0;  // (1/l) int_0^l phi_x(t) D_n^l(t) dt
  double residual = 0.0;       // lhs - integral_term
};

struct DecompositionResult {
  double M = 0.0;
  double N = 0.0;
  double total = 0.0;
};

namespace detail {

// (1/2) cot(pi t / 2l) sin(n pi t / l) as the finite cosine sum
// 1/2 + sum_{k<n} cos(k pi t / l) + (1/2) cos(n pi t / l).
inline double half_cot_sin_series(const GridParams& g, double t) {
  const double w = std::numbers::pi * t / g.l();
  double acc = 0.5;
  for (long k = 1; k < g.n(); ++k) acc += std::cos(static_cast<double>(k) * w);
  return acc + 0.5 * std::cos(static_cast<double>(g.n()) * w);
}

}  // namespace detail

/// D_n^l(t) = sin((2n+1) pi t / 2l) / (2 sin(pi t / 2l)). Within radius l * switch of a
/// multiple of 2l the equivalent sum 1/2 + sum_k cos(k pi t / l) is used; it is exact at 0.
inline double kernel(const GridParams& g, double t, double switch_radius = 1e-6) {
  const double l = g.l();
  const double u = std::remainder(t, 2.0 * l);
  if (std::abs(u) < l * switch_radius) {
    const double w = std::numbers::pi * u / l;
    double acc = 0.5;
    for (long k = 1; k <= g.n(); ++k) acc += std::cos(static_cast<double>(k) * w);
    return acc;
  }
  const double half = std::numbers::pi * u / (2.0 * l);
  return std::sin(static_cast<double>(2 * g.n() + 1) * half) / (2.0 * std::sin(half));
}

/// (1/2) cot(pi t / 2l) sin(n pi t / l) for t in (0, 2l); continuous extension 1/2 + ... at 0.
inline double half_cot_sin(const GridParams& g, double t, double switch_radius = 1e-6) {
  if (std::abs(t) < g.l() * switch_radius) return detail::half_cot_sin_series(g, t);
  const double half = std::numbers::pi * t / (2.0 * g.l());
  return 0.5 * std::cos(half) / std::sin(half) * std::sin(static_cast<double>(g.n()) * 2.0 * half);
}

/// Largest angular frequency of kernel-bearing integrands.
inline double kernel_frequency(const GridParams& g) {
  return static_cast<double>(2 * g.n() + 1) * std::numbers::pi / (2.0 * g.l());
}

inline CoefficientPair coeff(const FunctionSpec& f, double l, long k, const QuadratureConfig& cfg) {
  if (!(l > 0.0)) throw std::invalid_argument("coeff: l must be positive");
  if (k < 0) throw std::invalid_argument("coeff: k must be >= 0");
  CoefficientPair out{k, 0.0, 0.0};
  const auto domain = f.clip(-l, l);
  if (!domain) return out;
  const double w = std::numbers::pi * static_cast<double>(k) / l;
  const double freq = w + f.frequency_hint();
  const auto cuts = f.breakpoints_in(domain->lo, domain->hi);
  out.a = integrate_with_breakpoints([&](double t) { return f(t) * std::cos(w * t); }, domain->lo, domain->hi,
                                     cuts, freq, cfg)
              .value /
          l;
  if (k > 0) {
    out.b = integrate_with_breakpoints([&](double t) { return f(t) * std::sin(w * t); }, domain->lo, domain->hi,
                                       cuts, freq, cfg)
                .value /
            l;
  }
  return out;
}

/// Coefficients of one function, cached per l up to the largest order requested.
/// Concurrent readers share; a miss computes outside the lock and the longer
/// table wins on insert.
class CoefficientCache {
public:
  CoefficientCache(FunctionSpec f, QuadratureConfig cfg) : f_(std::move(f)), cfg_(cfg) {}

  std::vector<CoefficientPair> get(double l, long n) const {
    {
      std::shared_lock lock(mutex_);
      auto it = table_.find(l);
      if (it != table_.end() && static_cast<long>(it->second.size()) > n) {
        return {it->second.begin(), it->second.begin() + n + 1};
      }
    }
    std::vector<CoefficientPair> fresh;
    {
      std::shared_lock lock(mutex_);
      auto it = table_.find(l);
      if (it != table_.end()) fresh = it->second;
    }
    for (long k = static_cast<long>(fresh.size()); k <= n; ++k) fresh.push_back(coeff(f_, l, k, cfg_));
    std::unique_lock lock(mutex_);
    auto& slot = table_[l];
    if (slot.size() < fresh.size()) slot = fresh;
    return {slot.begin(), slot.begin() + n + 1};
  }

  const FunctionSpec& function() const noexcept { return f_; }
  const QuadratureConfig& config() const noexcept { return cfg_; }

private:
  FunctionSpec f_;
  QuadratureConfig cfg_;
  mutable std::shared_mutex mutex_;
  mutable std::map<double, std::vector<CoefficientPair>> table_;
};

inline double sum_coefficients(const std::vector<CoefficientPair>& c, double x, double l) {
  double value = 0.5 * c.front().a;
  for (std::size_t k = 1; k < c.size(); ++k) {
    const double w = std::numbers::pi * static_cast<double>(k) * x / l;
    value += c[k].a * std::cos(w) + c[k].b * std::sin(w);
  }
  return value;
}

inline PartialSumResult partial_sum(const CoefficientCache& cache, double x, const GridParams& g) {
  const auto c = cache.get(g.l(), g.n());
  return {x, g, sum_coefficients(c, x, g.l()), SumRoute::coefficient_sum};
}

inline PartialSumResult partial_sum(const FunctionSpec& f, double x, const GridParams& g,
                                    const QuadratureConfig& cfg) {
  std::vector<CoefficientPair> c;
  c.reserve(static_cast<std::size_t>(g.n()) + 1);
  for (long k = 0; k <= g.n(); ++k) c.push_back(coeff(f, g.l(), k, cfg));
  return {x, g, sum_coefficients(c, x, g.l()), SumRoute::coefficient_sum};
}

/// S_n^l(x; f) = (1/l) int_{-l}^{l} f(t) D_n^l(t - x) dt as a single integral.
inline PartialSumResult partial_sum_via_kernel(const FunctionSpec& f, double x, const GridParams& g,
                                               const QuadratureConfig& cfg) {
  PartialSumResult out{x, g, 0.0, SumRoute::kernel_convolution};
  const auto domain = f.clip(-g.l(), g.l());
  if (!domain) return out;
  std::vector<double> cuts = f.breakpoints_in(domain->lo, domain->hi);
  cuts.push_back(x);
  const double radius = cfg.singularity_switch_radius;
  const IntegralResult r = integrate_with_breakpoints(
      [&](double t) { return f(t) * kernel(g, t - x, radius); }, domain->lo, domain->hi, cuts,
      kernel_frequency(g) + f.frequency_hint(), cfg);
  out.value = r.value / g.l();
  return out;
}

inline PartialSumResult partial_sum(const FunctionSpec& f, double x, const GridParams& g,
                                    const QuadratureConfig& cfg, SumRoute route) {
  return route == SumRoute::coefficient_sum ? partial_sum(f, x, g, cfg) : partial_sum_via_kernel(f, x, g, cfg);
}

/// (1/l) int_0^l phi_x(t) D_n^l(t) dt.
inline double kernel_integral_term(const FunctionSpec& f, double x, const GridParams& g,
                                   const QuadratureConfig& cfg) {
  const SymmetricDifference phi_x(f, x);
  const double radius = cfg.singularity_switch_radius;
  return integrate_with_breakpoints([&](double t) { return phi_x(t) * kernel(g, t, radius); }, 0.0, g.l(),
                                    phi_x.breakpoints(g.l()), kernel_frequency(g) + f.frequency_hint(), cfg)
             .value /
         g.l();
}

inline ErrorRepresentation error_representation(const FunctionSpec& f, double x, const GridParams& g,
                                                const QuadratureConfig& cfg,
                                                SumRoute route = SumRoute::coefficient_sum) {
  ErrorRepresentation out;
  out.lhs = partial_sum(f, x, g, cfg, route).value - f(x);
  out.integral_term = kernel_integral_term(f, x, g, cfg);
  out.residual = out.lhs - out.integral_term;
  return out;
}

/// M = (1/l) int_0^l chi_l(t) sin(n pi t / l) dt with chi_l = (1/2) phi_x cot(pi t / 2l),
/// N = (1/2l) int_0^l phi_x(t) cos(n pi t / l) dt.
inline DecompositionResult mn_split(const FunctionSpec& f, double x, const GridParams& g,
                                    const QuadratureConfig& cfg) {
  const SymmetricDifference phi_x(f, x);
  const double l = g.l();
  const double radius = cfg.singularity_switch_radius;
  const double w = std::numbers::pi * static_cast<double>(g.n()) / l;
  const double freq = kernel_frequency(g) + f.frequency_hint();
  const auto cuts = phi_x.breakpoints(l);
  DecompositionResult out;
  out.M = integrate_with_breakpoints([&](double t) { return phi_x(t) * half_cot_sin(g, t, radius); }, 0.0, l,
                                     cuts, freq, cfg)
              .value /
          l;
  out.N = integrate_with_breakpoints([&](double t) { return phi_x(t) * std::cos(w * t); }, 0.0, l, cuts, freq,
                                     cfg)
              .value /
          (2.0 * l);
  out.total = out.M + out.N;
  return out;
}

}  // namespace dirichlet_lab
