#pragma once

// Composite Gauss-Legendre quadrature with a frequency-aware initial partition
// and globally adaptive bisection. Each panel carries the sum of K-point values
// over its two halves. Its error estimate is the larger distance from that sum
// to the K-point and to the (K-1)-point value on the whole panel; with a
// single comparison, kinks inside a panel occasionally make the two levels
// agree by accident. The panel with the largest estimate is bisected next.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirichlet_lab {

struct QuadratureConfig {
  int nodes_per_panel = 8;
  int min_panels_per_oscillation = 4;  // panels per half-period of freq_hint
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double singularity_switch_radius = 1e-6;  // relative to l for kernel-type factors
  long max_panels = 1L << 21;

  void validate() const {
    if (nodes_per_panel < 2 || nodes_per_panel > 64) {
      throw std::invalid_argument("nodes_per_panel must be in [2, 64]");
    }
    if (min_panels_per_oscillation < 1) throw std::invalid_argument("min_panels_per_oscillation must be >= 1");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
    if (!(singularity_switch_radius > 0.0)) throw std::invalid_argument("singularity_switch_radius must be > 0");
    if (max_panels < 1) throw std::invalid_argument("max_panels must be >= 1");
  }

  friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long panels_used = 0;
};

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, IntegralResult last)
      : std::runtime_error(what), last_(last) {}
  const IntegralResult& last() const noexcept { return last_; }

private:
  IntegralResult last_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussRule(int order) : nodes(static_cast<std::size_t>(order)), weights(static_cast<std::size_t>(order)) {
    const int n = order;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      // Recompute the derivative at the converged root for the weight.
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[static_cast<std::size_t>(i)] = -x;
      nodes[static_cast<std::size_t>(n - 1 - i)] = x;
      weights[static_cast<std::size_t>(i)] = w;
      weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  }

  template <class F>
  double apply(const F& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(mid + half * nodes[i]);
    return half * acc;
  }
};

inline const GaussRule& gauss_rule(int order) {
  // Built once per order; function-local statics are initialized thread-safely.
  static const std::vector<GaussRule> rules = [] {
    std::vector<GaussRule> out;
    for (int k = 1; k <= 64; ++k) out.emplace_back(k);
    return out;
  }();
  return rules.at(static_cast<std::size_t>(order - 1));
}

/// Number of initial panels for [a, b] given the fastest angular frequency.
inline long initial_panels(double a, double b, double freq_hint, const QuadratureConfig& cfg) {
  const double half_periods = freq_hint * (b - a) / std::numbers::pi;
  const double wanted = std::ceil(cfg.min_panels_per_oscillation * half_periods);
  return std::max(1L, static_cast<long>(std::min(wanted, 1e15)));
}

/// Integrate over [a, b]. freq_hint is the largest angular frequency present
/// (0 for non-oscillatory integrands). Throws QuadratureError when the panel
/// budget is exhausted before the error estimate meets max(abs_tol, rel_tol*|I|).
template <class F>
IntegralResult integrate(const F& f, double a, double b, double freq_hint, const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(std::isfinite(a) && std::isfinite(b)) || a > b) {
    throw std::invalid_argument("integrate: need finite a <= b");
  }
  if (!(freq_hint >= 0.0)) throw std::invalid_argument("integrate: freq_hint must be >= 0");
  if (a == b) return {0.0, 0.0, 1};

  const GaussRule& rule = gauss_rule(cfg.nodes_per_panel);
  const GaussRule& check = gauss_rule(cfg.nodes_per_panel - 1);
  struct Panel {
    double a, b;
    double left, right;  // K-point values on the two halves
    double err;
  };
  std::vector<Panel> panels;
  auto make_panel = [&](double lo, double hi, double whole) {
    const double mid = 0.5 * (lo + hi);
    const double left = rule.apply(f, lo, mid);
    const double right = rule.apply(f, mid, hi);
    const double fine = left + right;
    const double err = std::max(std::abs(fine - whole), std::abs(fine - check.apply(f, lo, hi)));
    return Panel{lo, hi, left, right, err};
  };

  const long n0 = initial_panels(a, b, freq_hint, cfg);
  if (n0 > cfg.max_panels) {
    throw QuadratureError("integrate: frequency requires " + std::to_string(n0) +
                              " panels, above the budget of " + std::to_string(cfg.max_panels),
                          {0.0, 0.0, 0});
  }
  panels.reserve(static_cast<std::size_t>(n0) * 2);
  const double width = (b - a) / static_cast<double>(n0);
  for (long i = 0; i < n0; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = i + 1 == n0 ? b : a + width * static_cast<double>(i + 1);
    panels.push_back(make_panel(lo, hi, rule.apply(f, lo, hi)));
  }

  auto by_error = [&](std::size_t x, std::size_t y) {
    if (panels[x].err != panels[y].err) return panels[x].err < panels[y].err;
    return x > y;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_error)> queue(by_error);
  for (std::size_t i = 0; i < panels.size(); ++i) queue.push(i);

  auto totals = [&] {
    double value = 0.0;
    double err = 0.0;
    for (const Panel& p : panels) {
      value += p.left + p.right;
      err += p.err;
    }
    return std::pair{value, err};
  };

  auto [value, err] = totals();
  for (;;) {
    if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) {
      // Incremental sums drift; confirm on exact totals.
      std::tie(value, err) = totals();
      if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) break;
    }
    const std::size_t worst = queue.top();
    const Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (static_cast<long>(panels.size()) >= cfg.max_panels || !(p.a < mid && mid < p.b)) {
      std::tie(value, err) = totals();
      throw QuadratureError("integrate: no convergence on [" + std::to_string(a) + ", " + std::to_string(b) +
                                "] (estimate " + std::to_string(err) + ")",
                            {value, err, static_cast<long>(panels.size())});
    }
    queue.pop();
    const Panel lhs = make_panel(p.a, mid, p.left);
    const Panel rhs = make_panel(mid, p.b, p.right);
    value += (lhs.left + lhs.right + rhs.left + rhs.right) - (p.left + p.right);
    err += lhs.err + rhs.err - p.err;
    panels[worst] = lhs;
    panels.push_back(rhs);
    queue.push(worst);
    queue.push(panels.size() - 1);
  }
  return {value, err, static_cast<long>(panels.size())};
}

/// Integrate over [a, b] split at the given breakpoints so that no panel
/// straddles one. Breakpoints outside (a, b) are ignored. The absolute
/// tolerance is shared evenly between the pieces.
template <class F>
IntegralResult integrate_with_breakpoints(const F& f, double a, double b, std::vector<double> breakpoints,
                                          double freq_hint, const QuadratureConfig& cfg) {
  if (!(std::isfinite(a) && std::isfinite(b)) || a > b) {
    throw std::invalid_argument("integrate_with_breakpoints: need finite a <= b");
  }
  std::vector<double> cuts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double c : breakpoints) {
    if (c > a && c < b && c > cuts.back()) cuts.push_back(c);
  }
  cuts.push_back(b);
  if (cuts.size() == 2) return integrate(f, a, b, freq_hint, cfg);

  QuadratureConfig piece_cfg = cfg;
  piece_cfg.abs_tol = cfg.abs_tol / static_cast<double>(cuts.size() - 1);
  IntegralResult total{0.0, 0.0, 0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const IntegralResult r = integrate(f, cuts[i], cuts[i + 1], freq_hint, piece_cfg);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.panels_used += r.panels_used;
  }
  return total;
}

/// Sign changes of g on [a, b], located by sampling at spacing
/// min((b - a) / 64, pi / (8 freq_hint)) and bisecting to round-off. Exact
/// zeros at sample points are reported as well. Pairs of roots closer than the
/// sampling spacing can be missed.
template <class G>
std::vector<double> zero_crossings(const G& g, double a, double b, double freq_hint) {
  std::vector<double> out;
  if (!(a < b)) return out;
  double step = (b - a) / 64.0;
  if (freq_hint > 0.0) step = std::min(step, std::numbers::pi / (8.0 * freq_hint));
  const long count = static_cast<long>(std::ceil((b - a) / step));
  double t_prev = a;
  double g_prev = g(a);
  for (long i = 1; i <= count; ++i) {
    const double t = i == count ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(count);
    const double v = g(t);
    if (v == 0.0) {
      if (g_prev != 0.0) out.push_back(t);
    } else if (g_prev != 0.0 && (v < 0.0) != (g_prev < 0.0)) {
      double lo = t_prev;
      double hi = t;
      const bool lo_negative = g_prev < 0.0;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (!(lo < mid && mid < hi)) break;
        const double gm = g(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == lo_negative) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      out.push_back(0.5 * (lo + hi));
    }
    t_prev = t;
    g_prev = v;
  }
  return out;
}

/// int_a^b |g| with the sign changes of g added to the breakpoints.
template <class G>
IntegralResult integrate_abs(const G& g, double a, double b, std::vector<double> breakpoints, double freq_hint,
                             const QuadratureConfig& cfg) {
  for (double z : zero_crossings(g, a, b, freq_hint)) breakpoints.push_back(z);
  return integrate_with_breakpoints([&](double t) { return std::abs(g(t)); }, a, b, std::move(breakpoints),
                                    freq_hint, cfg);
}

}  // namespace dirichlet_lab
