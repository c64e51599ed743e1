#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dirichlet_lab/expr.hpp"
#include "dirichlet_lab/quadrature.hpp"

namespace dirichlet_lab {

/// A parsed, evaluable real function on the line, with optional period and
/// support declarations. Immutable and cheap to copy; safe to share across threads.
class FunctionSpec {
public:
  FunctionSpec() = default;

  explicit FunctionSpec(std::string source, std::optional<double> period_hint = std::nullopt,
                        std::optional<Interval> support_hint = std::nullopt)
      : source_(std::move(source)),
        ast_(std::make_shared<const ExprAst>(parse_function(source_))),
        period_(period_hint),
        support_(support_hint) {
    if (period_ && !(*period_ > 0.0 && std::isfinite(*period_))) {
      throw std::invalid_argument("period_hint must be a positive finite number");
    }
    if (support_ && !(support_->lo <= support_->hi)) {
      throw std::invalid_argument("support_hint must be a closed interval [lo, hi] with lo <= hi");
    }
    breakpoints_ = dirichlet_lab::breakpoints(*ast_);
    if (support_) {
      breakpoints_.push_back(support_->lo);
      breakpoints_.push_back(support_->hi);
      std::sort(breakpoints_.begin(), breakpoints_.end());
      breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
    }
    frequency_ = dirichlet_lab::frequency_hint(*ast_);
    abs_args_ = abs_arguments(*ast_);
    if (period_) verify_period();
  }

  const std::string& source() const noexcept { return source_; }
  const ExprAst& ast() const { return *ast_; }
  const std::optional<double>& period_hint() const noexcept { return period_; }
  const std::optional<Interval>& support_hint() const noexcept { return support_; }

  /// Locations where f may fail to be smooth (piecewise/bump edges, support edges).
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }

  /// Breakpoints inside [a, b] plus the sign changes there of every abs() argument.
  std::vector<double> breakpoints_in(double a, double b) const {
    std::vector<double> out;
    for (double p : breakpoints_) {
      if (p >= a && p <= b) out.push_back(p);
    }
    if (support_) {
      a = std::max(a, support_->lo);
      b = std::min(b, support_->hi);
    }
    for (int id : abs_args_) {
      const ExprAst& ast = *ast_;
      for (double z : zero_crossings([&](double t) { return ast.eval_node(id, t); }, a, b, frequency_)) {
        out.push_back(z);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Largest angular frequency visible in the expression (0 if none detected).
  double frequency_hint() const noexcept { return frequency_; }

  double operator()(double t) const {
    if (support_ && (t < support_->lo || t > support_->hi)) return 0.0;
    return ast_->eval(t);
  }

  /// [a, b] intersected with the declared support; empty when they do not meet.
  std::optional<Interval> clip(double a, double b) const {
    if (!support_) return Interval{a, b};
    const double lo = std::max(a, support_->lo);
    const double hi = std::min(b, support_->hi);
    if (lo >= hi) return std::nullopt;
    return Interval{lo, hi};
  }

private:
  void verify_period() const {
    const double m = *period_;
    for (int i = 0; i < 16; ++i) {
      const double t = -7.3 + 1.37 * i;
      const double a = (*this)(t);
      const double b = (*this)(t + m);
      const double scale = std::max({1.0, std::abs(a), std::abs(t) + m});
      if (std::abs(a - b) > 1e-9 * scale) {
        throw std::invalid_argument("period_hint " + std::to_string(m) + " is inconsistent with '" +
                                    source_ + "'");
      }
    }
  }

  std::string source_;
  std::shared_ptr<const ExprAst> ast_;
  std::optional<double> period_;
  std::optional<Interval> support_;
  std::vector<double> breakpoints_;
  double frequency_ = 0.0;
  std::vector<int> abs_args_;
};

/// Second symmetric difference f(x+t) + f(x-t) - 2 f(x).
inline double phi(const FunctionSpec& f, double x, double t) { return f(x + t) + f(x - t) - 2.0 * f(x); }

/// phi_x bound to a center; caches f(x).
class SymmetricDifference {
public:
  SymmetricDifference(FunctionSpec base, double center)
      : base_(std::move(base)), center_(center), f_center_(base_(center)) {}

  double operator()(double t) const { return base_(center_ + t) + base_(center_ - t) - 2.0 * f_center_; }

  const FunctionSpec& base() const noexcept { return base_; }
  double center() const noexcept { return center_; }

  /// Kink candidates of phi on [0, t_max]: |b - x| for each breakpoint b of f in [x - t_max, x + t_max].
  std::vector<double> breakpoints(double t_max) const {
    std::vector<double> out;
    for (double b : base_.breakpoints_in(center_ - t_max, center_ + t_max)) out.push_back(std::abs(b - center_));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

private:
  FunctionSpec base_;
  double center_;
  double f_center_;
};

}  // namespace dirichlet_lab
