#pragma once

// Fixed eight-function test corpus (all members of the tail-average class)
// and seeded random draws of (f, x, l, n) over it.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "dirichlet_lab/function_spec.hpp"

namespace dirichlet_lab {

inline std::vector<FunctionSpec> standard_corpus() {
  return {
      FunctionSpec("cos(pi*t/5)", 10.0),
      FunctionSpec("sin(t)", 2.0 * std::numbers::pi),
      FunctionSpec("piecewise([-1,1]: 1 - t^2; else: 0)", std::nullopt, Interval{-1.0, 1.0}),
      FunctionSpec("piecewise([-1,1]: 1; else: 0)", std::nullopt, Interval{-1.0, 1.0}),
      FunctionSpec("exp(-t^2/2)"),
      FunctionSpec("sin(3*t)*exp(-t^2/50)"),
      FunctionSpec("abs(sin(t))", std::numbers::pi),
      FunctionSpec("bump([2,5]) + bump([-5,-2])", std::nullopt, Interval{-5.0, 5.0}),
  };
}

struct DrawRanges {
  double x_min = -2.0;
  double x_max = 2.0;
  double l_min = 2.0;
  double l_max = 40.0;
  long n_min = 1;
  long n_max = 100;
};

struct CorpusDraw {
  std::size_t index = 0;
  FunctionSpec f;
  double x = 0.0;
  double l = 1.0;
  long n = 1;
};

/// Deterministic for a given seed on every platform (no std distributions).
class SeededDraws {
public:
  explicit SeededDraws(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53); }
  long integer(long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(rng_() % span);
  }

private:
  std::mt19937_64 rng_;
};

inline std::vector<CorpusDraw> draw_corpus(std::uint64_t seed, std::size_t count, const DrawRanges& r = {}) {
  const auto corpus = standard_corpus();
  SeededDraws rng(seed);
  std::vector<CorpusDraw> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CorpusDraw d;
    d.index = static_cast<std::size_t>(rng.integer(0, static_cast<long>(corpus.size()) - 1));
    d.f = corpus[d.index];
    d.x = rng.uniform(r.x_min, r.x_max);
    d.l = rng.uniform(r.l_min, r.l_max);
    d.n = rng.integer(r.n_min, r.n_max);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace dirichlet_lab
