#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace dirichlet_lab {

/// Finite-sample proxy for "tends to 0": the last three values, ordered
/// toward the limit, shrink by at least `decrease_factor` at each step, or are
/// all below `zero_floor`. This is a consistency label, never a proof.
struct LimitTestConfig {
  double decrease_factor = 1.05;
  double zero_floor = 1e-12;
  std::size_t window = 3;
};

inline bool consistent_with_zero_limit(std::span<const double> toward_limit, const LimitTestConfig& cfg = {}) {
  if (toward_limit.size() < cfg.window || cfg.window == 0) return false;
  const auto tail = toward_limit.subspan(toward_limit.size() - cfg.window);
  bool all_zero = true;
  for (double v : tail) all_zero = all_zero && std::abs(v) <= cfg.zero_floor;
  if (all_zero) return true;
  for (std::size_t i = 0; i + 1 < tail.size(); ++i) {
    if (!(tail[i + 1] * cfg.decrease_factor <= tail[i])) return false;
  }
  return true;
}

}  // namespace dirichlet_lab
