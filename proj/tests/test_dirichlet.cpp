#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "dirichlet_lab/corpus.hpp"
#include "dirichlet_lab/dirichlet.hpp"

using namespace dirichlet_lab;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double pi = std::numbers::pi;

// Composite midpoint rule with `points` evaluations: an oracle that shares no code with the library.
template <class F>
double riemann(const F& f, double a, double b, long points) {
  const double h = (b - a) / static_cast<double>(points);
  double acc = 0.0;
  for (long i = 0; i < points; ++i) acc += f(a + (static_cast<double>(i) + 0.5) * h);
  return acc * h;
}

}  // namespace

TEST_CASE("grid parameters", "[dirichlet][grid]") {
  const GridParams g(10.0, 4);
  REQUIRE(g.eta() == 2.5);
  REQUIRE(g.eta() * static_cast<double>(g.n()) == g.l());
  REQUIRE_THROWS_AS(GridParams(0.0, 3), std::invalid_argument);
  REQUIRE_THROWS_AS(GridParams(1.0, 0), std::invalid_argument);
}

TEST_CASE("coefficient examples", "[dirichlet][coeff]") {
  const QuadratureConfig cfg;
  SECTION("constant") {
    for (double l : {0.5, 3.0, 40.0}) {
      const auto c = coeff(FunctionSpec("1"), l, 0, cfg);
      REQUIRE_THAT(c.a, WithinAbs(2.0, 1e-12));
      REQUIRE(c.b == 0.0);
    }
  }
  SECTION("single harmonic") {
    const auto c = coeff(FunctionSpec("cos(pi*t/5)"), 5.0, 1, cfg);
    REQUIRE_THAT(c.a, WithinAbs(1.0, 1e-8));
    REQUIRE_THAT(c.b, WithinAbs(0.0, 1e-8));
  }
  SECTION("identity on [-2, 2]") {
    const auto c = coeff(FunctionSpec("t"), 2.0, 1, cfg);
    REQUIRE_THAT(c.a, WithinAbs(0.0, 1e-8));
    REQUIRE_THAT(c.b, WithinAbs(4.0 / pi, 1e-8));
    const double oracle = riemann([](double t) { return t * std::sin(pi * t / 2); }, -2.0, 2.0, 1'000'000) / 2.0;
    REQUIRE_THAT(oracle, WithinAbs(4.0 / pi, 1e-8));
  }
  SECTION("support outside the window") {
    const auto c = coeff(FunctionSpec("1", std::nullopt, Interval{10.0, 11.0}), 5.0, 3, cfg);
    REQUIRE(c.a == 0.0);
    REQUIRE(c.b == 0.0);
  }
}

TEST_CASE("partial sum examples", "[dirichlet][partial_sum]") {
  const QuadratureConfig cfg;
  for (double x : {-3.0, 0.0, 1.7}) {
    REQUIRE_THAT(partial_sum(FunctionSpec("3"), x, GridParams(4.0, 6), cfg).value, WithinAbs(3.0, 1e-9));
  }
  for (long n : {1L, 2L, 7L}) {
    REQUIRE_THAT(partial_sum(FunctionSpec("cos(pi*t/5)"), 2.5, GridParams(5.0, n), cfg).value, WithinAbs(0.0, 1e-8));
  }
  const FunctionSpec box("piecewise([-1,1]: 1; else: 0)");
  const GridParams g(10.0, 40);
  const double coeff_route = partial_sum(box, 0.0, g, cfg).value;
  const double kernel_route = partial_sum_via_kernel(box, 0.0, g, cfg).value;
  REQUIRE_THAT(coeff_route, WithinAbs(1.0, 0.1));
  REQUIRE_THAT(coeff_route, WithinAbs(kernel_route, 1e-8));
}

TEST_CASE("kernel examples", "[dirichlet][kernel]") {
  REQUIRE(kernel(GridParams(3.0, 2), 0.0) == 2.5);
  REQUIRE_THAT(kernel(GridParams(3.0, 3), 3.0), WithinAbs(-0.5, 1e-15));
  for (long n : {1L, 4L, 25L}) {
    const GridParams g(7.0, n);
    REQUIRE_THAT(kernel(g, 2.0 * g.l() / static_cast<double>(2 * n + 1)), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("kernel properties", "[dirichlet][kernel][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (long n = 1; n <= 10; ++n) {
    for (double l : {1.0, 5.0, 20.0}) {
      const GridParams g(l, n);
      const double peak = static_cast<double>(2 * n + 1) / 2.0;
      REQUIRE(kernel(g, 0.0) == peak);
      for (int i = 0; i < 200; ++i) {
        const double t = l * unit(rng);
        REQUIRE(kernel(g, -t) == kernel(g, t));
        REQUIRE(std::abs(kernel(g, t)) <= peak * (1.0 + 1e-12));
        // ratio form against the cosine sum
        double sum = 0.5;
        for (long k = 1; k <= n; ++k) sum += std::cos(static_cast<double>(k) * pi * t / l);
        REQUIRE_THAT(kernel(g, t), WithinAbs(sum, 1e-9));
      }
      const double norm = integrate([&](double t) { return kernel(g, t); }, -l, l, kernel_frequency(g), {}).value / l;
      REQUIRE_THAT(norm, WithinAbs(1.0, 1e-9));
    }
  }
  // 2l-periodicity
  const GridParams g(2.0, 5);
  for (double t : {0.3, 1.1, 3.9}) REQUIRE_THAT(kernel(g, t + 4.0), WithinAbs(kernel(g, t), 1e-12));
  // continuity across the series switch radius
  const double r = g.l() * 1e-6;
  REQUIRE_THAT(kernel(g, r * 0.999), WithinAbs(kernel(g, r * 1.001), 1e-9));
}

TEST_CASE("half cot sin matches the closed form", "[dirichlet][kernel]") {
  const GridParams g(3.0, 7);
  REQUIRE(half_cot_sin(g, 0.0) == static_cast<double>(g.n()));
  for (double t : {1e-3, 0.4, 1.5, 2.9}) {
    const double closed = 0.5 / std::tan(pi * t / 6.0) * std::sin(7.0 * pi * t / 3.0);
    REQUIRE_THAT(half_cot_sin(g, t), WithinAbs(closed, 1e-12));
    // D = (1/2) cot sin + (1/2) cos
    REQUIRE_THAT(kernel(g, t), WithinAbs(half_cot_sin(g, t) + 0.5 * std::cos(7.0 * pi * t / 3.0), 1e-12));
  }
}

TEST_CASE("single harmonic reproduction", "[dirichlet][property]") {
  const QuadratureConfig cfg;
  for (double l : {1.0, 4.0}) {
    for (long n = 1; n <= 8; ++n) {
      for (long j = 1; j <= n; ++j) {
        const std::string w = "(" + std::to_string(j) + "*pi*t/" + std::to_string(l) + ")";
        for (const std::string fn : {"cos", "sin"}) {
          const FunctionSpec f(fn + w);
          for (double x : {-0.9 * l, -0.3, 0.0, 0.5 * l, 0.77 * l}) {
            REQUIRE_THAT(partial_sum(f, x, GridParams(l, n), cfg).value, WithinAbs(f(x), 1e-8));
          }
        }
      }
    }
  }
}

TEST_CASE("route equivalence and linearity on corpus draws", "[dirichlet][property]") {
  const QuadratureConfig cfg;
  for (const auto& d : draw_corpus(11, 10)) {
    INFO(d.f.source() << " x=" << d.x << " l=" << d.l << " n=" << d.n);
    const GridParams g(d.l, d.n);
    const double a = partial_sum(d.f, d.x, g, cfg).value;
    const double b = partial_sum_via_kernel(d.f, d.x, g, cfg).value;
    REQUIRE_THAT(a, WithinAbs(b, 1e-7));
  }
  const FunctionSpec u("exp(-t^2/2)");
  const FunctionSpec v("sin(t)");
  const FunctionSpec combo("2*exp(-t^2/2) - 3*sin(t)");
  const GridParams g(6.0, 12);
  for (double x : {-1.0, 0.3, 2.0}) {
    const double expected = 2 * partial_sum(u, x, g, cfg).value - 3 * partial_sum(v, x, g, cfg).value;
    REQUIRE_THAT(partial_sum(combo, x, g, cfg).value, WithinAbs(expected, 1e-8));
  }
}

TEST_CASE("coefficient cache", "[dirichlet][cache]") {
  const QuadratureConfig cfg;
  const FunctionSpec f("exp(-t^2/2)");
  const CoefficientCache cache(f, cfg);
  const GridParams g(5.0, 12);
  const double direct = partial_sum(f, 0.4, g, cfg).value;
  REQUIRE(partial_sum(cache, 0.4, g).value == direct);
  REQUIRE(cache.get(5.0, 3).size() == 4);
  std::vector<std::jthread> pool;
  std::vector<double> seen(8);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    pool.emplace_back([&, i] { seen[i] = partial_sum(cache, 0.4, GridParams(5.0, 4 + static_cast<long>(i))).value; });
  }
  pool.clear();
  for (std::size_t i = 0; i < seen.size(); ++i) {
    REQUIRE(seen[i] == partial_sum(f, 0.4, GridParams(5.0, 4 + static_cast<long>(i)), cfg).value);
  }
}

TEST_CASE("error representation examples", "[dirichlet][error_repr]") {
  const QuadratureConfig cfg;
  SECTION("constant") {
    const auto er = error_representation(FunctionSpec("1"), 0.7, GridParams(5.0, 10), cfg);
    REQUIRE_THAT(er.lhs, WithinAbs(0.0, 1e-9));
    REQUIRE(er.integral_term == 0.0);
    REQUIRE_THAT(er.residual, WithinAbs(0.0, 1e-9));
  }
  SECTION("support inside the window makes the identity exact") {
    const FunctionSpec f("piecewise([-1,1]: 1 - t^2; else: 0)", std::nullopt, Interval{-1.0, 1.0});
    const double x = 0.25;
    const GridParams g(8.0, 20);
    const auto er = error_representation(f, x, g, cfg);
    REQUIRE_THAT(er.residual, WithinAbs(0.0, 2 * cfg.abs_tol));
    const SymmetricDifference phi_x(f, x);
    const double oracle =
        riemann([&](double t) { return phi_x(t) * kernel(g, t); }, 0.0, 2.0, 1'000'000) / g.l() +
        riemann([&](double t) { return phi_x(t) * kernel(g, t); }, 2.0, g.l(), 1'000'000) / g.l();
    REQUIRE_THAT(er.integral_term, WithinAbs(oracle, 1e-6));
  }
  SECTION("residual of sin shrinks as l doubles") {
    // at x = 0 both sides vanish by symmetry, so probe just off the origin
    const FunctionSpec f("sin(t)");
    double previous = std::numeric_limits<double>::infinity();
    for (double l : {20.0, 40.0, 80.0, 160.0}) {
      const auto er = error_representation(f, 0.5, GridParams(l, static_cast<long>(l / 2)), cfg);
      INFO("l = " << l << " residual = " << er.residual);
      REQUIRE(std::abs(er.residual) < previous);
      previous = std::abs(er.residual);
    }
  }
}

TEST_CASE("M/N split", "[dirichlet][mn_split]") {
  const QuadratureConfig cfg;
  const auto zero = mn_split(FunctionSpec("1"), 0.3, GridParams(4.0, 6), cfg);
  REQUIRE(zero.M == 0.0);
  REQUIRE(zero.N == 0.0);
  REQUIRE(zero.total == 0.0);

  for (const auto& d : draw_corpus(3, 8)) {
    const GridParams g(d.l, d.n);
    const auto mn = mn_split(d.f, d.x, g, cfg);
    REQUIRE(mn.total == mn.M + mn.N);
    REQUIRE_THAT(mn.total, WithinAbs(kernel_integral_term(d.f, d.x, g, cfg), 1e-8));
  }

  const FunctionSpec f("abs(t)", std::nullopt, Interval{-10.0, 10.0});
  const GridParams g(10.0, 5);
  const SymmetricDifference phi0(f, 0.0);
  const double oracle = riemann([&](double t) { return phi0(t) * kernel(g, t); }, 0.0, 10.0, 1'000'000) / 10.0;
  REQUIRE_THAT(mn_split(f, 0.0, g, cfg).total, WithinAbs(oracle, 1e-6));
}
