#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <span>
#include <vector>

#include "collchsh/chsh.hpp"
#include "collchsh/common.hpp"
#include "collchsh/optimize.hpp"
#include "collchsh/states.hpp"

using namespace collchsh;
using Catch::Approx;

namespace {

OptimizationConfig quick_config(int restarts, std::uint64_t seed) {
  OptimizationConfig c;
  c.restarts = restarts;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("orthonormalize turns raw vectors into row pairs") {
  SECTION("already orthonormal input is preserved") {
    const RowPair u = orthonormalize(std::vector<double>{1.0, 0.0, 0.0, 0.0},
                                     std::vector<double>{0.0, 1.0, 0.0, 0.0});
    REQUIRE(u.pair_count() == 2);
    REQUIRE(u.u0()[0] == Approx(1.0));
    REQUIRE(u.u1()[1] == Approx(1.0));
  }
  SECTION("generic input is normalized and projected") {
    const RowPair u = orthonormalize(std::vector<double>{2.0, 0.0}, std::vector<double>{3.0, 4.0});
    REQUIRE(u.u0()[0] == Approx(1.0));
    REQUIRE(u.u1()[0] == Approx(0.0).margin(1e-14));
    REQUIRE(u.u1()[1] == Approx(1.0));
  }
  SECTION("degenerate input raises row_degeneracy_error") {
    REQUIRE_THROWS_AS(orthonormalize(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 1.0}),
                      row_degeneracy_error);
    REQUIRE_THROWS_AS(orthonormalize(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}),
                      row_degeneracy_error);
  }
  SECTION("non power-of-two dimensions are rejected") {
    REQUIRE_THROWS_AS(orthonormalize(std::vector<double>{1.0, 0.0, 0.0},
                                     std::vector<double>{0.0, 1.0, 0.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(orthonormalize(std::vector<double>{1.0}, std::vector<double>{1.0}),
                      std::invalid_argument);
  }
}

TEST_CASE("powell_minimize on standard objectives") {
  SECTION("quadratic bowl") {
    const Objective bowl = [](std::span<const double> p) {
      double f = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - 0.5 * static_cast<double>(i + 1);
        f += d * d;
      }
      return f;
    };
    OptimizationConfig config;
    const PowellResult res = powell_minimize(bowl, {4.0, -3.0, 2.0, 7.0}, config);
    REQUIRE(res.converged);
    REQUIRE(res.value == Approx(0.0).margin(1e-12));
    for (std::size_t i = 0; i < res.point.size(); ++i)
      REQUIRE(res.point[i] == Approx(0.5 * static_cast<double>(i + 1)).margin(1e-6));
  }

  SECTION("Rosenbrock valley from the classic start") {
    const Objective rosen = [](std::span<const double> p) {
      const double a = 1.0 - p[0];
      const double b = p[1] - p[0] * p[0];
      return a * a + 100.0 * b * b;
    };
    OptimizationConfig config;
    const PowellResult res = powell_minimize(rosen, {-1.2, 1.0}, config);
    REQUIRE(res.converged);
    REQUIRE(res.point[0] == Approx(1.0).margin(1e-5));
    REQUIRE(res.point[1] == Approx(1.0).margin(1e-5));
    REQUIRE(res.value < 1e-10);
  }

  SECTION("iteration budget exhaustion is reported, not hidden") {
    const Objective rosen = [](std::span<const double> p) {
      const double a = 1.0 - p[0];
      const double b = p[1] - p[0] * p[0];
      return a * a + 100.0 * b * b;
    };
    OptimizationConfig config;
    config.max_iterations = 1;
    const PowellResult res = powell_minimize(rosen, {-1.2, 1.0}, config);
    REQUIRE_FALSE(res.converged);
    REQUIRE(res.iterations == 1);
  }

  SECTION("empty start point is rejected") {
    OptimizationConfig config;
    REQUIRE_THROWS_AS(powell_minimize([](std::span<const double>) { return 0.0; }, {}, config),
                      std::invalid_argument);
  }
}

TEST_CASE("maximize_bound recovers closed-form optima") {
  SECTION("n=1 is the single-pair line for any seed") {
    for (double x : {0.3, 0.7}) {
      const OptimizationResult res = maximize_bound(1, SingletFraction(x), quick_config(4, 11));
      REQUIRE(res.bell.bound == Approx(kTsirelson * x).margin(1e-9));
      REQUIRE(res.strategy_label == StrategyLabel::xor_equivalent);
    }
  }

  SECTION("n=2 matches 4x/sqrt(1+x^2) with the xor_equivalent label") {
    for (double x : {0.2, 0.5, 0.8}) {
      const OptimizationResult res = maximize_bound(2, SingletFraction(x), quick_config(8, 5));
      REQUIRE(res.bell.bound == Approx(4.0 * x / std::sqrt(1.0 + x * x)).margin(1e-6));
      REQUIRE(res.strategy_label == StrategyLabel::xor_equivalent);
    }
  }

  SECTION("n=3 stays XOR below the crossover and beats it above") {
    const OptimizationResult low = maximize_bound(3, SingletFraction(0.5), quick_config(8, 1));
    REQUIRE(low.strategy_label == StrategyLabel::xor_equivalent);
    REQUIRE(low.bell.bound ==
            Approx(xor_bound_closed_form(3, SingletFraction(0.5))).margin(1e-7));

    const OptimizationResult high = maximize_bound(3, SingletFraction(0.8), quick_config(12, 9));
    REQUIRE(high.strategy_label == StrategyLabel::general);
    REQUIRE(high.bell.bound > xor_bound_closed_form(3, SingletFraction(0.8)) + 0.1);
    REQUIRE(high.bell.bound == Approx(2.6035880).margin(1e-4));
  }

  SECTION("warm start makes the XOR value a floor") {
    for (int n : {1, 2, 3}) {
      for (double x : {0.25, 0.6, 0.95}) {
        const OptimizationResult res = maximize_bound(n, SingletFraction(x), quick_config(2, 3));
        REQUIRE(res.bell.bound >= xor_bound_closed_form(n, SingletFraction(x)) - 1e-12);
      }
    }
  }

  SECTION("the reported bound is the best restart value") {
    const OptimizationResult res = maximize_bound(3, SingletFraction(0.7), quick_config(6, 2));
    REQUIRE(res.restart_values.size() == 7);  // warm start + 6 restarts
    double best = 0.0;
    for (double v : res.restart_values) best = std::max(best, v);
    REQUIRE(res.bell.bound == best);
  }

  SECTION("restart doubling only improves, and prefixes are stable") {
    const OptimizationResult small = maximize_bound(3, SingletFraction(0.85), quick_config(4, 17));
    const OptimizationResult big = maximize_bound(3, SingletFraction(0.85), quick_config(8, 17));
    REQUIRE(big.bell.bound >= small.bell.bound);
    for (std::size_t i = 0; i < small.restart_values.size(); ++i)
      REQUIRE(big.restart_values[i] == small.restart_values[i]);
  }

  SECTION("bit-exact reproducibility") {
    const OptimizationResult a = maximize_bound(2, SingletFraction(0.62), quick_config(6, 21));
    const OptimizationResult b = maximize_bound(2, SingletFraction(0.62), quick_config(6, 21));
    REQUIRE(a.bell.bound == b.bell.bound);
    REQUIRE(a.evaluations == b.evaluations);
    REQUIRE(a.restart_values == b.restart_values);
  }

  SECTION("seed robustness at n=2: different streams, same optimum") {
    const OptimizationResult a = maximize_bound(2, SingletFraction(0.45), quick_config(6, 100));
    const OptimizationResult b = maximize_bound(2, SingletFraction(0.45), quick_config(6, 200));
    REQUIRE(a.bell.bound == Approx(b.bell.bound).margin(1e-8));
  }

  SECTION("untying Bob's rows finds the same optimum at n=2") {
    for (double x : {0.3, 0.5, 0.7, 0.9}) {
      OptimizationConfig tied = quick_config(4, 8);
      OptimizationConfig untied = quick_config(4, 8);
      untied.tie_bob = false;
      const OptimizationResult a = maximize_bound(2, SingletFraction(x), tied);
      const OptimizationResult b = maximize_bound(2, SingletFraction(x), untied);
      REQUIRE(b.bell.bound == Approx(a.bell.bound).margin(1e-6));
    }
  }

  SECTION("argument validation") {
    REQUIRE_THROWS_AS(maximize_bound(0, SingletFraction(0.5), quick_config(2, 0)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(maximize_bound(6, SingletFraction(0.5), quick_config(2, 0)),
                      std::invalid_argument);
    OptimizationConfig bad;
    bad.restarts = 0;
    REQUIRE_THROWS_AS(maximize_bound(2, SingletFraction(0.5), bad), std::invalid_argument);
  }
}

TEST_CASE("sweep assembles per-point rows") {
  SECTION("xor-only strategy leaves optimization fields empty") {
    const std::vector<int> ns{1, 2};
    const std::vector<double> grid{0.2, 0.5, 0.8};
    const auto rows = sweep(ns, grid, quick_config(2, 0), SweepStrategy::XorOnly);
    REQUIRE(rows.size() == 6);
    REQUIRE(rows[0].n == 1);
    REQUIRE(rows[0].x == 0.2);
    REQUIRE(rows[4].n == 2);
    REQUIRE(rows[4].x == 0.5);
    for (const SweepRow& row : rows) {
      REQUIRE(row.xor_bound ==
              Approx(xor_bound_closed_form(row.n, SingletFraction(row.x))).margin(1e-13));
      REQUIRE_FALSE(row.opt_bound.has_value());
      REQUIRE_FALSE(row.opt_failed);
    }
  }

  SECTION("both strategies populate optimization columns") {
    const std::vector<int> ns{2};
    const std::vector<double> grid{0.5};
    const auto rows = sweep(ns, grid, quick_config(4, 7), SweepStrategy::Both);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].opt_bound.has_value());
    REQUIRE(*rows[0].opt_bound == Approx(2.0 / std::sqrt(1.25)).margin(1e-6));
    REQUIRE(*rows[0].opt_label == StrategyLabel::xor_equivalent);
    REQUIRE(rows[0].opt_success_probability.has_value());
    REQUIRE(*rows[0].opt_success_probability == Approx(0.3125).margin(1e-6));
  }

  SECTION("per-row optimization failures are recorded, not thrown") {
    const std::vector<int> ns{6};  // closed form exists, optimizer does not go there
    const std::vector<double> grid{0.5};
    const auto rows = sweep(ns, grid, quick_config(2, 0), SweepStrategy::Both);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].xor_bound > 0.0);
    REQUIRE(rows[0].opt_failed);
    REQUIRE_FALSE(rows[0].opt_bound.has_value());
    REQUIRE_FALSE(rows[0].opt_failure.empty());
  }

  SECTION("grid validation") {
    const std::vector<int> decreasing{2, 1};
    const std::vector<double> grid{0.5};
    REQUIRE_THROWS_AS(sweep(decreasing, grid, quick_config(2, 0), SweepStrategy::XorOnly),
                      std::invalid_argument);
    const std::vector<int> ns{1};
    const std::vector<double> unsorted{0.5, 0.2};
    REQUIRE_THROWS_AS(sweep(ns, unsorted, quick_config(2, 0), SweepStrategy::XorOnly),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(sweep(std::vector<int>{}, grid, quick_config(2, 0), SweepStrategy::XorOnly),
                      std::invalid_argument);
  }
}

TEST_CASE("crossover bisection") {
  SECTION("n=2 has no crossover: optimization never beats XOR") {
    const std::optional<double> x = crossover(2, quick_config(4, 3));
    REQUIRE_FALSE(x.has_value());
  }
  SECTION("n outside the supported range is rejected") {
    REQUIRE_THROWS_AS(crossover(1, quick_config(4, 0)), std::invalid_argument);
    REQUIRE_THROWS_AS(crossover(5, quick_config(4, 0)), std::invalid_argument);
    REQUIRE_THROWS_AS(crossover(3, quick_config(4, 0), -1.0), std::invalid_argument);
  }
}
