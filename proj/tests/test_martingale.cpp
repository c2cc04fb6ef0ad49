#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "orbint/instances.hpp"
#include "orbint/martingale.hpp"

using namespace orbint;

TEST_CASE("conditional expectations average over orbit blocks") {
  ActionSystem sys = torus_dyadic_system(0, 8);
  BorelRegion all = BorelRegion::all(1);

  OrbitPartition quarter = OrbitPartition::orbit_sigma_field(sys, sys.chain.level(2), all);
  Integrand half = Integrand::box_indicator(BorelRegion::half_open_interval(0.0, 0.5));
  std::complex<double> hit = orbit_conditional_expectation(quarter, half, {0.1});
  CHECK(hit.real() == 0.5);
  CHECK(hit.imag() == 0.0);

  // Averaging over Z/4Z kills e_3 and fixes e_4.
  CHECK(std::abs(orbit_conditional_expectation(quarter, Integrand::character({3}),
                                               {0.3})) <= 1e-15);
  CHECK(std::abs(orbit_conditional_expectation(quarter, Integrand::character({4}), {0.3}) -
                 oracles::character_value(4, 0.3)) <= 1e-14);

  // Over the full space the block mean is the orbital integral.
  OrbitPartition eighth = OrbitPartition::orbit_sigma_field(sys, sys.chain.level(3), all);
  Integrand f = Integrand::bump({0.35}, {0.2}, 1);
  TruncationPolicy trunc;
  std::complex<double> ce = orbit_conditional_expectation(eighth, f, {0.77});
  std::complex<double> oi = orbital_integral(sys, sys.level(3), f, {0.77}, trunc);
  CHECK(std::abs(ce - oi) <= 1e-13);

  CHECK_THROWS_AS(OrbitPartition::orbit_sigma_field(line_dyadic_system(1, 4),
                                                    GroupId::scaled_lattice(0.5), all),
                  UnsupportedLevel);
  CHECK_THROWS_AS(orbit_conditional_expectation(
                      OrbitPartition::orbit_sigma_field(
                          sys, sys.chain.level(2),
                          BorelRegion::half_open_interval(0.0, 0.5)),
                      half, {0.7}),
                  PointNotInRegion);
}

TEST_CASE("permutation blocks weight patterns by their multiplicity") {
  ActionSystem cyl = cylinder_sym_system({2, 3, 4}, 0.3);
  BorelRegion all = BorelRegion::all(cyl.space.dim);
  Point word = {1.0, 0.0, 1.0, 1.0};

  // Three ones among four slots: the first coordinate shows 3/4 on average.
  OrbitPartition four = OrbitPartition::orbit_sigma_field(cyl, cyl.chain.level(2), all);
  std::complex<double> mean =
      orbit_conditional_expectation(four, Integrand::coordinate_linear({1.0}), word);
  CHECK(mean.real() == 0.75);

  // Generic integrands enumerate start patterns; an exhaustive sweep over
  // all 4! permutations is the oracle.
  Integrand pattern = Integrand::box_indicator(
      BorelRegion::half_open_box({0.5, -0.5}, {1.5, 0.5}));
  std::complex<double> got = orbit_conditional_expectation(four, pattern, word);
  double want = oracles::permutation_average(
      [&](const std::vector<double>& y) {
        return pattern.eval({y[0], y[1]}).real();
      },
      word, 4);
  CHECK(got.real() == doctest::Approx(want).epsilon(1e-12));
  CHECK(got.real() == doctest::Approx(0.25).epsilon(1e-12));

  // Probability-normalized orbit sums agree with the block mean.
  OrbitPartition three = OrbitPartition::orbit_sigma_field(cyl, cyl.chain.level(1), all);
  Integrand first_three = Integrand::box_indicator(
      BorelRegion::half_open_box({0.5, -0.5, 0.5}, {1.5, 0.5, 1.5}));
  TruncationPolicy trunc;
  std::complex<double> ce = orbit_conditional_expectation(three, first_three, word);
  std::complex<double> oi = orbital_integral(cyl, cyl.level(1), first_three, word, trunc);
  CHECK(std::abs(ce - oi) <= 1e-12);
  CHECK(ce.real() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  // Closed form for linear words: permuted slots share their coefficient
  // mass, fixed slots keep theirs.
  OrbitPartition two = OrbitPartition::orbit_sigma_field(cyl, cyl.chain.level(0), all);
  Integrand lin = Integrand::coordinate_linear({1.0, 1.0, 0.5}, 0.1);
  Integrand ef = orbit_conditional_expectation_fn(two, lin);
  CHECK(ef.eval(word).real() == doctest::Approx(1.6).epsilon(1e-14));
  CHECK(ef.eval({0.0, 0.0, 1.0, 0.0}).real() == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("dyadic grids materialize exact orbit blocks") {
  ActionSystem sys = torus_dyadic_system(0, 8);
  BorelRegion front = BorelRegion::half_open_interval(0.0, 0.5);
  OrbitPartition grid =
      OrbitPartition::dyadic_grid(sys, sys.chain.level(2), front, 4);

  REQUIRE(grid.blocks().size() == 4);
  for (const OrbitBlock& block : grid.blocks()) {
    REQUIRE(block.points.size() == 2);
    double total = 0.0;
    for (double w : block.weights) total += w;
    CHECK(total == 1.0);
  }

  long idx = grid.block_index({0.3125});
  CHECK(idx == 1);
  const OrbitBlock& block = grid.blocks()[static_cast<std::size_t>(idx)];
  CHECK(block.points[0][0] == 0.0625);
  CHECK(block.points[1][0] == 0.3125);

  std::complex<double> ce =
      orbit_conditional_expectation(grid, Integrand::coordinate_linear({1.0}), {0.0625});
  CHECK(ce.real() == 0.1875);

  CHECK_THROWS_AS(grid.block_index({0.3}), PointNotInRegion);
  CHECK_THROWS_AS(grid.block_index({0.5625}), PointNotInRegion);
  CHECK_THROWS_AS(OrbitPartition::dyadic_grid(sys, sys.chain.level(3),
                                              BorelRegion::all(1), 2),
                  UnsupportedLevel);
  CHECK_THROWS_AS(OrbitPartition::dyadic_grid(
                      sys, GroupId::finite_cyclic(3), BorelRegion::all(1), 4),
                  UnsupportedLevel);
}

TEST_CASE("conditional expectation is an idempotent mean-preserving contraction") {
  ActionSystem sys = torus_dyadic_system(0, 8);
  BorelRegion all = BorelRegion::all(1);
  OrbitPartition part = OrbitPartition::orbit_sigma_field(sys, sys.chain.level(2), all);

  // Constants are fixed points.
  CHECK(orbit_conditional_expectation(part, Integrand::constant(0.7), {0.123}).real() ==
        0.7);

  // E(E(f)) = E(f).
  Integrand f = Integrand::bump({0.35}, {0.2}, 1);
  Integrand ef = orbit_conditional_expectation_fn(part, f);
  std::complex<double> once = orbit_conditional_expectation(part, f, {0.77});
  std::complex<double> twice = orbit_conditional_expectation(part, ef, {0.77});
  CHECK(std::abs(twice - once) <= 1e-13);

  // The space mean survives conditioning: both quadratures share one grid,
  // and the orbit shift permutes its nodes.
  BorelRegion period = BorelRegion::half_open_box({0.0}, {1.0});
  std::complex<double> mean_f = sys.space.mu_integral(f, period, 256);
  std::complex<double> mean_ef = sys.space.mu_integral(ef, period, 256);
  CHECK(std::abs(mean_f - mean_ef) <= 1e-13);

  // L1 contraction on the same grid.
  Integrand mixed = Integrand::trig_poly({{{0}, {0.3, 0.0}},
                                          {{4}, {1.0, 0.0}},
                                          {{6}, {0.5, 0.0}}});
  Integrand e_mixed = orbit_conditional_expectation_fn(part, mixed);
  Integrand abs_after = Integrand::custom(
      [e_mixed](const Point& p) {
        return std::complex<double>(std::abs(e_mixed.eval(p)), 0.0);
      },
      1, std::nullopt, true, true);
  Integrand abs_before = Integrand::custom(
      [mixed](const Point& p) {
        return std::complex<double>(std::abs(mixed.eval(p)), 0.0);
      },
      1, std::nullopt, true, true);
  double lhs = sys.space.mu_integral(abs_after, period, 512).real();
  double rhs = sys.space.mu_integral(abs_before, period, 512).real();
  CHECK(lhs <= rhs + 1e-12);
}

TEST_CASE("reversed martingales settle on the space mean") {
  ActionSystem sys = torus_dyadic_system(0, 6);
  std::vector<Point> sample = {{0.1}, {0.37}, {0.52}, {0.8}, {0.95}};

  // A shifted character: the constant term is the limit, the oscillation
  // dies at the first even level.
  Integrand shifted = Integrand::trig_poly({{{0}, {2.0, 0.0}}, {{3}, {1.0, 0.0}}});
  MartingaleReport trig = reversed_martingale_check(sys, shifted, sample, 0, 6, 1e-10);
  CHECK(trig.pass);
  CHECK(trig.declared_limit.real() == 2.0);
  CHECK(trig.tower_residual <= 1e-10);
  CHECK(trig.first_median == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trig.final_median <= 1e-14);
  REQUIRE(trig.median_deviation.size() == 7);
  for (std::size_t i = 1; i < trig.median_deviation.size(); ++i)
    CHECK(trig.median_deviation[i] <= 1e-14);

  // A smooth bump needs the quadrature limit; deviations still collapse.
  Integrand f = Integrand::bump({0.5}, {0.3}, 1);
  MartingaleReport smooth = reversed_martingale_check(sys, f, sample, 0, 6, 1e-8);
  CHECK(smooth.pass);
  CHECK(smooth.tower_residual <= 1e-12);
  CHECK(smooth.final_median <= 1e-4);

  // Constants give an exactly flat tower.
  MartingaleReport flat =
      reversed_martingale_check(sys, Integrand::constant(0.7), sample, 0, 4, 1e-12);
  CHECK(flat.pass);
  CHECK(flat.tower_residual == 0.0);
  CHECK(flat.final_median == 0.0);

  CHECK_THROWS_AS(reversed_martingale_check(sys, f, {}, 0, 4, 1e-8), OrbintError);
  CHECK_THROWS_AS(reversed_martingale_check(sys, f, sample, 0, 20, 1e-8),
                  UnsupportedLevel);
}

TEST_CASE("cylinder towers collapse linear words exactly") {
  ActionSystem cyl = cylinder_sym_system({2, 3, 4}, 0.3);
  Integrand lin = Integrand::coordinate_linear({1.0, 0.5, 0.25}, 0.1);
  std::vector<Point> words = {{1, 0, 1, 1}, {0, 0, 1, 0}, {1, 1, 0, 1},
                              {0, 1, 0, 0}, {1, 0, 0, 1}};
  MartingaleReport report = reversed_martingale_check(cyl, lin, words, 0, 2, 1e-10);
  CHECK(report.tower_residual <= 1e-12);
  CHECK(report.declared_limit.real() == doctest::Approx(0.625).epsilon(1e-15));
  REQUIRE(report.median_deviation.size() == 3);
  CHECK(report.median_deviation[0] == doctest::Approx(0.275).epsilon(1e-12));
  CHECK(report.median_deviation[2] == doctest::Approx(0.35).epsilon(1e-12));
  // Words this short keep their deviation, and the report says so.
  CHECK_FALSE(report.pass);
}
