#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "orbint/averaging.hpp"
#include "orbint/instances.hpp"
#include "orbint/rng.hpp"

using namespace orbint;

TEST_CASE("the action moves points as declared") {
  ActionSystem torus = torus_dyadic_system(0, 4);
  Point y = act(torus, torus_point({0.3}), {0.9});
  CHECK(y[0] == doctest::Approx(0.2).epsilon(1e-15));

  ActionSystem line = line_dyadic_system(1, 4);
  CHECK(act(line, line_point({1.25}), {0.5})[0] == 1.75);
  CHECK(act(line, lattice_atom(0.25, {3}), {0.5})[0] == 1.25);

  ActionSystem plane = plane_dyadic_system(0, 4);
  Point p = act(plane, line_point({0.5, 0.75}), {0.75, 0.5});
  CHECK(p[0] == 0.25);
  CHECK(p[1] == 0.25);

  ActionSystem aff = affine_self_system(0, 3);
  Point q = act(aff, affine_element(2.0, 1.0), {3.0, 4.0});
  CHECK(q[0] == 6.0);
  CHECK(q[1] == 9.0);

  ActionSystem affline = affine_line_system(0, 3);
  CHECK(act(affline, affine_element(2.0, 1.0), {3.0})[0] == 7.0);

  ActionSystem cyl = cylinder_sym_system({2, 4}, 0.3);
  GroupElement swap01 = perm_element(4, {1, 0, 2, 3});
  Point w = act(cyl, swap01, {1.0, 0.0, 1.0, 1.0});
  CHECK(w == Point{0.0, 1.0, 1.0, 1.0});
}

TEST_CASE("composition acts as iterated application") {
  ActionSystem aff = affine_self_system(0, 3);
  SplitMix64 rng(20260816u);
  for (int i = 0; i < 200; ++i) {
    GroupElement g = affine_element(rng.uniform(0.2, 5.0), rng.uniform(-2.0, 2.0));
    GroupElement h = affine_element(rng.uniform(0.2, 5.0), rng.uniform(-2.0, 2.0));
    Point x{rng.uniform(0.2, 5.0), rng.uniform(-2.0, 2.0)};
    Point lhs = act(aff, compose(g, h), x);
    Point rhs = act(aff, g, act(aff, h, x));
    CHECK(std::abs(lhs[0] - rhs[0]) <= 1e-12 * std::abs(lhs[0]));
    CHECK(std::abs(lhs[1] - rhs[1]) <= 1e-11);
  }

  ActionSystem torus = torus_dyadic_system(0, 4);
  for (int i = 0; i < 200; ++i) {
    GroupElement g = torus_point({rng.uniform(0.0, 1.0)});
    GroupElement h = torus_point({rng.uniform(0.0, 1.0)});
    Point x{rng.uniform(0.0, 1.0)};
    double lhs = act(torus, compose(g, h), x)[0];
    double rhs = act(torus, g, act(torus, h, x))[0];
    double gap = std::abs(lhs - rhs);
    gap = std::min(gap, 1.0 - gap);  // both sides are mod-1 representatives
    CHECK(gap <= 1e-12);
  }
}

TEST_CASE("the measure transforms with the declared factor under the action") {
  // Dyadic rotation with a power-of-two grid permutes the probe cells, so
  // the two sides agree bitwise.
  ActionSystem torus = torus_dyadic_system(0, 6);
  InvarianceReport arc = relative_invariance_report(
      torus, {torus_point({0.25}), torus_point({0.5})},
      {Integrand::box_indicator(BorelRegion::interval(0.0, 0.3, false))},
      1e-12, 1u << 10);
  CHECK(arc.pass);
  CHECK(arc.max_residual == 0.0);

  InvarianceReport smooth = relative_invariance_report(
      torus, {torus_point({0.381966011250105})},
      {Integrand::bump({0.35}, {0.2}, 1)}, 1e-8, 1u << 10);
  CHECK(smooth.pass);

  ActionSystem aff = affine_self_system(0, 3);
  InvarianceReport rel = relative_invariance_report(
      aff, {affine_element(2.0, 1.0), affine_element(0.5, -0.3)},
      {Integrand::bump_affine({0.2, 0.1}, {0.9, 0.8}, 2)}, 1e-6, 1u << 10);
  CHECK(rel.pass);

  // Permuting Bernoulli coordinates leaves linear expectations exactly alone.
  ActionSystem cyl = cylinder_sym_system({2, 4}, 0.3);
  InvarianceReport exch = relative_invariance_report(
      cyl, {perm_element(4, {1, 0, 2, 3}), perm_element(4, {3, 0, 1, 2})},
      {Integrand::coordinate_linear({1.0, 0.0, 0.0, 0.0})}, 0.0, 8);
  CHECK(exch.pass);
  CHECK(exch.max_residual == 0.0);
}

TEST_CASE("joint integrands factor across the pair") {
  ProductIntegrand f{Integrand::coordinate_linear({2.0}, 0.5),
                     Integrand::coordinate_linear({1.0, 1.0}, 0.0)};
  std::complex<double> v = f.eval({0.5}, affine_element(2.0, 1.0));
  CHECK(std::abs(v - std::complex<double>(1.5 * (std::log(2.0) + 1.0), 0.0)) <=
        1e-14);
}

TEST_CASE("three expressions of one pairing agree") {
  TruncationPolicy trunc;

  ActionSystem torus = torus_dyadic_system(0, 4);
  ProductIntegrand ft{Integrand::bump({0.35}, {0.2}, 1),
                      Integrand::bump({0.62}, {0.25}, 2)};
  CrucialIdentityReport tr = crucial_identity_report(
      torus, ft, LevelRef::ambient(), trunc, 1u << 14, 1e-3);
  CHECK(tr.pass);
  double gref = oracles::midpoint_quadrature(
      [](double x) {
        double s = (x - 0.35) / 0.2;
        return std::abs(s) < 1.0 ? (1 - s * s) * (1 - s * s) : 0.0;
      },
      0.0, 1.0, 100000);
  double href = oracles::midpoint_quadrature(
      [](double t) {
        double s = (t - 0.62) / 0.25;
        double c = std::abs(s) < 1.0 ? (1 - s * s) : 0.0;
        return c * c * c;
      },
      0.0, 1.0, 100000);
  CHECK(tr.i2 == doctest::Approx(gref * href).epsilon(1e-4));

  // A cyclic level with a reflection-symmetric group part: every grid in
  // sight aligns, so the three sums share their terms exactly.
  ProductIntegrand fc{Integrand::bump({0.35}, {0.2}, 1),
                      Integrand::bump({0.5}, {0.3}, 0)};
  CrucialIdentityReport cyc = crucial_identity_report(
      torus, fc, LevelRef::group(GroupId::finite_cyclic(8)), trunc, 1u << 14,
      1e-12);
  CHECK(cyc.pass);

  // The line pairing exercises the reflected window: the group part is
  // deliberately not symmetric about zero.
  ActionSystem line = line_dyadic_system(1, 8);
  ProductIntegrand fl{Integrand::bump({0.3}, {1.0}, 1),
                      Integrand::bump({-0.2}, {0.8}, 2)};
  CrucialIdentityReport lr = crucial_identity_report(
      line, fl, LevelRef::ambient(), trunc, 1u << 12, 1e-4);
  CHECK(lr.pass);
  double glref = oracles::midpoint_quadrature(
      [](double x) {
        double s = x - 0.3;
        return std::abs(s) < 1.0 ? (1 - s * s) * (1 - s * s) : 0.0;
      },
      -0.7, 1.3, 100000);
  double hlref = oracles::midpoint_quadrature(
      [](double t) {
        double s = (t + 0.2) / 0.8;
        double c = std::abs(s) < 1.0 ? (1 - s * s) : 0.0;
        return c * c * c;
      },
      -1.0, 0.6, 100000);
  CHECK(lr.i2 == doctest::Approx(glref * hlref).epsilon(1e-4));
  CHECK(lr.i3 == doctest::Approx(lr.i2).epsilon(1e-3));

  ActionSystem aff = affine_self_system(0, 4);
  ProductIntegrand fa{Integrand::bump_affine({0.2, 0.1}, {0.9, 0.8}, 2),
                      Integrand::bump_affine({-0.3, 0.4}, {0.7, 0.6}, 1)};
  CrucialIdentityReport ar = crucial_identity_report(
      aff, fa, LevelRef::ambient(), trunc, 1u << 12, 1e-3);
  CHECK(ar.pass);

  ActionSystem cyl = cylinder_sym_system({2, 4}, 0.3);
  ProductIntegrand fz{Integrand::constant(1.0, 4), Integrand::constant(1.0, 1)};
  CHECK_THROWS_AS(crucial_identity_report(cyl, fz, LevelRef::ambient(), trunc,
                                          1u << 10, 1e-3),
                  OrbintError);
}

TEST_CASE("hitting measures count and slice exactly") {
  TruncationPolicy trunc;

  ActionSystem line = line_dyadic_system(1, 8);
  BorelRegion unit = BorelRegion::interval(0.0, 1.0, true);
  CHECK(hitting_measure(line, LevelRef::ambient(), unit, {0.37}, trunc).value ==
        1.0);
  HittingValue at0 = hitting_measure(
      line, LevelRef::group(GroupId::scaled_lattice(0.0625)), unit, {0.0},
      trunc);
  CHECK(at0.value == 1.0625);  // 17 lattice points, weight 1/16 each
  CHECK(!at0.infinite);
  HittingValue off = hitting_measure(
      line, LevelRef::group(GroupId::scaled_lattice(0.0625)), unit, {0.3},
      trunc);
  CHECK(off.value == 1.0);  // 16 points: neither endpoint lands on the grid

  ActionSystem torus = torus_dyadic_system(0, 6);
  BorelRegion arc = BorelRegion::interval(0.0, 0.6, false);
  CHECK(hitting_measure(torus, LevelRef::group(GroupId::finite_cyclic(4)), arc,
                        {0.1}, trunc)
            .value == 0.5);
  BorelRegion dyadic_arc = BorelRegion::interval(0.25, 0.5, false);
  CHECK(hitting_measure(torus, LevelRef::ambient(), dyadic_arc, {0.9}, trunc)
            .value == doctest::Approx(0.25).epsilon(1e-12));
  BorelRegion two_arcs = BorelRegion::disjoint_union(
      {BorelRegion::interval(0.0, 0.25, false),
       BorelRegion::interval(0.5, 0.75, false)});
  CHECK(hitting_measure(torus, LevelRef::ambient(), two_arcs, {0.33}, trunc)
            .value == doctest::Approx(0.5).epsilon(1e-12));

  BorelRegion rationals = BorelRegion::rational_window(0.0, 1.0);
  HittingValue null_target =
      hitting_measure(line, LevelRef::ambient(), rationals, {0.3}, trunc);
  CHECK(null_target.value == 0.0);
  CHECK(!null_target.infinite);

  ActionSystem aff = affine_self_system(0, 3);
  BorelRegion chart_box = BorelRegion::closed_box({0.0, 0.0}, {1.0, 2.0});
  CHECK(hitting_measure(aff, LevelRef::ambient(), chart_box, {1.7, -0.4}, trunc)
            .value == 2.0);

  ActionSystem affline = affine_line_system(0, 3);
  CHECK(hitting_measure(affline, LevelRef::ambient(), unit, {3.0}, trunc)
            .infinite);
  CHECK(hitting_measure(affline,
                        LevelRef::group(GroupId::affine_scale_level(2)), unit,
                        {3.0}, trunc)
            .infinite);

  // A planar lattice wraps around the 2-torus forever: the preimage of a
  // positive-area box is unbounded.
  ActionSystem plane = plane_dyadic_system(0, 4);
  BorelRegion corner = BorelRegion::half_open_box({0.0, 0.0}, {0.25, 0.25});
  CHECK(hitting_measure(plane,
                        LevelRef::group(GroupId::scaled_lattice(0.25, 2)),
                        corner, {0.0, 0.0}, trunc)
            .infinite);
}

TEST_CASE("sampled points certify finite ambient hitting") {
  TruncationPolicy trunc;

  ActionSystem line = line_dyadic_system(1, 8);
  IntegrabilityReport lr = integrability_certificate(
      line, line.space.exhaustion, 64, 20260816u, trunc);
  CHECK(lr.pass);
  for (double fr : lr.finite_fraction) CHECK(fr == 1.0);

  ActionSystem torus = torus_dyadic_system(0, 6);
  IntegrabilityReport tr = integrability_certificate(
      torus, {BorelRegion::interval(0.0, 0.5, false)}, 32, 7u, trunc);
  CHECK(tr.pass);

  // The improper action: every sampled point hits every window infinitely.
  ActionSystem affline = affine_line_system(0, 3);
  IntegrabilityReport ar = integrability_certificate(
      affline, affline.space.exhaustion, 32, 7u, trunc);
  CHECK(!ar.pass);
  for (double fr : ar.finite_fraction) CHECK(fr == 0.0);
}

TEST_CASE("space measures match region content") {
  MeasuredSpace line = MeasuredSpace::real_line(1);
  BorelRegion b = BorelRegion::interval(-2.0, 3.0, false);
  CHECK(line.mu_measure(b) == b.content());
  CHECK(b.content() == 5.0);

  MeasuredSpace torus = MeasuredSpace::torus(1);
  CHECK(torus.mu_measure(BorelRegion::interval(0.25, 0.5, false)) == 0.25);

  MeasuredSpace aff = MeasuredSpace::affine_group();
  CHECK(aff.mu_measure(BorelRegion::closed_box({0.0, -1.0}, {1.0, 1.0})) ==
        2.0);
  CHECK(!aff.exhaustion.empty());

  MeasuredSpace cyl = MeasuredSpace::cylinder(4, 0.3);
  CHECK(cyl.dim == 4);
}
