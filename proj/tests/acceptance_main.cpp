// Acceptance gate: ten behavioral checks run at their committed tolerances
// and runtime budgets, one verdict line each. Exit 0 only when all hold.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "orbint/averaging.hpp"
#include "orbint/calibration.hpp"
#include "orbint/diagnostics.hpp"
#include "orbint/groups.hpp"
#include "orbint/instances.hpp"
#include "orbint/martingale.hpp"
#include "orbint/measures.hpp"

using namespace orbint;

namespace {

int failures = 0;

void run_criterion(int index, const char* name, double cap_seconds,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();
  const bool in_budget = seconds < cap_seconds;
  const bool pass = ok && in_budget;
  if (!pass) ++failures;
  std::printf("criterion %2d %-52s %s (%s; %.2f s / cap %.0f s)\n", index,
              name, pass ? "PASS" : "FAIL",
              detail.empty() ? "no detail" : detail.c_str(), seconds,
              cap_seconds);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

GroupChain line_lattice_chain(int n_hi) {
  std::vector<GroupId> levels;
  for (int n = 0; n <= n_hi; ++n)
    levels.push_back(GroupId::scaled_lattice(std::ldexp(1.0, -n), 1));
  return make_chain(GroupId::real_line(1), std::move(levels));
}

GroupChain affine_level_chain(int m_hi) {
  std::vector<GroupId> levels;
  for (int m = 0; m <= m_hi; ++m)
    levels.push_back(GroupId::affine_scale_level(m));
  return make_chain(GroupId::affine(), std::move(levels));
}

bool character_exactness(std::string& detail) {
  ActionSystem system = torus_dyadic_system(0, 1);
  const TruncationPolicy trunc;
  std::vector<Point> sample;
  for (int i = 0; i < 100; ++i) sample.push_back(system.space.sample(1, i));
  double worst = 0.0;
  for (long m = 0; m <= 32; ++m) {
    Integrand em = Integrand::character({m});
    for (long n = 1; n <= 32; ++n) {
      LevelRef level = LevelRef::group(GroupId::finite_cyclic(n));
      for (const auto& x : sample) {
        std::complex<double> value = orbital_integral(system, level, em, x, trunc);
        std::complex<double> expected =
            (m % n == 0) ? em.eval(x) : std::complex<double>{0.0, 0.0};
        worst = std::max(worst, std::abs(value - expected));
      }
    }
  }
  detail = "worst gap " + fmt(worst) + " <= 1e-12";
  return worst <= 1e-12;
}

bool dyadic_power_convergence(std::string& detail) {
  ActionSystem system = torus_dyadic_system(0, 14);
  std::vector<ScheduleEntry> schedule = chain_schedule(system);
  const TruncationPolicy trunc;
  ConvergenceVerdict verdict = ae_limit_estimate(
      system, Integrand::power_singularity(0.75), schedule, 1000,
      calibration::kJessenFinalMedianBound, 1, trunc,
      std::complex<double>{4.0, 0.0}, 0.0, SingularPolicy::Skip);
  bool decreasing = true;
  std::size_t deep_pairs = 0;
  for (std::size_t l = 0; l + 1 < schedule.size(); ++l) {
    if (schedule[l].label < 256) continue;
    ++deep_pairs;
    if (!(verdict.median_deviation[l + 1] < verdict.median_deviation[l]))
      decreasing = false;
  }
  const double final_median = verdict.median_deviation.back();
  detail = "final median " + fmt(final_median) + " <= " +
           fmt(calibration::kJessenFinalMedianBound) + ", deep medians " +
           (decreasing ? "strictly decreasing" : "not decreasing");
  return decreasing && deep_pairs >= 6 &&
         final_median <= calibration::kJessenFinalMedianBound;
}

bool full_sequence_divergence(std::string& detail) {
  ActionSystem system = torus_dyadic_system(0, 1);
  std::vector<Point> sample;
  for (int i = 0; i < 200; ++i) sample.push_back(system.space.sample(1, i));
  DivergenceReport report = divergence_gap(
      system, Integrand::power_singularity(0.75), 10000, sample, 4.0,
      calibration::kDivergenceMultiple, calibration::kDivergenceFraction);
  detail = "running max > " + fmt(report.flag_threshold) + " at " +
           fmt(100.0 * report.flagged_fraction) + "% of points (need " +
           fmt(100.0 * calibration::kDivergenceFraction) + "%)";
  return report.flag;
}

bool lattice_gap_halving(std::string& detail) {
  GroupChain chain = line_lattice_chain(12);
  const TruncationPolicy trunc;
  Integrand phi = Integrand::ramp(0.0, 1.0);
  const double ambient = haar_integral(chain, std::nullopt, phi, {}, trunc);
  std::vector<double> gaps;
  for (std::size_t n = 4; n <= 12; ++n)
    gaps.push_back(std::abs(haar_integral(chain, n, phi, {}, trunc) - ambient));
  double lo = 2.0, hi = 0.0;
  bool positive = true;
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    if (gaps[i] <= 0.0) positive = false;
    const double ratio = gaps[i + 1] / gaps[i];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  detail = "per-level gap ratios in [" + fmt(lo) + ", " + fmt(hi) +
           "] (need [0.333, 0.75])";
  return positive && lo >= 1.0 / 3.0 && hi <= 0.75;
}

bool affine_identity(std::string& detail) {
  ActionSystem system = affine_self_system(0, 2);
  ProductIntegrand f{Integrand::bump_affine({0.2, 0.1}, {0.9, 0.8}, 2),
                     Integrand::bump_affine({-0.3, 0.4}, {0.7, 0.6}, 1)};
  const TruncationPolicy trunc;
  CrucialIdentityReport coarse = crucial_identity_report(
      system, f, LevelRef::ambient(), trunc, 1u << 14, 1e-4);
  CrucialIdentityReport fine = crucial_identity_report(
      system, f, LevelRef::ambient(), trunc, 1u << 16, 1e-4);
  const bool shrank = coarse.max_pairwise_gap > 0.0 &&
                      fine.max_pairwise_gap <= coarse.max_pairwise_gap / 4.0;
  detail = "gap " + fmt(coarse.max_pairwise_gap) + " <= 1e-4, refined gap " +
           fmt(fine.max_pairwise_gap) + (shrank ? " (>=4x smaller)"
                                                : " (shrink below 4x)");
  return coarse.pass && coarse.max_pairwise_gap <= 1e-4 && shrank;
}

bool modular_weighting(std::string& detail) {
  GroupChain chain = affine_level_chain(3);
  const TruncationPolicy trunc;
  ModularConditionReport report = modular_condition_report(
      chain, 3, default_test_panel(GroupId::affine()), trunc, 1e-4);
  detail = "max residual " + fmt(report.max_residual) + " <= 1e-4 over " +
           std::to_string(report.residuals.size()) + " pairs";
  return report.pass && report.max_residual <= 1e-4 &&
         report.residuals.size() >= 15;
}

bool maximal_audits(std::string& detail) {
  const TruncationPolicy trunc;
  const std::vector<double> alphas = {0.25, 0.5, 1.0, 2.0, 4.0};
  Integrand box = Integrand::box_indicator(BorelRegion::interval(0.0, 1.0));
  Integrand power = Integrand::power_singularity(0.75);

  ActionSystem torus = torus_dyadic_system(0, 8);
  const BorelRegion circle = BorelRegion::half_open_interval(0.0, 1.0);
  // Along the doubling chain the level averages of a nonnegative integrand
  // form a reversed martingale, so the level-set bound holds with constant
  // one on the circle.
  MaximalAuditReport t_box = maximal_inequality_audit(
      torus, box, circle, 1.0, alphas, 9, trunc, 1e-3, 8192);
  MaximalAuditReport t_power =
      maximal_inequality_audit(torus, power, circle, 1.0, alphas, 9, trunc,
                               1e-3, 8192, SingularPolicy::Skip);

  ActionSystem line = line_dyadic_system(1, 8);
  const BorelRegion window = BorelRegion::interval(-2.0, 3.0);
  const double ck = calibration::kLineAuditConstant;
  MaximalAuditReport l_box = maximal_inequality_audit(
      line, box, window, ck, alphas, 8, trunc, 1e-3, 8192);
  MaximalAuditReport l_power =
      maximal_inequality_audit(line, power, window, ck, alphas, 8, trunc,
                               1e-3, 8192, SingularPolicy::Skip);

  MaximalAuditReport corrupted = maximal_inequality_audit(
      torus, box, circle, 1.0, alphas, 9, trunc, 1e-3, 8192,
      SingularPolicy::Error,
      [](const Point&, double v) { return 3.0 * v + 10.0; });

  const bool honest =
      t_box.pass && t_power.pass && l_box.pass && l_power.pass;
  detail = std::string("audits ") + (honest ? "hold" : "violated") +
           "; corrupted audit " + (corrupted.pass ? "passed" : "rejected");
  return honest && !corrupted.pass;
}

bool planar_lattice_exactness(std::string& detail) {
  ActionSystem plane = plane_dyadic_system(0, 8);
  const BorelRegion D = BorelRegion::half_open_box({0.0, 0.0}, {1.0, 1.0});
  bool counts_exact = true;
  for (int n = 0; n <= 8; ++n)
    if (lattice_domain_count(plane, plane.level(n), D) != (1L << (2 * n)))
      counts_exact = false;

  const Point x = {0.37, 0.81};
  Integrand generic = Integrand::trig_poly({{{0, 0}, {0.3, 0.0}},
                                            {{1, 0}, {0.5, 0.0}},
                                            {{0, 3}, {0.0, 0.25}},
                                            {{7, 5}, {-0.125, 0.0}}});
  const std::complex<double> plain =
      lattice_average(plane, plane.level(8), generic, D, x);
  const double generic_gap = std::abs(plain - std::complex<double>{0.3, 0.0});

  Integrand aliased = Integrand::trig_poly({{{0, 0}, {0.3, 0.0}},
                                            {{1, 0}, {0.5, 0.0}},
                                            {{256, 0}, {0.25, 0.0}}});
  const std::complex<double> folded =
      lattice_average(plane, plane.level(8), aliased, D, x);
  const std::complex<double> expected =
      0.3 + 0.25 * std::exp(std::complex<double>(
                       0.0, 2.0 * std::numbers::pi * 256.0 * x[0]));
  const double alias_gap = std::abs(folded - expected);

  const BorelRegion D2 = BorelRegion::half_open_box({0.3, -0.2}, {1.3, 0.8});
  const double shift_gap =
      std::abs(plain - lattice_average(plane, plane.level(8), generic, D2, x));

  detail = "counts exact: " + std::string(counts_exact ? "yes" : "no") +
           ", generic gap " + fmt(generic_gap) + ", alias gap " +
           fmt(alias_gap) + ", shift gap " + fmt(shift_gap);
  return counts_exact && generic_gap <= 1e-12 && alias_gap <= 1e-12 &&
         shift_gap <= 1e-12;
}

bool reversed_martingale(std::string& detail) {
  ActionSystem torus = torus_dyadic_system(0, 8);
  Integrand trig =
      Integrand::trig_poly({{{0}, {2.0, 0.0}}, {{3}, {1.0, 0.0}}});
  const std::vector<Point> xs = {{0.1}, {0.37}, {0.52}, {0.8}, {0.95}};
  MartingaleReport tr = reversed_martingale_check(
      torus, trig, xs, 0, 8, 1e-10, std::complex<double>{2.0, 0.0});

  ActionSystem cyl = cylinder_sym_system({4, 16, 64, 256}, 0.3);
  Integrand lin = Integrand::coordinate_linear({1.0, 0.5, 0.25}, 0.1);
  std::vector<Point> words;
  for (int i = 0; i < 5; ++i) words.push_back(cyl.space.sample(1, i));
  MartingaleReport cr = reversed_martingale_check(
      cyl, lin, words, 0, 3, 1e-10, std::complex<double>{0.625, 0.0});

  OrbitPartition deep = OrbitPartition::orbit_sigma_field(
      cyl, cyl.chain.level(3), BorelRegion::all(256));
  Integrand first_coord = Integrand::coordinate_linear({1.0}, 0.0);
  Integrand mean_fn = orbit_conditional_expectation_fn(deep, first_coord);
  const double band = 4.0 * calibration::kCylinderStdErr256;
  std::size_t inside = 0;
  const std::size_t draws = 1000;
  for (std::size_t i = 0; i < draws; ++i) {
    const Point w = cyl.space.sample(1, 1000 + i);
    if (std::abs(mean_fn.eval(w).real() - 0.3) <= band) ++inside;
  }
  const double covered = static_cast<double>(inside) / draws;

  detail = "tower residuals " + fmt(tr.tower_residual) + " and " +
           fmt(cr.tower_residual) + " <= 1e-10; degree-256 mean inside 4 SE at " +
           fmt(100.0 * covered) + "% (need 99%)";
  return tr.tower_residual <= 1e-10 && cr.tower_residual <= 1e-10 &&
         covered >= 0.99;
}

bool rational_window_separation(std::string& detail) {
  ActionSystem line = line_dyadic_system(1, 8);
  const TruncationPolicy trunc;
  Integrand box = Integrand::box_indicator(BorelRegion::interval(0.0, 1.0));
  const BorelRegion Q = BorelRegion::rational_window(0.0, 1.0);
  const GroupElement origin = line_point({0.0});
  const Point x0 = {0.0};

  bool lattice_exact = true;
  for (int i = 0; i < 8; ++i) {
    const std::complex<double> v =
        restricted_average(line, line.level(i), box, Q, origin,
                           Rationality::Rational, x0, trunc);
    if (v.real() != 1.0 + std::ldexp(1.0, -(i + 1)) || v.imag() != 0.0)
      lattice_exact = false;
  }
  const std::complex<double> ambient = restricted_average(
      line, LevelRef::ambient(), box, Q, origin, Rationality::Rational, x0,
      trunc);

  bool irrational_zero = true;
  for (int i = 0; i < 100; ++i) {
    const GroupElement s = line_point({line.space.sample(1, i)});
    const std::complex<double> lat = restricted_average(
        line, line.level(3), box, Q, s, Rationality::Irrational, x0, trunc);
    const std::complex<double> amb = restricted_average(
        line, LevelRef::ambient(), box, Q, s, Rationality::Irrational, x0,
        trunc);
    if (lat != std::complex<double>{0.0, 0.0} ||
        amb != std::complex<double>{0.0, 0.0})
      irrational_zero = false;
  }
  detail = std::string("rational shift: lattice 1+2^-n ") +
           (lattice_exact ? "exact" : "off") + ", ambient " +
           fmt(std::abs(ambient)) + "; irrational shifts " +
           (irrational_zero ? "all zero" : "nonzero");
  return lattice_exact && ambient == std::complex<double>{0.0, 0.0} &&
         irrational_zero;
}

}  // namespace

int main() {
  run_criterion(1, "equispaced character averages match aliased values", 1.0,
                character_exactness);
  run_criterion(2, "dyadic power-kernel medians settle at the integral", 30.0,
                dyadic_power_convergence);
  run_criterion(3, "full-sequence running maxima exceed the dyadic limit",
                60.0, full_sequence_divergence);
  run_criterion(4, "lattice level integrals halve their gap per level", 5.0,
                lattice_gap_halving);
  run_criterion(5, "affine invariant integrals agree three ways", 30.0,
                affine_identity);
  run_criterion(6, "discrete affine levels keep the modular weighting", 10.0,
                modular_weighting);
  run_criterion(7, "weak-type audits hold and reject corrupted maxima", 10.0,
                maximal_audits);
  run_criterion(8, "planar lattice counts and aliasing are exact", 5.0,
                planar_lattice_exactness);
  run_criterion(9, "reversed martingale towers contract to the mean", 10.0,
                reversed_martingale);
  run_criterion(10, "rational windows separate lattice from ambient", 1.0,
                rational_window_separation);
  if (failures > 0) {
    std::printf("%d of 10 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
