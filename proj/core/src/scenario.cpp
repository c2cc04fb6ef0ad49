#include "orbint/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "orbint/calibration.hpp"
#include "orbint/diagnostics.hpp"
#include "orbint/instances.hpp"
#include "orbint/martingale.hpp"
#include "orbint/measures.hpp"
#include "orbint/parallel.hpp"

namespace orbint {
namespace {

using ScenarioFn = void (*)(const ScenarioConfig&, ScenarioReport&);

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

ScheduleSpec schedule_of(const ScenarioConfig& config,
                         const std::string& expected_kind) {
  ScheduleSpec spec = parse_schedule_spec(config.levels);
  if (spec.kind != expected_kind)
    throw ConfigError("scenario " + config.scenario + " expects a '" +
                      expected_kind + "' schedule, got '" + spec.kind + "'");
  return spec;
}

TruncationPolicy truncation_of(const ScenarioConfig& config) {
  TruncationPolicy trunc;
  trunc.window = config.window;
  return trunc;
}

void push_row(ScenarioReport& report, long point_index, long level,
              std::complex<double> value, std::complex<double> reference) {
  report.rows.push_back({point_index, level, value, reference,
                         std::abs(value - reference)});
}

void append_verdict_rows(ScenarioReport& report,
                         const ConvergenceVerdict& verdict,
                         const std::vector<ScheduleEntry>& schedule) {
  for (std::size_t i = 0; i < verdict.values.size(); ++i)
    for (std::size_t l = 0; l < schedule.size(); ++l)
      push_row(report, static_cast<long>(i), schedule[l].label,
               verdict.values[i][l], verdict.references[i]);
}

// --- jessen-dyadic ---------------------------------------------------------

void run_jessen(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem system =
      torus_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  std::vector<ScheduleEntry> schedule = chain_schedule(system);
  Integrand f = Integrand::power_singularity(0.75);
  const double limit = 1.0 / (1.0 - 0.75);
  ConvergenceVerdict verdict = ae_limit_estimate(
      system, f, schedule, static_cast<std::size_t>(config.sample_size),
      config.tol, config.seed, truncation_of(config),
      std::complex<double>{limit, 0.0});
  append_verdict_rows(report, verdict, schedule);

  // Medians must decrease strictly over the deep tail (orders >= 2^8) and
  // the final one must clear the committed bound.
  bool decreasing = true;
  std::size_t tail_entries = 0;
  for (std::size_t l = 0; l + 1 < schedule.size(); ++l) {
    if (schedule[l].label < 256) continue;
    ++tail_entries;
    if (!(verdict.median_deviation[l + 1] < verdict.median_deviation[l]))
      decreasing = false;
  }
  const double final_median = verdict.median_deviation.back();
  report.pass =
      decreasing && tail_entries >= 2 && final_median <= config.tol;
  report.lines.push_back("median deviation from " + fmt_short(limit) +
                         " at final level: " + fmt_short(final_median) +
                         " (bound " + fmt_short(config.tol) + ")");
  report.lines.push_back(std::string("tail medians strictly decreasing: ") +
                         (decreasing ? "yes" : "no"));
}

// --- ursell-divergence -----------------------------------------------------

void run_ursell(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "all");
  if (spec.lo != 1)
    throw ConfigError("ursell-divergence sweeps every order from 1");
  ActionSystem system = torus_dyadic_system(0, 1);
  Integrand f = Integrand::power_singularity(0.75);
  std::vector<Point> sample;
  for (long i = 0; i < config.sample_size; ++i)
    sample.push_back(system.space.sample(config.seed,
                                         static_cast<std::uint64_t>(i)));
  const double limit = 1.0 / (1.0 - 0.75);
  DivergenceReport div = divergence_gap(
      system, f, spec.hi, sample, limit, calibration::kDivergenceMultiple,
      calibration::kDivergenceFraction, SingularPolicy::Skip);
  for (std::size_t i = 0; i < div.running_max.size(); ++i)
    for (std::size_t c = 0; c < div.checkpoints.size(); ++c)
      push_row(report, static_cast<long>(i), div.checkpoints[c],
               {div.running_max[i][c], 0.0}, {limit, 0.0});
  report.pass = div.flag;
  report.lines.push_back(
      "fraction of points with running max above " +
      fmt_short(div.flag_threshold) + ": " + fmt_short(div.flagged_fraction));
  report.lines.push_back("verdict: " + div.verdict);
}

// --- riemann-exact-characters ----------------------------------------------

void run_characters(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "all");
  ActionSystem system = torus_dyadic_system(0, 1);
  const TruncationPolicy trunc = truncation_of(config);
  std::vector<Point> sample;
  for (long i = 0; i < config.sample_size; ++i)
    sample.push_back(system.space.sample(config.seed,
                                         static_cast<std::uint64_t>(i)));
  double worst = 0.0;
  for (long m = 0; m <= 32; ++m) {
    Integrand em = Integrand::character({m});
    for (long n = spec.lo; n <= spec.hi; ++n) {
      LevelRef level = LevelRef::group(GroupId::finite_cyclic(n));
      double m_worst = -1.0;
      std::complex<double> worst_value, worst_ref;
      for (const auto& x : sample) {
        std::complex<double> value =
            orbital_integral(system, level, em, x, trunc);
        std::complex<double> expected =
            (m % n == 0) ? em.eval(x) : std::complex<double>{0.0, 0.0};
        double err = std::abs(value - expected);
        if (err > m_worst) {
          m_worst = err;
          worst_value = value;
          worst_ref = expected;
        }
      }
      // point_index carries the frequency m for this scenario.
      push_row(report, m, n, worst_value, worst_ref);
      worst = std::max(worst, m_worst);
    }
  }
  report.pass = worst <= config.tol;
  report.lines.push_back("worst |R_n(e_m) - aliased value| over m <= 32, n in "
                         "[" + std::to_string(spec.lo) + ", " +
                         std::to_string(spec.hi) + "]: " + fmt_short(worst) +
                         " (tol " + fmt_short(config.tol) + ")");
}

// --- ross-stromberg-affine ---------------------------------------------------

void run_affine(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "scale");
  ActionSystem system =
      affine_self_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  std::vector<ScheduleEntry> schedule = chain_schedule(system);
  Integrand f = Integrand::bump_affine({0.2, 0.1}, {0.9, 0.8}, 2);
  const TruncationPolicy trunc = truncation_of(config);
  std::vector<double> references;
  double worst_final = 0.0;
  for (long i = 0; i < config.sample_size; ++i) {
    Point x = system.space.sample(config.seed, static_cast<std::uint64_t>(i));
    Trajectory t = trajectory(system, f, x, schedule, std::nullopt, trunc);
    for (std::size_t l = 0; l < schedule.size(); ++l)
      push_row(report, i, schedule[l].label, t.values[l], t.reference);
    references.push_back(t.reference.real());
    worst_final = std::max(worst_final,
                           std::abs(t.values.back() - t.reference));
  }
  double ref_spread =
      *std::max_element(references.begin(), references.end()) -
      *std::min_element(references.begin(), references.end());
  report.pass = worst_final <= config.tol && ref_spread <= config.tol;
  report.lines.push_back("final-level deviation from the ambient Haar "
                         "integral: " + fmt_short(worst_final) + " (tol " +
                         fmt_short(config.tol) + ")");
  report.lines.push_back(
      "ambient integral spread across base points (right invariance): " +
      fmt_short(ref_spread));
}

// --- proper-action-line ------------------------------------------------------

void run_proper_line(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem system =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  std::vector<ScheduleEntry> schedule = chain_schedule(system);
  Integrand f = Integrand::box_indicator(BorelRegion::interval(0.0, 1.0));
  ConvergenceVerdict verdict = ae_limit_estimate(
      system, f, schedule, static_cast<std::size_t>(config.sample_size),
      config.tol, config.seed, truncation_of(config));
  append_verdict_rows(report, verdict, schedule);
  report.pass = verdict.pass;
  report.lines.push_back("converged fraction at tol " + fmt_short(config.tol) +
                         ": " + fmt_short(verdict.converged_fraction));
  report.lines.push_back("final median deviation: " +
                         fmt_short(verdict.median_deviation.back()));
}

// --- main-equivalence-line ---------------------------------------------------

void run_main_equivalence(const ScenarioConfig& config,
                          ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem system =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  const TruncationPolicy trunc = truncation_of(config);
  IntegrabilityReport cert = integrability_certificate(
      system, system.space.exhaustion, 64, config.seed, trunc);
  Integrand f = Integrand::bump({0.3}, {1.0}, 1);
  std::vector<ScheduleEntry> schedule = chain_schedule(system);
  ConvergenceVerdict verdict = ae_limit_estimate(
      system, f, schedule, static_cast<std::size_t>(config.sample_size),
      config.tol, config.seed, trunc);
  append_verdict_rows(report, verdict, schedule);
  report.pass = cert.pass && verdict.pass;
  report.lines.push_back(std::string("hitting measure finite on the "
                                     "exhaustion cover: ") +
                         (cert.pass ? "yes" : "no"));
  report.lines.push_back("converged fraction at tol " + fmt_short(config.tol) +
                         ": " + fmt_short(verdict.converged_fraction));
}

// --- ratio-local -------------------------------------------------------------

void run_ratio_local(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem system =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  const TruncationPolicy trunc = truncation_of(config);
  const BorelRegion B = BorelRegion::interval(0.0, 1.0);
  Integrand f = Integrand::coordinate_linear({1.0});
  Integrand ind = Integrand::box_indicator(B);
  bool exact_ok = true;

  // Indicator of the window averages to exactly 1 wherever defined.
  for (long i = 0; i < 8; ++i) {
    Point raw = system.space.sample(config.seed, static_cast<std::uint64_t>(i));
    Point x = {raw[0] - std::floor(raw[0])};
    for (const auto& entry : chain_schedule(system)) {
      std::complex<double> one =
          ratio_average(system, entry.level, ind, B, x, trunc);
      if (one != std::complex<double>{1.0, 0.0}) exact_ok = false;
    }
  }

  // Enumeration oracle at the base point of the coarsest level.
  {
    ActionSystem sys2 = line_dyadic_system(2, 2);
    std::complex<double> v =
        ratio_average(sys2, sys2.level(0), f, B, {0.0}, trunc);
    if (std::abs(v - std::complex<double>{0.5, 0.0}) > 1e-15)
      exact_ok = false;
  }

  // Windowed averages approach the conditional mean of f on B.
  const double cond_mean = 0.5;
  double worst_final = 0.0;
  std::vector<ScheduleEntry> schedule = chain_schedule(system);
  for (long i = 0; i < config.sample_size; ++i) {
    Point raw = system.space.sample(config.seed, static_cast<std::uint64_t>(i));
    Point x = {raw[0] - std::floor(raw[0])};
    for (std::size_t l = 0; l < schedule.size(); ++l) {
      std::complex<double> v =
          ratio_average(system, schedule[l].level, f, B, x, trunc);
      push_row(report, i, schedule[l].label, v, {cond_mean, 0.0});
      if (l + 1 == schedule.size())
        worst_final = std::max(worst_final, std::abs(v - cond_mean));
    }
  }
  report.pass = exact_ok && worst_final <= config.tol;
  report.lines.push_back(std::string("ratio average of the window indicator "
                                     "is exactly 1: ") +
                         (exact_ok ? "yes" : "no"));
  report.lines.push_back("worst final deviation from the window mean: " +
                         fmt_short(worst_final) + " (tol " +
                         fmt_short(config.tol) + ")");
}

// --- restricted-E ------------------------------------------------------------

void run_restricted(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem system =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  const TruncationPolicy trunc = truncation_of(config);
  const BorelRegion E = BorelRegion::interval(0.0, 1.0);
  Integrand f = Integrand::coordinate_linear({1.0});
  GroupElement s = line_point({0.0});
  const Point x = {0.0};

  std::complex<double> ambient = restricted_average(
      system, LevelRef::ambient(), f, E, s, Rationality::Rational, x, trunc);
  double worst = std::abs(ambient - std::complex<double>{0.5, 0.0});
  push_row(report, 0, -1, ambient, {0.5, 0.0});

  for (const auto& entry : chain_schedule(system)) {
    std::complex<double> v = restricted_average(
        system, entry.level, f, E, s, Rationality::Rational, x, trunc);
    double expected = 0.5 + std::ldexp(1.0, -static_cast<int>(entry.label) - 1);
    push_row(report, 0, entry.label, v, {expected, 0.0});
    worst = std::max(worst, std::abs(v - expected));
  }
  report.pass = worst <= config.tol;
  report.lines.push_back(
      "worst gap to the window-count oracle (levels) and the windowed "
      "ambient integral: " + fmt_short(worst) + " (tol " +
      fmt_short(config.tol) + ")");
}

// --- rational-E-counterexample -----------------------------------------------

void run_rational_counterexample(const ScenarioConfig& config,
                                 ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem system =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  const TruncationPolicy trunc = truncation_of(config);
  const BorelRegion E = BorelRegion::rational_window(0.0, 1.0);
  Integrand f = Integrand::box_indicator(BorelRegion::interval(0.0, 1.0));
  const Point x = {0.0};
  bool exact_ok = true;

  // Rational shift: the lattice keeps full mass, the ambient side is null.
  GroupElement s0 = line_point({0.0});
  for (const auto& entry : chain_schedule(system)) {
    std::complex<double> lattice_side = restricted_average(
        system, entry.level, f, E, s0, Rationality::Rational, x, trunc);
    std::complex<double> expected{
        1.0 + std::ldexp(1.0, -static_cast<int>(entry.label)), 0.0};
    if (lattice_side != expected) exact_ok = false;
    push_row(report, 0, entry.label, lattice_side, expected);
  }
  std::complex<double> ambient = restricted_average(
      system, LevelRef::ambient(), f, E, s0, Rationality::Rational, x, trunc);
  if (ambient != std::complex<double>{0.0, 0.0}) exact_ok = false;
  push_row(report, 0, -1, ambient, {0.0, 0.0});

  // Irrational shifts kill both sides exactly.
  LevelRef last = chain_schedule(system).back().level;
  for (long i = 0; i < config.sample_size; ++i) {
    Point raw = system.space.sample(config.seed, static_cast<std::uint64_t>(i));
    GroupElement s = line_point({raw[0]});
    std::complex<double> lattice_side = restricted_average(
        system, last, f, E, s, Rationality::Irrational, x, trunc);
    std::complex<double> ambient_side =
        restricted_average(system, LevelRef::ambient(), f, E, s,
                           Rationality::Irrational, x, trunc);
    if (lattice_side != std::complex<double>{0.0, 0.0}) exact_ok = false;
    if (ambient_side != std::complex<double>{0.0, 0.0}) exact_ok = false;
    push_row(report, i + 1, spec.hi, lattice_side, {0.0, 0.0});
  }
  report.pass = exact_ok;
  report.lines.push_back(std::string("lattice side 1 + 2^-n and null "
                                     "ambient side, exact: ") +
                         (exact_ok ? "yes" : "no"));
}

// --- product-GxX --------------------------------------------------------------

void run_product(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem line_sys =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  const TruncationPolicy trunc = truncation_of(config);
  bool ok = true;

  // Group-side window indicator, trivial space factor.
  ProductIntegrand f1{Integrand::constant(1.0, 1),
                      Integrand::box_indicator(BorelRegion::interval(0.0, 1.0))};
  GroupElement s0 = line_point({0.0});
  for (const auto& entry : chain_schedule(line_sys)) {
    std::complex<double> v =
        product_average(line_sys, entry.level, f1, s0, {0.0}, trunc);
    std::complex<double> expected{
        1.0 + std::ldexp(1.0, -static_cast<int>(entry.label)), 0.0};
    if (std::abs(v - expected) > config.tol) ok = false;
    push_row(report, 0, entry.label, v, expected);
  }

  // Character in both factors on the circle: the group sum kills it.
  ActionSystem torus_sys = torus_dyadic_system(2, 2);
  ProductIntegrand f2{Integrand::character({1}), Integrand::character({1})};
  GroupElement st = torus_point({0.0});
  Point x = torus_sys.space.sample(config.seed, 0);
  std::complex<double> v2 =
      product_average(torus_sys, torus_sys.level(0), f2, st, x, trunc);
  if (std::abs(v2) > config.tol) ok = false;
  push_row(report, 1, 4, v2, {0.0, 0.0});

  report.pass = ok;
  report.lines.push_back(std::string("window-count and orthogonality "
                                     "oracles hold: ") +
                         (ok ? "yes" : "no"));
}

// --- civin-lattice-2d ----------------------------------------------------------

void run_civin(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  ActionSystem system =
      plane_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  const BorelRegion D =
      BorelRegion::half_open_box({0.0, 0.0}, {1.0, 1.0});
  bool ok = true;

  // Exact counts over the unit fundamental domain.
  for (const auto& entry : chain_schedule(system)) {
    long count = lattice_domain_count(system, entry.level, D);
    long expected = 1L << (2 * entry.label);
    if (count != expected) ok = false;
    push_row(report, 0, entry.label, {static_cast<double>(count), 0.0},
             {static_cast<double>(expected), 0.0});
  }

  const LevelRef last = chain_schedule(system).back().level;
  const long bits = spec.hi;
  const long resonant = 1L << bits;
  Point x = system.space.sample(config.seed, 0);

  // Bandlimited average equals the space integral.
  Integrand generic = Integrand::trig_poly(
      {{{0, 0}, {0.7, 0.0}}, {{3, 1}, {1.0, 0.0}}, {{-2, 5}, {0.0, 0.5}}});
  std::complex<double> vg = lattice_average(system, last, generic, D, x);
  if (std::abs(vg - std::complex<double>{0.7, 0.0}) > config.tol) ok = false;
  push_row(report, 1, spec.hi, vg, {0.7, 0.0});

  // Resonant frequency aliases to its character value at the base point.
  Integrand aliased = Integrand::trig_poly(
      {{{0, 0}, {0.7, 0.0}}, {{resonant, 0}, {0.25, 0.0}}});
  std::complex<double> va = lattice_average(system, last, aliased, D, x);
  std::complex<double> expected_alias =
      std::complex<double>{0.7, 0.0} +
      0.25 * unit_phase(static_cast<long double>(resonant) *
                        static_cast<long double>(x[0]));
  if (std::abs(va - expected_alias) > config.tol) ok = false;
  push_row(report, 2, spec.hi, va, expected_alias);

  // The average does not depend on the fundamental domain.
  const BorelRegion D2 =
      BorelRegion::half_open_box({0.3, -0.2}, {1.3, 0.8});
  std::complex<double> vshift = lattice_average(system, last, generic, D2, x);
  if (std::abs(vshift - vg) > config.tol) ok = false;
  push_row(report, 3, spec.hi, vshift, vg);

  // Reduction into the domain picks the unique integer translate.
  FundamentalReduction red =
      fundamental_reduce(system.chain, line_point({2.25, -0.5}), D);
  bool red_ok = red.gt.coords[0] == 0.25 && red.gt.coords[1] == 0.5 &&
                D.contains(red.gt.coords);
  if (!red_ok) ok = false;

  report.pass = ok;
  report.lines.push_back(std::string("counts 4^n, aliasing and domain-shift "
                                     "independence: ") +
                         (ok ? "yes" : "no"));
}

// --- exchangeable-lln -----------------------------------------------------------

void run_exchangeable(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "sym");
  if (spec.lo < 1 || spec.hi > 16)
    throw ConfigError("exchangeable-lln: exponents must lie in [1, 16]");
  std::vector<long> degrees;
  for (long k = spec.lo; k <= spec.hi; ++k) degrees.push_back(1L << k);
  const double p = 0.3;
  ActionSystem system = cylinder_sym_system(degrees, p);
  Integrand f = Integrand::coordinate_linear({1.0});

  std::vector<Point> sample;
  for (long i = 0; i < config.sample_size; ++i)
    sample.push_back(system.space.sample(config.seed,
                                         static_cast<std::uint64_t>(i)));
  MartingaleReport mart = reversed_martingale_check(
      system, f, sample, 0, system.chain.depth() - 1, config.tol);

  // Final-level empirical means: how many fall within four standard errors.
  const long n_final = degrees.back();
  const double se =
      std::sqrt(p * (1.0 - p) / static_cast<double>(n_final));
  const BorelRegion region = BorelRegion::all(system.space.dim);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    std::vector<std::complex<double>> values;
    for (long n : degrees) {
      OrbitPartition pn = OrbitPartition::orbit_sigma_field(
          system, GroupId::sym_finite(n), region);
      values.push_back(orbit_conditional_expectation(pn, f, sample[i]));
    }
    for (std::size_t l = 0; l < degrees.size(); ++l)
      push_row(report, static_cast<long>(i), degrees[l], values[l],
               {p, 0.0});
    covered += std::abs(values.back().real() - p) <= 4.0 * se;
  }
  const double coverage =
      static_cast<double>(covered) / static_cast<double>(sample.size());
  report.pass = mart.tower_residual <= config.tol && coverage >= 0.99;
  report.lines.push_back("tower residual: " + fmt_short(mart.tower_residual) +
                         " (tol " + fmt_short(config.tol) + ")");
  report.lines.push_back("fraction of samples within 4 standard errors (" +
                         fmt_short(4.0 * se) + ") of " + fmt_short(p) +
                         " at degree " + std::to_string(n_final) + ": " +
                         fmt_short(coverage));
}

// --- maximal-audit ----------------------------------------------------------------

void run_maximal_audit(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  const TruncationPolicy trunc = truncation_of(config);
  const std::vector<double> alphas = {0.25, 0.5, 1.0, 2.0, 4.0};
  const std::size_t grid = 2048;
  bool ok = true;
  long instance = 0;

  auto audit_and_log = [&](const ActionSystem& system, const Integrand& f,
                           const BorelRegion& Xk, double ck,
                           std::size_t level_cap) {
    MaximalAuditReport audit =
        maximal_inequality_audit(system, f, Xk, ck, alphas, level_cap, trunc,
                                 config.tol, grid);
    for (std::size_t a = 0; a < audit.rows.size(); ++a)
      push_row(report, instance, static_cast<long>(a),
               {audit.rows[a].lhs, 0.0}, {audit.rows[a].rhs, 0.0});
    ok = ok && audit.pass;
    ++instance;
  };

  ActionSystem line_sys =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  BorelRegion xk_line = BorelRegion::interval(-1.0, 1.0);
  audit_and_log(line_sys, Integrand::box_indicator(
                              BorelRegion::interval(0.0, 1.0)),
                xk_line, 1.5, line_sys.chain.depth());
  audit_and_log(line_sys, Integrand::power_singularity(0.75), xk_line, 1.5,
                line_sys.chain.depth());

  ActionSystem torus_sys = torus_dyadic_system(0, static_cast<int>(spec.hi));
  BorelRegion xk_torus = BorelRegion::half_open_interval(0.0, 1.0);
  audit_and_log(torus_sys, Integrand::box_indicator(
                               BorelRegion::interval(0.0, 1.0)),
                xk_torus, 1.0, torus_sys.chain.depth());
  audit_and_log(torus_sys, Integrand::power_singularity(0.75), xk_torus, 1.0,
                torus_sys.chain.depth());

  report.pass = ok;
  report.lines.push_back(std::string("weak-type audit on line and circle, "
                                     "indicator and power integrands: ") +
                         (ok ? "pass" : "fail"));
}

// --- fell-and-mc --------------------------------------------------------------------

void run_fell_mc(const ScenarioConfig& config, ScenarioReport& report) {
  ScheduleSpec spec = schedule_of(config, "dyadic");
  const TruncationPolicy trunc = truncation_of(config);

  ActionSystem line_sys =
      line_dyadic_system(static_cast<int>(spec.lo), static_cast<int>(spec.hi));
  std::vector<TestFunction> panel =
      default_test_panel(line_sys.chain.ambient);
  FellReport fell = fell_convergence_report(
      line_sys.chain, 0, line_sys.chain.depth() - 1, panel, trunc, config.tol);
  std::vector<ScheduleEntry> schedule = chain_schedule(line_sys);
  for (std::size_t j = 0; j < panel.size(); ++j) {
    double ref =
        haar_integral(line_sys.chain, std::nullopt, panel[j], {}, trunc);
    for (std::size_t l = 0; l < line_sys.chain.depth(); ++l) {
      double v = haar_integral(line_sys.chain, l, panel[j], {}, trunc);
      push_row(report, static_cast<long>(j), schedule[l].label, {v, 0.0},
               {ref, 0.0});
    }
  }

  RightInvarianceReport ri = haar_right_invariance_report(
      line_sys.chain, std::optional<std::size_t>{line_sys.chain.depth() / 2},
      default_translators(line_sys.chain,
                          line_sys.chain.level(line_sys.chain.depth() / 2),
                          trunc),
      panel, trunc, config.tol);

  ActionSystem affine_sys = affine_self_system(0, 3);
  ModularConditionReport mc = modular_condition_report(
      affine_sys.chain, 3, default_test_panel(affine_sys.chain.ambient), trunc,
      config.tol);

  report.pass = fell.pass && ri.pass && mc.pass;
  report.lines.push_back("level-to-ambient Haar deviation at the deepest "
                         "level: " + fmt_short(fell.final_max) + " (tol " +
                         fmt_short(config.tol) + ")");
  report.lines.push_back("right-invariance residual: " +
                         fmt_short(ri.max_residual));
  report.lines.push_back("modular-weighted left-invariance residual at scale "
                         "resolution 3: " + fmt_short(mc.max_residual));
}

// --- registry -----------------------------------------------------------------------

ScenarioConfig make_defaults(const std::string& levels, long sample_size,
                             double tol) {
  ScenarioConfig d;
  d.levels = levels;
  d.sample_size = sample_size;
  d.tol = tol;
  return d;
}

struct Entry {
  ScenarioInfo info;
  ScenarioFn fn;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      {{"civin-lattice-2d",
        "Planar dyadic lattice averages over a fundamental domain match the "
        "torus integral, with exact aliasing on resonant frequencies.",
        make_defaults("dyadic:0..8", 1, 1e-12)},
       run_civin},
      {{"exchangeable-lln",
        "Permutation-invariant conditional means of Bernoulli words form a "
        "reversed martingale converging to the success probability.",
        make_defaults("sym:1..8", 1000, 1e-10)},
       run_exchangeable},
      {{"fell-and-mc",
        "Level Haar normalizations converge to the ambient Haar integral and "
        "restrict the modular function correctly.",
        make_defaults("dyadic:1..12", 1, 1e-4)},
       run_fell_mc},
      {{"jessen-dyadic",
        "Dyadic Riemann sums of an integrable power singularity settle onto "
        "its integral at almost every sampled point.",
        make_defaults("dyadic:0..14", 1000,
                      calibration::kJessenFinalMedianBound)},
       run_jessen},
      {{"main-equivalence-line",
        "Finite hitting measure on an exhausting cover and pointwise "
        "convergence of dyadic orbit averages hold together on the line.",
        make_defaults("dyadic:1..12", 200, 1e-3)},
       run_main_equivalence},
      {{"maximal-audit",
        "Weak-type maximal inequality audited on a shared evaluation grid "
        "for indicator and power integrands.",
        make_defaults("dyadic:1..12", 1, 1e-3)},
       run_maximal_audit},
      {{"product-GxX",
        "Orbit averages of two-variable integrands on group-cross-space "
        "match window counts and character orthogonality.",
        make_defaults("dyadic:1..10", 1, 1e-12)},
       run_product},
      {{"proper-action-line",
        "Dyadic translates of a window indicator average toward its "
        "Lebesgue integral at every sampled point.",
        make_defaults("dyadic:1..12", 100, 1e-3)},
       run_proper_line},
      {{"ratio-local",
        "Hitting-normalized local averages over a window converge to the "
        "window's conditional mean.",
        make_defaults("dyadic:1..10", 50, 1e-3)},
       run_ratio_local},
      {{"rational-E-counterexample",
        "Restriction to the rationals separates the discrete and ambient "
        "sides: the dyadic sums keep full mass while the integral vanishes.",
        make_defaults("dyadic:1..12", 100, 0.0)},
       run_rational_counterexample},
      {{"restricted-E",
        "Orbit sums restricted to a translated window converge to the "
        "windowed ambient integral.",
        make_defaults("dyadic:1..10", 1, 1e-9)},
       run_restricted},
      {{"riemann-exact-characters",
        "Equispaced averages of circle characters are exactly their aliased "
        "values.",
        make_defaults("all:1..32", 100, 1e-12)},
       run_characters},
      {{"ross-stromberg-affine",
        "Left-translation orbit averages on the positive affine group "
        "converge to the right Haar integral, independently of the base "
        "point.",
        make_defaults("scale:0..6", 2, 1e-3)},
       run_affine},
      {{"ursell-divergence",
        "Full-sequence averages of a power singularity show running-max "
        "growth consistent with a.e. divergence.",
        make_defaults("all:1..10000", 200, 0.0)},
       run_ursell},
  };
  return table;
}

void finish_defaults(ScenarioConfig& config, const ScenarioConfig& defaults) {
  if (config.levels.empty()) config.levels = defaults.levels;
  if (config.sample_size == 0) config.sample_size = defaults.sample_size;
  if (config.tol == 0.0) config.tol = defaults.tol;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  out << text;
}

std::string plot_script_text(const ScenarioReport& report) {
  std::ostringstream out;
  out << "# gnuplot script for " << report.config.scenario << "\n";
  out << "set datafile separator ','\n";
  out << "set key off\n";
  out << "set logscale y\n";
  out << "set xlabel 'level'\n";
  out << "set ylabel 'absolute error'\n";
  out << "plot '" << report.config.scenario
      << ".csv' every ::1 using 3:($8 > 0 ? $8 : NaN) with points pt 7 ps "
         "0.4\n";
  return out.str();
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_registry() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

std::string scenario_csv_text(const std::string& name,
                              const std::vector<ScenarioRow>& rows) {
  std::ostringstream out;
  out << "scenario,point_index,level,value_re,value_im,reference_re,"
         "reference_im,abs_error\n";
  for (const auto& r : rows) {
    out << name << ',' << r.point_index << ',' << r.level << ','
        << fmt(r.value.real()) << ',' << fmt(r.value.imag()) << ','
        << fmt(r.reference.real()) << ',' << fmt(r.reference.imag()) << ','
        << fmt(r.abs_error) << '\n';
  }
  return out.str();
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  const Entry* entry = nullptr;
  for (const auto& e : entries())
    if (e.info.name == config.scenario) entry = &e;
  if (!entry)
    throw ConfigError("unknown scenario '" + config.scenario + "'");

  ScenarioReport report;
  report.config = config;
  finish_defaults(report.config, entry->info.defaults);

  const auto t0 = std::chrono::steady_clock::now();
  entry->fn(report.config, report);
  const auto t1 = std::chrono::steady_clock::now();
  report.wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  for (const auto& r : report.rows)
    if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()) ||
        !std::isfinite(r.abs_error))
      throw NumericalFailure("scenario " + report.config.scenario +
                             " produced a non-finite value");

  namespace fs = std::filesystem;
  fs::create_directories(report.config.out_dir);
  const std::string base =
      (fs::path(report.config.out_dir) / report.config.scenario).string();
  report.csv_path = base + ".csv";
  write_text_file(report.csv_path,
                  scenario_csv_text(report.config.scenario, report.rows));

  nlohmann::json summary;
  summary["scenario"] = report.config.scenario;
  summary["pass"] = report.pass;
  summary["wall_ms"] = report.wall_ms;
  summary["lines"] = report.lines;
  summary["rows"] = report.rows.size();
  summary["config"] = {
      {"scenario", report.config.scenario},
      {"levels", report.config.levels},
      {"sample_size", report.config.sample_size},
      {"seed", report.config.seed},
      {"tol", report.config.tol},
      {"window", report.config.window},
      {"out_dir", report.config.out_dir},
      {"emit_plot_script", report.config.emit_plot_script},
  };
  report.json_path = base + ".json";
  write_text_file(report.json_path, summary.dump(2) + "\n");

  if (report.config.emit_plot_script) {
    report.plot_path = base + ".plot.gp";
    write_text_file(report.plot_path, plot_script_text(report));
  }
  return report;
}

}  // namespace orbint
