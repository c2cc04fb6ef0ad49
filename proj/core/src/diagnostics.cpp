#include "orbint/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "orbint/parallel.hpp"
#include "orbint/quadrature.hpp"

namespace orbint {
namespace {

constexpr double kGoldenOffset = 0.6180339887498949;

double quantile(std::vector<double> v, std::size_t num, std::size_t den) {
  // Deterministic index quantile: element at floor(num*(N-1)/den).
  std::size_t idx = (num * (v.size() - 1)) / den;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(idx), v.end());
  return v[idx];
}

}  // namespace

ConvergenceVerdict ae_limit_estimate(
    const ActionSystem& system, const Integrand& f,
    const std::vector<ScheduleEntry>& levels, std::size_t sample_size,
    double tol, std::uint64_t seed, const TruncationPolicy& trunc,
    std::optional<std::complex<double>> reference, double fail_quota,
    SingularPolicy singular) {
  if (levels.empty()) throw OrbintError("ae_limit_estimate: empty schedule");
  if (sample_size == 0) throw OrbintError("ae_limit_estimate: empty sample");

  struct Row {
    Point x;
    std::vector<std::complex<double>> values;
    std::complex<double> reference;
    std::vector<double> deviations;
    bool converged = false;
  };
  auto rows = parallel_map<Row>(sample_size, [&](std::size_t i) {
    Point x = system.space.sample(seed, i);
    Trajectory t =
        trajectory(system, f, x, levels, reference, trunc, singular);
    Row row;
    row.x = std::move(x);
    row.values = std::move(t.values);
    row.reference = t.reference;
    row.deviations.reserve(row.values.size());
    for (const auto& v : row.values)
      row.deviations.push_back(std::abs(v - row.reference));
    row.converged = row.deviations.back() <= tol;
    return row;
  });

  ConvergenceVerdict verdict;
  verdict.sample_size = sample_size;
  std::size_t converged = 0;
  for (const auto& r : rows) converged += r.converged;
  verdict.converged_fraction =
      static_cast<double>(converged) / static_cast<double>(sample_size);
  verdict.deviations.reserve(sample_size);
  for (auto& r : rows) {
    verdict.deviations.push_back(std::move(r.deviations));
    verdict.values.push_back(std::move(r.values));
    verdict.references.push_back(r.reference);
    verdict.points.push_back(std::move(r.x));
  }
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::vector<double> col(sample_size);
    for (std::size_t i = 0; i < sample_size; ++i)
      col[i] = verdict.deviations[i][l];
    verdict.median_deviation.push_back(quantile(col, 1, 2));
    verdict.p95_deviation.push_back(quantile(col, 95, 100));
  }
  verdict.pass = verdict.converged_fraction >= 1.0 - fail_quota;
  return verdict;
}

DivergenceReport divergence_gap(const ActionSystem& system, const Integrand& f,
                                long n_max, const std::vector<Point>& x_sample,
                                double reference, double multiple,
                                double fraction, SingularPolicy singular) {
  if (n_max < 1) throw OrbintError("divergence_gap: n_max must be positive");
  if (x_sample.empty()) throw OrbintError("divergence_gap: empty sample");
  if (!f.is_real())
    throw OrbintError("divergence_gap: integrand must be nonnegative real");

  DivergenceReport report;
  for (long c = 10; c < n_max; c *= 10) report.checkpoints.push_back(c);
  report.checkpoints.push_back(n_max);
  report.reference = reference;
  report.flag_threshold = multiple * reference;

  const bool fast_power = f.kind() == Integrand::Kind::PowerSingularity &&
                          system.kind == ActionKind::TorusTranslate &&
                          system.space.dim == 1;
  const double delta = fast_power ? f.power_delta() : 0.0;
  const double kernel_mass = fast_power ? 1.0 / (1.0 - delta) : 0.0;
  const TruncationPolicy trunc;

  report.running_max = parallel_map<std::vector<double>>(
      x_sample.size(), [&](std::size_t i) {
        const Point& x = x_sample[i];
        std::vector<double> maxima;
        maxima.reserve(report.checkpoints.size());
        double running = -std::numeric_limits<double>::infinity();
        std::size_t next = 0;
        for (long n = 1; n <= n_max; ++n) {
          bool settled = false;
          if (fast_power && singular == SingularPolicy::Skip) {
            // The level-n nodes form the progression frac(n x)/n + k/n, and
            // for a decreasing kernel the average is at most
            // g(smallest node)/n + integral of g over (0,1]. Levels whose
            // ceiling stays under the running maximum cannot move it, so the
            // O(n) sum is skipped for them. The slack absorbs rounding in
            // both the ceiling and the skipped sum.
            const double xn = x[0] * static_cast<double>(n);
            const double r = (xn - std::floor(xn)) / static_cast<double>(n);
            settled = r > 0.0 &&
                      std::pow(r, -delta) / static_cast<double>(n) +
                              kernel_mass + 1e-6 <
                          running;
          }
          if (!settled) {
            double v;
            if (fast_power) {
              v = power_riemann_sum(x[0], n, delta, singular);
            } else {
              v = orbital_integral(
                      system, LevelRef::group(GroupId::finite_cyclic(n)), f, x,
                      trunc, singular)
                      .real();
            }
            running = std::max(running, v);
          }
          if (n == report.checkpoints[next]) {
            maxima.push_back(running);
            ++next;
          }
        }
        return maxima;
      });

  std::size_t flagged = 0;
  report.growth_ratio.reserve(x_sample.size());
  for (const auto& maxima : report.running_max) {
    report.growth_ratio.push_back(maxima.front() > 0.0
                                      ? maxima.back() / maxima.front()
                                      : 0.0);
    flagged += maxima.back() > report.flag_threshold;
  }
  report.flagged_fraction =
      static_cast<double>(flagged) / static_cast<double>(x_sample.size());
  report.flag = report.flagged_fraction >= fraction;
  report.verdict = report.flag ? "consistent with a.e. divergence"
                               : "no divergence evidence";
  return report;
}

MaximalAuditReport maximal_inequality_audit(
    const ActionSystem& system, const Integrand& f, const BorelRegion& Xk,
    double ck, const std::vector<double>& alphas, std::size_t level_cap,
    const TruncationPolicy& trunc, double tol, std::size_t grid_cells,
    SingularPolicy singular,
    std::function<double(const Point&, double)> fstar_override) {
  if (system.space.dim != 1)
    throw UnsupportedLevel("maximal_inequality_audit: one-dimensional spaces");
  if (grid_cells == 0)
    throw OrbintError("maximal_inequality_audit: zero grid cells");
  if (!f.is_real())
    throw OrbintError("maximal_inequality_audit: integrand must be real");

  // Grid window: cover X_k and the support of f so both Q_alpha sides see
  // every point that can contribute.
  double lo, hi;
  if (system.space.domain == SpaceDomain::Torus) {
    lo = 0.0;
    hi = 1.0;
  } else {
    Xk.bounding(0, &lo, &hi);
    if (f.support()) {
      double slo, shi;
      f.support()->bounding(0, &slo, &shi);
      lo = std::min(lo, slo);
      hi = std::max(hi, shi);
    }
  }
  const double h = (hi - lo) / static_cast<double>(grid_cells);

  struct Node {
    double x = 0.0;
    double fstar = 0.0;
    double fval = 0.0;
    bool in_xk = false;
  };
  auto nodes = parallel_map<Node>(grid_cells, [&](std::size_t i) {
    Node node;
    node.x = lo + (static_cast<double>(i) + kGoldenOffset) * h;
    Point p = {node.x};
    node.fstar = maximal_function(system, f, p, level_cap, trunc, singular);
    if (fstar_override) node.fstar = fstar_override(p, node.fstar);
    node.fval = f.real_eval(p);
    node.in_xk = Xk.contains1(node.x);
    return node;
  });

  MaximalAuditReport report;
  report.tol = tol;
  report.grid_points = grid_cells;
  report.pass = true;
  for (double alpha : alphas) {
    MaximalAuditRow row;
    row.alpha = alpha;
    KahanSum<double> lhs_measure, rhs_integral;
    for (const auto& node : nodes) {
      if (node.fstar <= alpha) continue;
      if (node.in_xk) lhs_measure.add(h);
      rhs_integral.add(node.fval * h);
    }
    row.lhs = alpha * lhs_measure.value();
    row.rhs = ck * rhs_integral.value();
    row.pass = row.lhs <= row.rhs * (1.0 + tol);
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace orbint
