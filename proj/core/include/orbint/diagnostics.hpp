#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orbint/averaging.hpp"

namespace orbint {

/// Sample-based convergence verdict: how many seeded points have their
/// final-level value within tol of the reference, plus per-level deviation
/// quantiles. A pass never claims more than "converged on this sample".
struct ConvergenceVerdict {
  std::size_t sample_size = 0;
  double converged_fraction = 0.0;
  std::vector<double> median_deviation;  // per schedule entry
  std::vector<double> p95_deviation;     // per schedule entry
  std::vector<std::vector<double>> deviations;  // [point][schedule entry]
  std::vector<std::vector<std::complex<double>>> values;  // [point][entry]
  std::vector<std::complex<double>> references;           // [point]
  std::vector<Point> points;                              // [point]
  bool pass = false;
};

/// Runs trajectories at `sample_size` seeded mu-sample points and compares
/// each level value against the reference (explicit, or the ambient orbit
/// integral when absent). pass iff the fraction of points whose final-level
/// deviation is <= tol reaches 1 - fail_quota. Deterministic for fixed
/// (seed, config) at any thread count.
ConvergenceVerdict ae_limit_estimate(
    const ActionSystem& system, const Integrand& f,
    const std::vector<ScheduleEntry>& levels, std::size_t sample_size,
    double tol, std::uint64_t seed, const TruncationPolicy& trunc,
    std::optional<std::complex<double>> reference = std::nullopt,
    double fail_quota = 0.0,
    SingularPolicy singular = SingularPolicy::Error);

/// Running-max growth evidence along the full schedule n = 1..n_max,
/// reported at geometrically spaced checkpoints. The flag is raised when
/// the running max at the last checkpoint exceeds multiple*reference at at
/// least `fraction` of the sample points. The verdict string never claims
/// divergence, only evidence consistent with it.
struct DivergenceReport {
  std::vector<long> checkpoints;
  std::vector<std::vector<double>> running_max;  // [point][checkpoint]
  std::vector<double> growth_ratio;              // per point, last/first
  double reference = 0.0;
  double flag_threshold = 0.0;
  double flagged_fraction = 0.0;
  bool flag = false;
  std::string verdict;
};
DivergenceReport divergence_gap(const ActionSystem& system, const Integrand& f,
                                long n_max, const std::vector<Point>& x_sample,
                                double reference, double multiple,
                                double fraction,
                                SingularPolicy singular = SingularPolicy::Skip);

/// One tested threshold of the weak-type audit.
struct MaximalAuditRow {
  double alpha = 0.0;
  double lhs = 0.0;  // alpha * mu(Q_alpha intersect X_k)
  double rhs = 0.0;  // c_k * integral of f over Q_alpha
  bool pass = false;
};

/// Grid audit of alpha*mu({f* > alpha} cap X_k) <= c_k * int_{f* > alpha} f.
/// Both sides are evaluated on the same golden-offset grid covering X_k and
/// the support of f, so set-membership discretization cancels. The
/// fstar_override hook exists for soundness tests that corrupt f*.
struct MaximalAuditReport {
  std::vector<MaximalAuditRow> rows;
  double tol = 0.0;
  std::size_t grid_points = 0;
  bool pass = false;
};
MaximalAuditReport maximal_inequality_audit(
    const ActionSystem& system, const Integrand& f, const BorelRegion& Xk,
    double ck, const std::vector<double>& alphas, std::size_t level_cap,
    const TruncationPolicy& trunc, double tol, std::size_t grid_cells,
    SingularPolicy singular = SingularPolicy::Error,
    std::function<double(const Point&, double)> fstar_override = nullptr);

}  // namespace orbint
