#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "orbint/actions.hpp"
#include "orbint/integrands.hpp"
#include "orbint/truncation.hpp"

namespace orbint {

/// Orbit average of f at one level: the atom-weighted sum of f(tx) over the
/// level's Haar atoms (with midpoint quadrature in continuous factors).
/// On the torus with a cyclic level this is literally the equispaced
/// Riemann sum (1/n) sum_j f(x + j/n).
std::complex<double> orbital_integral(const ActionSystem& system,
                                      const LevelRef& level, const Integrand& f,
                                      const Point& x,
                                      const TruncationPolicy& trunc,
                                      SingularPolicy singular = SingularPolicy::Error);

/// Same against the ambient group's right Haar measure. For group-as-space
/// systems the result is independent of x by right invariance.
std::complex<double> ambient_orbital_integral(
    const ActionSystem& system, const Integrand& f, const Point& x,
    const TruncationPolicy& trunc,
    SingularPolicy singular = SingularPolicy::Error);

/// Local ratio average: the B-restricted orbit sum divided by the measure
/// of {t : tx in B}. Equals 1 exactly when f is the indicator of B.
std::complex<double> ratio_average(const ActionSystem& system,
                                   const LevelRef& level, const Integrand& f,
                                   const BorelRegion& B, const Point& x,
                                   const TruncationPolicy& trunc);

/// Orbit sum restricted to translated windows Es of the acting group; E may
/// be a rational window, whose membership respects declared rationality.
std::complex<double> restricted_average(const ActionSystem& system,
                                        const LevelRef& level,
                                        const Integrand& f,
                                        const BorelRegion& E,
                                        const GroupElement& s,
                                        Rationality s_class, const Point& x,
                                        const TruncationPolicy& trunc);

/// sup over the first `level_cap` chain levels of the orbital integral of a
/// nonnegative integrand.
double maximal_function(const ActionSystem& system, const Integrand& f,
                        const Point& x, std::size_t level_cap,
                        const TruncationPolicy& trunc,
                        SingularPolicy singular = SingularPolicy::Error);

/// The unique g in the chain's first level with (g compose t) inside the
/// fundamental domain D (half-open box convention).
struct FundamentalReduction {
  GroupElement g;
  GroupElement gt;
};
FundamentalReduction fundamental_reduce(const GroupChain& chain,
                                        const GroupElement& t,
                                        const BorelRegion& D);

/// Equal-weight average of f(tx) over the finite set (level cap D). The
/// integrand must pass a spot check of invariance under the chain's first
/// level.
std::complex<double> lattice_average(const ActionSystem& system,
                                     const LevelRef& level, const Integrand& f,
                                     const BorelRegion& D, const Point& x,
                                     double invariance_tol = 1e-9);

/// Number of level atoms inside D (exact count).
long lattice_domain_count(const ActionSystem& system, const LevelRef& level,
                          const BorelRegion& D);

/// Orbit sum of t -> f(ts, tx) for a product integrand on G x X.
std::complex<double> product_average(const ActionSystem& system,
                                     const LevelRef& level,
                                     const ProductIntegrand& f,
                                     const GroupElement& s, const Point& x,
                                     const TruncationPolicy& trunc);

/// One row of a level schedule: the display label n and the level it
/// resolves to.
struct ScheduleEntry {
  long label = 0;
  LevelRef level;
};

/// Orbit averages of one point across a level schedule, with a reference
/// value and suffix-max tail deviations.
struct Trajectory {
  Point x;
  std::vector<long> labels;
  std::vector<std::complex<double>> values;
  std::complex<double> reference{0.0, 0.0};
  bool reference_is_ambient = false;
  std::vector<double> tail_deviation;  // sup over i >= N of |values[i] - reference|
};
Trajectory trajectory(const ActionSystem& system, const Integrand& f,
                      const Point& x, const std::vector<ScheduleEntry>& schedule,
                      std::optional<std::complex<double>> reference,
                      const TruncationPolicy& trunc,
                      SingularPolicy singular = SingularPolicy::Error);

/// Equispaced Riemann sum of the power kernel y^(-delta) on the unit torus,
/// vectorizable and branch-free on the hot path; singular hits surface as
/// non-finite sums and are re-classified by a guarded scalar pass.
double power_riemann_sum(double x, long n, double delta,
                         SingularPolicy singular);

}  // namespace orbint
