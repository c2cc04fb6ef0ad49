#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "orbint/groups.hpp"
#include "orbint/integrands.hpp"
#include "orbint/spaces.hpp"
#include "orbint/truncation.hpp"

namespace orbint {

/// How the chain's ambient group moves points of the space.
enum class ActionKind {
  TorusTranslate,   // Torus(d) or its finite levels translating Torus(d)
  LineTranslate,    // RealLine(d) translating RealLine(d)
  PlaneOnTorus2,    // RealLine(2) translating Torus(2) modulo Z^2
  AffineLeftSelf,   // Affine acting on itself by left multiplication
  AffineOnLine,     // (a,b) sending x to a*x + b; the negative control
  SymOnCylinder,    // permutations of coordinates of {0,1} words
};

/// Refers to one of a chain's levels, an ad-hoc subgroup of its ambient
/// group (schedules that sweep every n use these), or the ambient group.
struct LevelRef {
  std::optional<GroupId> id;  // nullopt = ambient
  static LevelRef ambient() { return LevelRef{}; }
  static LevelRef group(const GroupId& g) { return LevelRef{g}; }
  bool is_ambient() const { return !id.has_value(); }
};

/// A measured space together with the chain that acts on it.
struct ActionSystem {
  GroupChain chain;
  MeasuredSpace space;
  ActionKind kind = ActionKind::TorusTranslate;
  bool invariance_checked = false;
  /// Normalize counting-measure levels (finite permutation groups) to
  /// probability weights in orbit averages.
  bool probability_levels = false;

  /// Resolves a chain level index to a LevelRef.
  LevelRef level(std::size_t i) const { return LevelRef::group(chain.level(i)); }
};

/// Applies the action of g to x.
Point act(const ActionSystem& system, const GroupElement& g, const Point& x);

/// Numerical certificate that the measure transforms under the action with
/// the modular factor: integral of f(sx) dmu(x) = modular(s) * integral of
/// f dmu, for every sampled s and panel function f.
struct InvarianceReport {
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::vector<double> residuals;
};
InvarianceReport relative_invariance_report(
    const ActionSystem& system, const std::vector<GroupElement>& sample_elems,
    const std::vector<Integrand>& panel, double tol,
    std::size_t cells_per_axis = 1u << 10);

/// Joint integrand on X x G used by the two-variable identities. The group
/// argument is evaluated through the group's natural chart (coordinates for
/// torus/line levels, (u, b) = (ln a, b) for affine elements).
struct ProductIntegrand {
  Integrand space_part;
  Integrand group_part;
  std::complex<double> eval(const Point& x, const GroupElement& t) const;
};

/// Evaluates, by independent quadratures, the three integrals
///   I1 = int f(tx, t) dmu(x) drho(t)
///   I2 = int f(x, t)  dmu(x) dlambda(t)    (lambda = modular * rho)
///   I3 = int f(x, t^{-1}) dmu(x) drho(t)
/// and reports their pairwise gaps. `resolution` is the total cell count of
/// each 2-D integration grid (split per axis).
struct CrucialIdentityReport {
  double i1 = 0.0, i2 = 0.0, i3 = 0.0;
  double max_pairwise_gap = 0.0;
  double tol = 0.0;
  bool pass = false;
};
CrucialIdentityReport crucial_identity_report(const ActionSystem& system,
                                              const ProductIntegrand& f,
                                              const LevelRef& level,
                                              const TruncationPolicy& trunc,
                                              std::size_t resolution,
                                              double tol);

/// Measure of {t in level : tx lands in B}. Finite by exact counting or
/// exact slice measures where the geometry allows it; otherwise evaluated
/// on a truncation window, with divergence detected by window doubling
/// (growth ratio above 1 + trunc.doubling_tol across two doublings).
struct HittingValue {
  double value = 0.0;
  bool infinite = false;
};
HittingValue hitting_measure(const ActionSystem& system, const LevelRef& level,
                             const BorelRegion& B, const Point& x,
                             const TruncationPolicy& trunc);

/// Per-point bound certificate: the largest hitting value of region k seen
/// over a level range, for validating declared bounds.
struct HittingBound {
  std::size_t region_index = 0;
  double bound = 0.0;
  bool per_level = true;  // false: ambient-scope bound
};

/// Samples mu-distributed points and checks that the ambient hitting
/// measure of every cover region is finite. The a.e. statement is
/// certified on the seeded sample, never proved.
struct IntegrabilityReport {
  std::vector<double> finite_fraction;  // per cover region
  bool pass = false;
};
IntegrabilityReport integrability_certificate(const ActionSystem& system,
                                              const std::vector<BorelRegion>& cover,
                                              std::size_t sample_size,
                                              std::uint64_t seed,
                                              const TruncationPolicy& trunc);

}  // namespace orbint
