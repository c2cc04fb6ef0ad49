#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "orbint/integrands.hpp"
#include "orbint/point.hpp"
#include "orbint/regions.hpp"

namespace orbint {

enum class SpaceDomain { Torus, RealLine, AffineGroup, Cylinder };

/// A sigma-finite measured space with a seeded sampler and quadrature
/// support. The measure is fixed per domain: probability Lebesgue on the
/// torus, Lebesgue on R^d, right Haar on the affine group (Lebesgue du db
/// in the chart (u, b) = (ln a, b)), product Bernoulli(p) on the cylinder.
///
/// Affine points are stored as (a, b); regions over the affine space are
/// declared in the chart, where the measure has density 1.
struct MeasuredSpace {
  SpaceDomain domain = SpaceDomain::Torus;
  int dim = 1;  // coordinate count; cylinder: truncated word length
  double bernoulli_p = 0.5;

  /// Where sample() draws points: the whole space for compact/probability
  /// domains, a declared finite-measure window otherwise (the sampler is
  /// distributed per the normalized restriction of the measure).
  BorelRegion sample_window = BorelRegion::all(1);

  /// Explicit exhaustion by finite-measure regions.
  std::vector<BorelRegion> exhaustion;

  static MeasuredSpace torus(int d);
  static MeasuredSpace real_line(int d, double sample_halfwidth = 8.0,
                                 int exhaustion_depth = 4);
  static MeasuredSpace affine_group(double chart_halfwidth = 4.0,
                                    int exhaustion_depth = 4);
  static MeasuredSpace cylinder(int length, double p);

  /// Deterministic per-index substream sampling: point k of stream `seed`
  /// never depends on how many other points were drawn.
  Point sample(std::uint64_t seed, std::uint64_t index) const;

  /// Measure of a region (exact for the supported shapes).
  double mu_measure(const BorelRegion& r) const;

  /// Chart conversions (identity except for the affine domain).
  Point to_chart(const Point& x) const;
  Point from_chart(const Point& u) const;

  /// Midpoint quadrature of f against the measure over a box region
  /// (affine: chart box). `cells_per_axis` fixes the grid. Cylinder
  /// integrals are exact and only defined for the linear/constant kinds.
  std::complex<double> mu_integral(const Integrand& f, const BorelRegion& over,
                                   std::size_t cells_per_axis) const;

  /// Exact integral against the measure when the integrand kind pins it
  /// analytically (characters, indicators, powers, ramps, constants on the
  /// torus; indicators and powers on the line; linear on the cylinder).
  std::optional<std::complex<double>> exact_integral(const Integrand& f) const;
};

}  // namespace orbint
