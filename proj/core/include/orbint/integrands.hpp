#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "orbint/point.hpp"
#include "orbint/regions.hpp"

namespace orbint {

/// What to do when an orbit lands exactly on a non-integrable singularity:
/// abort the computation, or drop that single atom (used only where the
/// singular set has measure zero and the scenario says so).
enum class SingularPolicy { Error, Skip };

struct TrigTerm {
  std::vector<long> freq;
  std::complex<double> coeff;
};

/// Descriptor of a function on a measured space. Evaluation is pure;
/// metadata (support box, integrability, realness, singular set) travels
/// with the descriptor so averaging code can pick windows and guards
/// without guessing.
class Integrand {
 public:
  enum class Kind {
    Constant,
    Character,        // exp(2*pi*i <freq, x>) on the torus
    TrigPoly,         // finite sum of characters
    BoxIndicator,     // 1_R for a box-like region
    PowerSingularity, // y^(-delta) for y = x[0] in (0,1], else 0
    CoordinateLinear, // c0 + sum c_i x_i
    Bump,             // compactly supported product bump, order 0/1/2
    Ramp,             // (t-lo)/(hi-lo) on [lo,hi), 0 outside; jump at hi
    Custom
  };

  static Integrand constant(double c, int dim = 1);
  static Integrand character(std::vector<long> freq);
  static Integrand trig_poly(std::vector<TrigTerm> terms);
  static Integrand box_indicator(BorelRegion region);
  static Integrand power_singularity(double delta);
  static Integrand coordinate_linear(std::vector<double> coeffs,
                                     double constant = 0.0);
  /// Product bump of smoothness order 0 (triangle), 1 (C^1) or 2 (C^2),
  /// each factor supported on [center-radius, center+radius].
  static Integrand bump(std::vector<double> center, std::vector<double> radius,
                        int order);
  /// Same bump, but evaluated in the affine chart (u, b) = (ln a, b) of a
  /// point stored as (a, b).
  static Integrand bump_affine(std::vector<double> center,
                               std::vector<double> radius, int order);
  static Integrand ramp(double lo, double hi);
  static Integrand custom(std::function<std::complex<double>(const Point&)> fn,
                          int dim, std::optional<BorelRegion> support,
                          bool integrable, bool real_valued);

  /// Pointwise value. Points may carry extra trailing coordinates beyond
  /// the declared dimension (cylinder convention); those are ignored.
  std::complex<double> eval(const Point& x) const;
  double real_eval(const Point& x) const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_real() const { return real_; }
  bool integrable() const { return integrable_; }
  bool has_singularity() const { return kind_ == Kind::PowerSingularity; }
  /// Exact test: does evaluation at x hit a non-integrable singular point?
  bool singular_at(const Point& x) const;
  const std::optional<BorelRegion>& support() const { return support_; }

  /// Parameters for specialized kernels.
  bool is_product_bump() const { return kind_ == Kind::Bump; }
  /// One axis factor of a product bump, evaluated on a chart value (the
  /// affine-chart conversion is the caller's job here).
  double bump_factor(int axis, double chart_value) const;
  double power_delta() const { return delta_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  const std::vector<double>& lin_coeffs() const { return coeffs_; }
  double lin_constant() const { return c0_; }
  const BorelRegion& indicator_region() const;
  double constant_value() const { return c0_; }

  /// Linear-combination helpers (used by property tests and the
  /// conditional-expectation algebra).
  static Integrand scaled_sum(std::complex<double> a, const Integrand& f,
                              std::complex<double> b, const Integrand& g);

 private:
  Kind kind_ = Kind::Constant;
  int dim_ = 1;
  bool real_ = true;
  bool integrable_ = true;
  std::optional<BorelRegion> support_;
  // kind-specific payloads
  double c0_ = 0.0;
  double delta_ = 0.0;
  std::vector<TrigTerm> terms_;
  std::vector<double> coeffs_;
  std::vector<double> center_, radius_;
  int order_ = 0;
  bool affine_chart_ = false;
  double ramp_lo_ = 0.0, ramp_hi_ = 1.0;
  std::optional<BorelRegion> region_;
  std::function<std::complex<double>(const Point&)> fn_;

  double bump_eval(const Point& x) const;
};

/// One factor profile of a product bump, shared with group-side test
/// functions: order 0 = max(0, 1-|s|), order 1 = (1-s^2)^2, order 2 =
/// (1-s^2)^3 on |s| <= 1.
double bump_profile(double s, int order);

/// Character value exp(2*pi*i*theta) with the phase accumulated in long
/// double so that root-of-unity sums cancel to ~1e-15 rather than ~1e-12.
std::complex<double> unit_phase(long double theta);

}  // namespace orbint
