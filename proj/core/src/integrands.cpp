#include "orbint/integrands.hpp"

#include <cmath>

#include "orbint/errors.hpp"

namespace orbint {
namespace {

constexpr long double kTwoPiL = 6.283185307179586476925286766559L;

}  // namespace

std::complex<double> unit_phase(long double theta) {
  theta -= std::floor(theta);  // characters only care about theta mod 1
  long double a = kTwoPiL * theta;
  return {static_cast<double>(std::cos(a)), static_cast<double>(std::sin(a))};
}

double bump_profile(double s, int order) {
  double a = std::abs(s);
  if (a >= 1.0) return 0.0;
  switch (order) {
    case 0:
      return 1.0 - a;
    case 1: {
      double t = 1.0 - s * s;
      return t * t;
    }
    case 2: {
      double t = 1.0 - s * s;
      return t * t * t;
    }
    default:
      throw OrbintError("bump_profile: order must be 0, 1, or 2");
  }
}

Integrand Integrand::constant(double c, int dim) {
  Integrand f;
  f.kind_ = Kind::Constant;
  f.dim_ = dim;
  f.c0_ = c;
  f.real_ = true;
  return f;
}

Integrand Integrand::character(std::vector<long> freq) {
  Integrand f;
  f.kind_ = Kind::Character;
  f.dim_ = static_cast<int>(freq.size());
  f.terms_ = {TrigTerm{std::move(freq), {1.0, 0.0}}};
  f.real_ = false;
  return f;
}

Integrand Integrand::trig_poly(std::vector<TrigTerm> terms) {
  if (terms.empty()) throw OrbintError("trig_poly: no terms");
  Integrand f;
  f.kind_ = Kind::TrigPoly;
  f.dim_ = static_cast<int>(terms[0].freq.size());
  for (const auto& t : terms)
    if (static_cast<int>(t.freq.size()) != f.dim_)
      throw OrbintError("trig_poly: mixed frequency dimensions");
  f.terms_ = std::move(terms);
  f.real_ = false;
  return f;
}

Integrand Integrand::box_indicator(BorelRegion region) {
  Integrand f;
  f.kind_ = Kind::BoxIndicator;
  f.dim_ = region.dim();
  f.real_ = true;
  f.support_ = region;
  f.region_ = std::move(region);
  return f;
}

Integrand Integrand::power_singularity(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw OrbintError("power_singularity: exponent must lie in (0,1)");
  Integrand f;
  f.kind_ = Kind::PowerSingularity;
  f.dim_ = 1;
  f.delta_ = delta;
  f.real_ = true;
  f.support_ = BorelRegion::interval(0.0, 1.0);
  return f;
}

Integrand Integrand::coordinate_linear(std::vector<double> coeffs,
                                       double constant) {
  Integrand f;
  f.kind_ = Kind::CoordinateLinear;
  f.dim_ = static_cast<int>(coeffs.size());
  f.coeffs_ = std::move(coeffs);
  f.c0_ = constant;
  f.real_ = true;
  f.integrable_ = true;
  return f;
}

Integrand Integrand::bump(std::vector<double> center,
                          std::vector<double> radius, int order) {
  if (center.size() != radius.size() || center.empty())
    throw OrbintError("bump: center/radius mismatch");
  Integrand f;
  f.kind_ = Kind::Bump;
  f.dim_ = static_cast<int>(center.size());
  std::vector<double> lo(center.size()), hi(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (!(radius[i] > 0.0)) throw OrbintError("bump: radius must be positive");
    lo[i] = center[i] - radius[i];
    hi[i] = center[i] + radius[i];
  }
  f.support_ = BorelRegion::closed_box(lo, hi);
  f.center_ = std::move(center);
  f.radius_ = std::move(radius);
  f.order_ = order;
  (void)bump_profile(0.0, order);  // validates the order
  return f;
}

Integrand Integrand::bump_affine(std::vector<double> center,
                                 std::vector<double> radius, int order) {
  Integrand f = bump(std::move(center), std::move(radius), order);
  f.affine_chart_ = true;
  return f;
}

Integrand Integrand::ramp(double lo, double hi) {
  if (!(lo < hi)) throw OrbintError("ramp: need lo < hi");
  Integrand f;
  f.kind_ = Kind::Ramp;
  f.dim_ = 1;
  f.ramp_lo_ = lo;
  f.ramp_hi_ = hi;
  f.support_ = BorelRegion::half_open_interval(lo, hi);
  return f;
}

Integrand Integrand::custom(
    std::function<std::complex<double>(const Point&)> fn, int dim,
    std::optional<BorelRegion> support, bool integrable, bool real_valued) {
  Integrand f;
  f.kind_ = Kind::Custom;
  f.dim_ = dim;
  f.fn_ = std::move(fn);
  f.support_ = std::move(support);
  f.integrable_ = integrable;
  f.real_ = real_valued;
  return f;
}

const BorelRegion& Integrand::indicator_region() const {
  if (kind_ != Kind::BoxIndicator)
    throw OrbintError("indicator_region: not an indicator");
  return *region_;
}

double Integrand::bump_factor(int axis, double chart_value) const {
  if (kind_ != Kind::Bump) throw OrbintError("bump_factor: not a bump");
  std::size_t i = static_cast<std::size_t>(axis);
  return bump_profile((chart_value - center_.at(i)) / radius_.at(i), order_);
}

double Integrand::bump_eval(const Point& x) const {
  double v = 1.0;
  for (std::size_t i = 0; i < center_.size(); ++i) {
    double xi = x[i];
    if (affine_chart_ && i == 0) {
      if (!(xi > 0.0)) return 0.0;
      xi = std::log(xi);
    }
    v *= bump_profile((xi - center_[i]) / radius_[i], order_);
    if (v == 0.0) return 0.0;
  }
  return v;
}

std::complex<double> Integrand::eval(const Point& x) const {
  // Cylinder convention: a point may carry extra trailing coordinates, which
  // the integrand ignores. Fewer coordinates than declared is an error.
  if (static_cast<int>(x.size()) < dim_)
    throw OrbintError("Integrand::eval: dimension mismatch");
  switch (kind_) {
    case Kind::Constant:
      return {c0_, 0.0};
    case Kind::Character:
    case Kind::TrigPoly: {
      std::complex<double> acc{0.0, 0.0};
      for (const auto& term : terms_) {
        long double theta = 0.0L;
        for (std::size_t i = 0; i < term.freq.size(); ++i)
          theta += static_cast<long double>(term.freq[i]) *
                   static_cast<long double>(x[i]);
        acc += term.coeff * unit_phase(theta);
      }
      return acc;
    }
    case Kind::BoxIndicator: {
      if (static_cast<int>(x.size()) == region_->dim())
        return {region_->contains(x) ? 1.0 : 0.0, 0.0};
      const Point head(x.begin(), x.begin() + region_->dim());
      return {region_->contains(head) ? 1.0 : 0.0, 0.0};
    }
    case Kind::PowerSingularity: {
      double y = x[0];
      if (!(y > 0.0) || y > 1.0) {
        if (y == 0.0)
          throw SingularHit("power integrand evaluated exactly at 0");
        return {0.0, 0.0};
      }
      if (delta_ == 0.75) {
        double s = std::sqrt(y);
        return {1.0 / (s * std::sqrt(s)), 0.0};
      }
      return {std::pow(y, -delta_), 0.0};
    }
    case Kind::CoordinateLinear: {
      double v = c0_;
      std::size_t n = std::min(coeffs_.size(), x.size());
      for (std::size_t i = 0; i < n; ++i) v += coeffs_[i] * x[i];
      return {v, 0.0};
    }
    case Kind::Bump:
      return {bump_eval(x), 0.0};
    case Kind::Ramp: {
      double t = x[0];
      if (t < ramp_lo_ || t >= ramp_hi_) return {0.0, 0.0};
      return {(t - ramp_lo_) / (ramp_hi_ - ramp_lo_), 0.0};
    }
    case Kind::Custom:
      return fn_(x);
  }
  throw OrbintError("Integrand::eval: unknown kind");
}

double Integrand::real_eval(const Point& x) const {
  if (!real_) throw OrbintError("real_eval: integrand is complex-valued");
  return eval(x).real();
}

bool Integrand::singular_at(const Point& x) const {
  return kind_ == Kind::PowerSingularity && !x.empty() && x[0] == 0.0;
}

Integrand Integrand::scaled_sum(std::complex<double> a, const Integrand& f,
                                std::complex<double> b, const Integrand& g) {
  Integrand fc = f;
  Integrand gc = g;
  bool real = f.is_real() && g.is_real() && a.imag() == 0.0 && b.imag() == 0.0;
  return Integrand::custom(
      [a, fc, gc, b](const Point& x) {
        return a * fc.eval(x) + b * gc.eval(x);
      },
      f.dim(), std::nullopt, f.integrable() && g.integrable(), real);
}

}  // namespace orbint
