#include "orbint/spaces.hpp"

#include <cmath>

#include "orbint/errors.hpp"
#include "orbint/quadrature.hpp"
#include "orbint/rng.hpp"

namespace orbint {

MeasuredSpace MeasuredSpace::torus(int d) {
  if (d <= 0 || d > 3) throw OrbintError("MeasuredSpace::torus: bad dimension");
  MeasuredSpace s;
  s.domain = SpaceDomain::Torus;
  s.dim = d;
  std::vector<double> lo(static_cast<std::size_t>(d), 0.0);
  std::vector<double> hi(static_cast<std::size_t>(d), 1.0);
  s.sample_window = BorelRegion::half_open_box(lo, hi);
  s.exhaustion = {s.sample_window};
  return s;
}

MeasuredSpace MeasuredSpace::real_line(int d, double sample_halfwidth,
                                       int exhaustion_depth) {
  if (d <= 0 || d > 3)
    throw OrbintError("MeasuredSpace::real_line: bad dimension");
  if (!(sample_halfwidth > 0.0))
    throw OrbintError("MeasuredSpace::real_line: bad sample window");
  MeasuredSpace s;
  s.domain = SpaceDomain::RealLine;
  s.dim = d;
  std::vector<double> lo(static_cast<std::size_t>(d), -sample_halfwidth);
  std::vector<double> hi(static_cast<std::size_t>(d), sample_halfwidth);
  s.sample_window = BorelRegion::closed_box(lo, hi);
  for (int k = 1; k <= exhaustion_depth; ++k) {
    std::vector<double> l(static_cast<std::size_t>(d), -double(k));
    std::vector<double> h(static_cast<std::size_t>(d), double(k));
    s.exhaustion.push_back(BorelRegion::closed_box(l, h));
  }
  return s;
}

MeasuredSpace MeasuredSpace::affine_group(double chart_halfwidth,
                                          int exhaustion_depth) {
  if (!(chart_halfwidth > 0.0))
    throw OrbintError("MeasuredSpace::affine_group: bad window");
  MeasuredSpace s;
  s.domain = SpaceDomain::AffineGroup;
  s.dim = 2;
  s.sample_window = BorelRegion::closed_box(
      {-chart_halfwidth, -chart_halfwidth}, {chart_halfwidth, chart_halfwidth});
  for (int k = 1; k <= exhaustion_depth; ++k)
    s.exhaustion.push_back(BorelRegion::closed_box({-double(k), -double(k)},
                                                   {double(k), double(k)}));
  return s;
}

MeasuredSpace MeasuredSpace::cylinder(int length, double p) {
  if (length <= 0 || length > (1 << 20))
    throw OrbintError("MeasuredSpace::cylinder: bad length");
  if (!(p > 0.0) || !(p < 1.0))
    throw OrbintError("MeasuredSpace::cylinder: p must lie in (0,1)");
  MeasuredSpace s;
  s.domain = SpaceDomain::Cylinder;
  s.dim = length;
  s.bernoulli_p = p;
  s.sample_window = BorelRegion::all(length);
  s.exhaustion = {BorelRegion::all(length)};
  return s;
}

Point MeasuredSpace::sample(std::uint64_t seed, std::uint64_t index) const {
  SplitMix64 rng(substream(seed, index));
  Point x(static_cast<std::size_t>(dim));
  switch (domain) {
    case SpaceDomain::Torus:
      for (auto& c : x) c = rng.uniform();
      return x;
    case SpaceDomain::RealLine: {
      for (int i = 0; i < dim; ++i)
        x[static_cast<std::size_t>(i)] =
            rng.uniform(sample_window.lo(i), sample_window.hi(i));
      return x;
    }
    case SpaceDomain::AffineGroup: {
      double u = rng.uniform(sample_window.lo(0), sample_window.hi(0));
      double b = rng.uniform(sample_window.lo(1), sample_window.hi(1));
      return {std::exp(u), b};
    }
    case SpaceDomain::Cylinder: {
      for (auto& c : x) c = rng.bernoulli(bernoulli_p) ? 1.0 : 0.0;
      return x;
    }
  }
  throw OrbintError("MeasuredSpace::sample: unknown domain");
}

double MeasuredSpace::mu_measure(const BorelRegion& r) const {
  switch (domain) {
    case SpaceDomain::Torus:
      // Probability Lebesgue; callers keep regions inside [0,1)^d.
      return r.infinite_content() ? 1.0 : r.content();
    case SpaceDomain::RealLine:
    case SpaceDomain::AffineGroup:
      if (r.infinite_content())
        throw OrbintError("mu_measure: region has infinite measure");
      return r.content();
    case SpaceDomain::Cylinder:
      if (r.kind() == BorelRegion::Kind::All) return 1.0;
      if (r.kind() == BorelRegion::Kind::Empty) return 0.0;
      throw OrbintError("mu_measure: unsupported cylinder region");
  }
  throw OrbintError("mu_measure: unknown domain");
}

Point MeasuredSpace::to_chart(const Point& x) const {
  if (domain != SpaceDomain::AffineGroup) return x;
  if (x.size() != 2 || !(x[0] > 0.0))
    throw OrbintError("to_chart: invalid affine point");
  return {std::log(x[0]), x[1]};
}

Point MeasuredSpace::from_chart(const Point& u) const {
  if (domain != SpaceDomain::AffineGroup) return u;
  if (u.size() != 2) throw OrbintError("from_chart: invalid chart point");
  return {std::exp(u[0]), u[1]};
}

std::complex<double> MeasuredSpace::mu_integral(
    const Integrand& f, const BorelRegion& over,
    std::size_t cells_per_axis) const {
  if (domain == SpaceDomain::Cylinder) {
    auto exact = exact_integral(f);
    if (!exact)
      throw OrbintError("mu_integral: cylinder supports only exact kinds");
    return *exact;
  }
  if (over.kind() != BorelRegion::Kind::Box)
    throw OrbintError("mu_integral: need a box region");
  if (cells_per_axis == 0) throw QuadratureFailure("mu_integral: zero cells");

  const int d = over.dim();
  std::vector<MidpointGrid> grids;
  grids.reserve(static_cast<std::size_t>(d));
  double cellw = 1.0;
  for (int i = 0; i < d; ++i) {
    if (!(over.hi(i) > over.lo(i)))
      throw QuadratureFailure("mu_integral: empty box axis");
    grids.push_back(MidpointGrid::over(over.lo(i), over.hi(i), cells_per_axis));
    cellw *= grids.back().weight;
  }

  KahanComplex<double> acc;
  Point x(static_cast<std::size_t>(d));
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  bool affine = domain == SpaceDomain::AffineGroup;
  while (true) {
    for (int i = 0; i < d; ++i)
      x[static_cast<std::size_t>(i)] =
          grids[static_cast<std::size_t>(i)].nodes[idx[static_cast<std::size_t>(i)]];
    acc.add(f.eval(affine ? from_chart(x) : x));
    int axis = 0;
    while (axis < d) {
      if (++idx[static_cast<std::size_t>(axis)] < cells_per_axis) break;
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == d) break;
  }
  std::complex<double> v = acc.value() * cellw;
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw QuadratureFailure("mu_integral: non-finite result");
  return v;
}

std::optional<std::complex<double>> MeasuredSpace::exact_integral(
    const Integrand& f) const {
  switch (domain) {
    case SpaceDomain::Torus:
      switch (f.kind()) {
        case Integrand::Kind::Constant:
          return std::complex<double>(f.constant_value(), 0.0);
        case Integrand::Kind::Character:
        case Integrand::Kind::TrigPoly: {
          std::complex<double> c{0.0, 0.0};
          for (const auto& t : f.terms()) {
            bool zero = true;
            for (long m : t.freq) zero = zero && m == 0;
            if (zero) c += t.coeff;
          }
          return c;
        }
        case Integrand::Kind::BoxIndicator:
          return std::complex<double>(f.indicator_region().content(), 0.0);
        case Integrand::Kind::PowerSingularity:
          return std::complex<double>(1.0 / (1.0 - f.power_delta()), 0.0);
        case Integrand::Kind::Ramp: {
          const auto& s = *f.support();
          return std::complex<double>(0.5 * (s.hi(0) - s.lo(0)), 0.0);
        }
        default:
          return std::nullopt;
      }
    case SpaceDomain::RealLine:
      switch (f.kind()) {
        case Integrand::Kind::BoxIndicator:
          return std::complex<double>(f.indicator_region().content(), 0.0);
        case Integrand::Kind::PowerSingularity:
          return std::complex<double>(1.0 / (1.0 - f.power_delta()), 0.0);
        case Integrand::Kind::Ramp: {
          const auto& s = *f.support();
          return std::complex<double>(0.5 * (s.hi(0) - s.lo(0)), 0.0);
        }
        default:
          return std::nullopt;
      }
    case SpaceDomain::AffineGroup:
      return std::nullopt;
    case SpaceDomain::Cylinder:
      switch (f.kind()) {
        case Integrand::Kind::Constant:
          return std::complex<double>(f.constant_value(), 0.0);
        case Integrand::Kind::CoordinateLinear: {
          double v = f.lin_constant();
          for (double c : f.lin_coeffs()) v += c * bernoulli_p;
          return std::complex<double>(v, 0.0);
        }
        default:
          return std::nullopt;
      }
  }
  return std::nullopt;
}

}  // namespace orbint
