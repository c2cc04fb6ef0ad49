#include "orbint/martingale.hpp"

#include <algorithm>
#include <cmath>

#include "orbint/averaging.hpp"
#include "orbint/quadrature.hpp"

namespace orbint {
namespace {

double torus_frac(double x) {
  double y = x - std::floor(x);
  return y >= 1.0 ? 0.0 : y;
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

long ones_among(const Point& x, long n) {
  if (static_cast<long>(x.size()) < n)
    throw OrbintError("orbit partition: point has fewer coordinates than the "
                      "permutation degree");
  long w = 0;
  for (long i = 0; i < n; ++i) w += x[static_cast<std::size_t>(i)] > 0.5;
  return w;
}

void require_in_region(const BorelRegion& region, const Point& x) {
  if (!region.contains(x))
    throw PointNotInRegion("orbit partition: query point outside the region");
}

/// Probability that a uniform permutation of a word with w ones among n
/// letters shows the 0/1 pattern `bits` in its first positions. Sequential
/// sampling without replacement; every factor is at most 1.
double pattern_weight(const std::vector<int>& bits, long n, long w) {
  double p = 1.0;
  double wr = static_cast<double>(w);
  double zr = static_cast<double>(n - w);
  double tr = static_cast<double>(n);
  for (int b : bits) {
    p *= (b ? wr : zr) / tr;
    if (b)
      wr -= 1.0;
    else
      zr -= 1.0;
    tr -= 1.0;
    if (p == 0.0) return 0.0;
  }
  return p;
}

std::complex<double> sym_conditional_expectation(const Integrand& f,
                                                 const Point& x, long n) {
  const long w = ones_among(x, n);
  const int K = f.dim();
  if (f.kind() == Integrand::Kind::Constant)
    return {f.constant_value(), 0.0};
  if (f.kind() == Integrand::Kind::CoordinateLinear) {
    // Each permuted coordinate has conditional mean w/n; coordinates past
    // the permutation degree are fixed.
    const auto& c = f.lin_coeffs();
    double inside = 0.0;
    KahanSum<double> fixed;
    for (int i = 0; i < K; ++i) {
      if (static_cast<long>(i) < n)
        inside += c[static_cast<std::size_t>(i)];
      else
        fixed.add(c[static_cast<std::size_t>(i)] *
                  x.at(static_cast<std::size_t>(i)));
    }
    double mean = static_cast<double>(w) / static_cast<double>(n);
    return {f.lin_constant() + inside * mean + fixed.value(), 0.0};
  }
  const long L = std::min<long>(K, n);
  if (L > 20)
    throw UnsupportedLevel(
        "orbit_conditional_expectation: generic integrand over 2^" +
        std::to_string(L) + " patterns is too large");
  Point y(static_cast<std::size_t>(K), 0.0);
  for (long i = n; i < K; ++i)
    y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  std::vector<int> bits(static_cast<std::size_t>(L), 0);
  KahanComplex<double> sum;
  const long total = 1L << L;
  for (long mask = 0; mask < total; ++mask) {
    for (long i = 0; i < L; ++i) {
      bits[static_cast<std::size_t>(i)] = (mask >> i) & 1;
      y[static_cast<std::size_t>(i)] =
          static_cast<double>(bits[static_cast<std::size_t>(i)]);
    }
    double p = pattern_weight(bits, n, w);
    if (p == 0.0) continue;
    sum.add(f.eval(y) * p);
  }
  return sum.value();
}

}  // namespace

OrbitPartition OrbitPartition::orbit_sigma_field(const ActionSystem& system,
                                                 const GroupId& level,
                                                 const BorelRegion& region) {
  OrbitPartition p;
  p.system_ = system;
  p.level_ = level;
  p.region_ = region;
  switch (system.kind) {
    case ActionKind::TorusTranslate:
      if (level.family != GroupFamily::FiniteCyclic || system.space.dim != 1)
        throw UnsupportedLevel(
            "orbit partition: torus partitions need a cyclic level on the "
            "circle");
      break;
    case ActionKind::SymOnCylinder:
      if (level.family != GroupFamily::SymFinite)
        throw UnsupportedLevel(
            "orbit partition: cylinder partitions need a finite permutation "
            "level");
      break;
    default:
      throw UnsupportedLevel("orbit partition: unsupported action kind");
  }
  return p;
}

OrbitPartition OrbitPartition::dyadic_grid(const ActionSystem& system,
                                           const GroupId& level,
                                           const BorelRegion& region,
                                           int grid_level) {
  if (level.family != GroupFamily::FiniteCyclic || !is_power_of_two(level.order))
    throw UnsupportedLevel(
        "orbit partition: dyadic grids need a cyclic level of order 2^l");
  int l = 0;
  while ((1L << l) < level.order) ++l;
  if (grid_level < l || grid_level > 30)
    throw UnsupportedLevel("orbit partition: grid level must lie in [l, 30]");

  OrbitPartition p = orbit_sigma_field(system, level, region);
  p.grid_level_ = grid_level;
  const long m_count = 1L << grid_level;
  const long stride = 1L << (grid_level - l);  // orbit step in grid indices
  p.residue_to_block_.assign(static_cast<std::size_t>(stride), -1);
  // Grid doubles p/2^m are exact, so region membership is exact too.
  for (long r = 0; r < stride; ++r) {
    OrbitBlock block;
    for (long q = r; q < m_count; q += stride) {
      double v = static_cast<double>(q) / static_cast<double>(m_count);
      if (region.contains1(v)) block.points.push_back({v});
    }
    if (block.points.empty()) continue;
    block.weights.assign(block.points.size(),
                         1.0 / static_cast<double>(block.points.size()));
    p.residue_to_block_[static_cast<std::size_t>(r)] =
        static_cast<long>(p.blocks_.size());
    p.blocks_.push_back(std::move(block));
  }
  return p;
}

long OrbitPartition::block_index(const Point& x) const {
  if (grid_level_ < 0)
    throw UnsupportedLevel("orbit partition: blocks were not materialized");
  require_in_region(region_, x);
  const double scaled = x.at(0) * static_cast<double>(1L << grid_level_);
  const double rounded = std::nearbyint(scaled);
  if (scaled != rounded)
    throw PointNotInRegion("orbit partition: point is not on the dyadic grid");
  const long q = static_cast<long>(rounded);
  const long stride = static_cast<long>(residue_to_block_.size());
  long idx = residue_to_block_[static_cast<std::size_t>(q % stride)];
  if (idx < 0)
    throw PointNotInRegion("orbit partition: grid point outside every block");
  return idx;
}

OrbitBlock OrbitPartition::block_of(const Point& x) const {
  require_in_region(region_, x);
  OrbitBlock block;
  switch (system_.kind) {
    case ActionKind::TorusTranslate: {
      const long n = level_.order;
      for (long j = 0; j < n; ++j) {
        double y = torus_frac(x.at(0) + static_cast<double>(j) /
                                            static_cast<double>(n));
        if (region_.contains1(y)) block.points.push_back({y});
      }
      block.weights.assign(block.points.size(),
                           1.0 / static_cast<double>(block.points.size()));
      return block;
    }
    case ActionKind::SymOnCylinder:
      throw UnsupportedLevel(
          "orbit partition: cylinder blocks are pattern-weighted, not point "
          "lists; use orbit_conditional_expectation");
    default:
      throw UnsupportedLevel("orbit partition: unsupported action kind");
  }
}

std::complex<double> orbit_conditional_expectation(
    const OrbitPartition& partition, const Integrand& f, const Point& x) {
  require_in_region(partition.region(), x);
  const ActionSystem& system = partition.system();
  switch (system.kind) {
    case ActionKind::TorusTranslate: {
      OrbitBlock block = partition.block_of(x);
      KahanComplex<double> sum;
      for (std::size_t i = 0; i < block.points.size(); ++i)
        sum.add(f.eval(block.points[i]) * block.weights[i]);
      return sum.value();
    }
    case ActionKind::SymOnCylinder:
      return sym_conditional_expectation(f, x, partition.level().order);
    default:
      throw UnsupportedLevel(
          "orbit_conditional_expectation: unsupported action kind");
  }
}

Integrand orbit_conditional_expectation_fn(const OrbitPartition& partition,
                                           const Integrand& f) {
  const ActionSystem& system = partition.system();
  if (system.kind == ActionKind::SymOnCylinder &&
      (f.kind() == Integrand::Kind::Constant ||
       f.kind() == Integrand::Kind::CoordinateLinear)) {
    // Closed form: permuted coordinates share the coefficient mass equally,
    // fixed coordinates keep theirs.
    const long n = partition.level().order;
    const int K = f.dim();
    if (f.kind() == Integrand::Kind::Constant) return f;
    const auto& c = f.lin_coeffs();
    double inside = 0.0;
    for (int i = 0; i < K && static_cast<long>(i) < n; ++i)
      inside += c[static_cast<std::size_t>(i)];
    const int dim = std::max<int>(K, static_cast<int>(n));
    std::vector<double> coeffs(static_cast<std::size_t>(dim), 0.0);
    for (long i = 0; i < n; ++i)
      coeffs[static_cast<std::size_t>(i)] =
          inside / static_cast<double>(n);
    for (int i = static_cast<int>(n); i < K; ++i)
      coeffs[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
    return Integrand::coordinate_linear(std::move(coeffs), f.lin_constant());
  }
  const int dim = system.kind == ActionKind::SymOnCylinder
                      ? std::max<int>(f.dim(),
                                      static_cast<int>(partition.level().order))
                      : f.dim();
  OrbitPartition part = partition;
  Integrand inner = f;
  return Integrand::custom(
      [part, inner](const Point& y) {
        return orbit_conditional_expectation(part, inner, y);
      },
      dim, std::nullopt, true, f.is_real());
}

MartingaleReport reversed_martingale_check(
    const ActionSystem& system, const Integrand& f,
    const std::vector<Point>& x_sample, std::size_t level_lo,
    std::size_t level_hi, double tol,
    std::optional<std::complex<double>> limit) {
  if (x_sample.empty())
    throw OrbintError("reversed_martingale_check: empty point sample");
  if (level_hi < level_lo || level_hi >= system.chain.depth())
    throw UnsupportedLevel("reversed_martingale_check: bad level range");

  MartingaleReport report;
  report.tol = tol;
  if (limit) {
    report.declared_limit = *limit;
  } else if (auto exact = system.space.exact_integral(f)) {
    report.declared_limit = *exact;
  } else if (system.kind == ActionKind::TorusTranslate) {
    std::vector<double> lo(static_cast<std::size_t>(system.space.dim), 0.0);
    std::vector<double> hi(static_cast<std::size_t>(system.space.dim), 1.0);
    report.declared_limit = system.space.mu_integral(
        f, BorelRegion::half_open_box(lo, hi), 1u << 12);
  } else {
    throw OrbintError(
        "reversed_martingale_check: no declared limit for this integrand");
  }

  const BorelRegion region = BorelRegion::all(system.space.dim);
  std::vector<OrbitPartition> parts;
  for (std::size_t i = level_lo; i <= level_hi; ++i)
    parts.push_back(OrbitPartition::orbit_sigma_field(
        system, system.chain.level(i), region));

  // Tower property over consecutive level pairs.
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    Integrand ef = orbit_conditional_expectation_fn(parts[i], f);
    for (const auto& x : x_sample) {
      std::complex<double> lhs =
          orbit_conditional_expectation(parts[i + 1], ef, x);
      std::complex<double> rhs =
          orbit_conditional_expectation(parts[i + 1], f, x);
      report.tower_residual = std::max(report.tower_residual,
                                       std::abs(lhs - rhs));
    }
  }

  // Deviation from the declared limit, medians per level.
  for (auto& part : parts) {
    std::vector<double> devs;
    devs.reserve(x_sample.size());
    for (const auto& x : x_sample)
      devs.push_back(std::abs(orbit_conditional_expectation(part, f, x) -
                              report.declared_limit));
    std::size_t mid = devs.size() / 2;
    std::nth_element(devs.begin(), devs.begin() + static_cast<long>(mid),
                     devs.end());
    report.median_deviation.push_back(devs[mid]);
  }
  report.first_median = report.median_deviation.front();
  report.final_median = report.median_deviation.back();
  report.pass = report.tower_residual <= tol &&
                report.final_median <= 0.5 * report.first_median + tol;
  return report;
}

}  // namespace orbint
