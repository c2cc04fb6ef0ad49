#include "orbint/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orbint/quadrature.hpp"

namespace orbint {
namespace {

constexpr double kLn2 = 0.6931471805599453;

double torus_frac(double x) {
  double y = x - std::floor(x);
  return y >= 1.0 ? 0.0 : y;
}

std::complex<double> guarded_eval(const Integrand& f, const Point& y,
                                  SingularPolicy singular, bool* dropped) {
  if (f.singular_at(y)) {
    if (singular == SingularPolicy::Error)
      throw SingularHit("orbit atom landed on the singular point");
    *dropped = true;
    return {0.0, 0.0};
  }
  return f.eval(y);
}

/// Per-axis candidate index range of lattice atoms whose chart coordinate
/// can lie in [lo, hi], padded one step on each side.
void lattice_axis_range(double lo, double hi, double shift, double step,
                        long* klo, long* khi) {
  *klo = static_cast<long>(std::floor((lo - shift) / step)) - 1;
  *khi = static_cast<long>(std::ceil((hi - shift) / step)) + 1;
}

std::complex<double> lattice_windowed_sum(const ActionSystem& system,
                                          const GroupId& id, const Integrand& f,
                                          const Point& x,
                                          const std::vector<long>& klo,
                                          const std::vector<long>& khi,
                                          SingularPolicy singular) {
  KahanComplex<double> sum;
  bool dropped = false;
  std::vector<long> k = klo;
  while (true) {
    Point y = act(system, lattice_atom(id.step, k), x);
    sum.add(guarded_eval(f, y, singular, &dropped));
    int axis = 0;
    while (axis < id.dim) {
      std::size_t ua = static_cast<std::size_t>(axis);
      if (++k[ua] <= khi[ua]) break;
      k[ua] = klo[ua];
      ++axis;
    }
    if (axis == id.dim) break;
  }
  return sum.value();
}

bool stabilized(std::complex<double> v1, std::complex<double> v2, double tol) {
  return std::abs(v2 - v1) <= tol * (1.0 + std::abs(v2));
}

std::size_t offset_cells(double len, std::size_t cells_per_unit) {
  double want = len * static_cast<double>(cells_per_unit);
  if (!std::isfinite(want) || want > double(1u << 22))
    throw QuadratureFailure("orbital quadrature: window too large");
  return static_cast<std::size_t>(std::max(8.0, std::ceil(want)));
}

}  // namespace

double power_riemann_sum(double x, long n, double delta,
                         SingularPolicy singular) {
  if (n <= 0) throw OrbintError("power_riemann_sum: n must be positive");
  const double x0 = torus_frac(x);
  const double inv = 1.0 / static_cast<double>(n);
  double acc;
  if (delta == 0.75) {
    // Branch-free hot path: truncation of a nonnegative value is floor, and
    // t^(3/4) = sqrt(t) * sqrt(sqrt(t)). Four independent accumulators keep
    // the loop free of carried dependencies; exact singular hits make the
    // sum non-finite and fall through to the guarded pass below.
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    long j = 0;
    for (; j + 4 <= n; j += 4) {
      double t0 = x0 + static_cast<double>(j) * inv;
      double t1 = x0 + static_cast<double>(j + 1) * inv;
      double t2 = x0 + static_cast<double>(j + 2) * inv;
      double t3 = x0 + static_cast<double>(j + 3) * inv;
      t0 -= static_cast<double>(static_cast<long>(t0));
      t1 -= static_cast<double>(static_cast<long>(t1));
      t2 -= static_cast<double>(static_cast<long>(t2));
      t3 -= static_cast<double>(static_cast<long>(t3));
      double s0 = std::sqrt(t0), s1 = std::sqrt(t1);
      double s2 = std::sqrt(t2), s3 = std::sqrt(t3);
      a0 += 1.0 / (s0 * std::sqrt(s0));
      a1 += 1.0 / (s1 * std::sqrt(s1));
      a2 += 1.0 / (s2 * std::sqrt(s2));
      a3 += 1.0 / (s3 * std::sqrt(s3));
    }
    for (; j < n; ++j) {
      double t = x0 + static_cast<double>(j) * inv;
      t -= static_cast<double>(static_cast<long>(t));
      double s = std::sqrt(t);
      a0 += 1.0 / (s * std::sqrt(s));
    }
    acc = ((a0 + a1) + (a2 + a3)) * inv;
  } else {
    double a = 0.0;
    for (long j = 0; j < n; ++j) {
      double t = x0 + static_cast<double>(j) * inv;
      t -= static_cast<double>(static_cast<long>(t));
      a += std::pow(t, -delta);
    }
    acc = a * inv;
  }
  if (std::isfinite(acc)) return acc;
  // Guarded rerun: classify the exact hits.
  KahanSum<double> sum;
  for (long j = 0; j < n; ++j) {
    double t = x0 + static_cast<double>(j) * inv;
    t -= static_cast<double>(static_cast<long>(t));
    if (t == 0.0) {
      if (singular == SingularPolicy::Error)
        throw SingularHit("equispaced orbit hits the power singularity");
      continue;
    }
    sum.add(std::pow(t, -delta));
  }
  return sum.value() * inv;
}

std::complex<double> orbital_integral(const ActionSystem& system,
                                      const LevelRef& level, const Integrand& f,
                                      const Point& x,
                                      const TruncationPolicy& trunc,
                                      SingularPolicy singular) {
  if (level.is_ambient())
    return ambient_orbital_integral(system, f, x, trunc, singular);
  trunc.validate();
  const GroupId& id = *level.id;
  if (!subgroup_leq(id, system.chain.ambient))
    throw MismatchedGroups("orbital_integral: level is not a subgroup of " +
                           system.chain.ambient.describe());
  const double scale = system.chain.ambient_scale;

  switch (id.family) {
    case GroupFamily::FiniteCyclic: {
      const long n = id.order;
      if (system.kind == ActionKind::TorusTranslate && system.space.dim == 1) {
        if (f.kind() == Integrand::Kind::PowerSingularity)
          return {power_riemann_sum(x[0], n, f.power_delta(), singular) * scale,
                  0.0};
        if (f.kind() == Integrand::Kind::Character ||
            f.kind() == Integrand::Kind::TrigPoly) {
          // Exact residue sweep: the phase of e_m at x + j/n is
          // m*x + (m*j mod n)/n, so root-of-unity sums cancel to ~1e-15.
          KahanComplex<double> total;
          for (const auto& term : f.terms()) {
            long m = term.freq.at(0);
            long step = ((m % n) + n) % n;
            long double base =
                static_cast<long double>(m) * static_cast<long double>(x[0]);
            KahanComplex<double> sum;
            long r = 0;
            for (long j = 0; j < n; ++j) {
              sum.add(unit_phase(base + static_cast<long double>(r) /
                                            static_cast<long double>(n)));
              r += step;
              if (r >= n) r -= n;
            }
            total.add(term.coeff * (sum.value() / static_cast<double>(n)));
          }
          return total.value() * scale;
        }
      }
      KahanComplex<double> sum;
      bool dropped = false;
      for (long j = 0; j < n; ++j) {
        Point y = act(system, cyclic_atom(n, j), x);
        sum.add(guarded_eval(f, y, singular, &dropped));
      }
      return sum.value() / static_cast<double>(n) * scale;
    }

    case GroupFamily::ScaledLattice: {
      const double w = std::pow(id.step, id.dim) * scale;
      if (f.support() && system.kind == ActionKind::LineTranslate) {
        const BorelRegion& S = *f.support();
        std::vector<long> klo(static_cast<std::size_t>(id.dim));
        std::vector<long> khi(static_cast<std::size_t>(id.dim));
        for (int i = 0; i < id.dim; ++i) {
          double blo, bhi;
          S.bounding(i, &blo, &bhi);
          lattice_axis_range(blo, bhi, x[static_cast<std::size_t>(i)], id.step,
                             &klo[static_cast<std::size_t>(i)],
                             &khi[static_cast<std::size_t>(i)]);
        }
        return lattice_windowed_sum(system, id, f, x, klo, khi, singular) * w;
      }
      // No exact window: sum over the truncation window and insist the
      // doubled window agrees.
      auto windowed = [&](double W) {
        long kmax = static_cast<long>(std::floor(W / id.step));
        std::vector<long> klo(static_cast<std::size_t>(id.dim), -kmax);
        std::vector<long> khi(static_cast<std::size_t>(id.dim), kmax);
        return lattice_windowed_sum(system, id, f, x, klo, khi, singular) * w;
      };
      std::complex<double> v1 = windowed(trunc.window);
      std::complex<double> v2 = windowed(2.0 * trunc.window);
      if (!stabilized(v1, v2, trunc.doubling_tol))
        throw TruncationTooSmall(
            "orbital_integral: lattice sum not stable under window doubling");
      return v2;
    }

    case GroupFamily::SymFinite: {
      auto atoms = enumerate_group(system.chain, id, trunc);
      KahanComplex<double> sum;
      double total = 0.0;
      bool dropped = false;
      for (const auto& a : atoms) {
        Point y = act(system, a.elem, x);
        sum.add(guarded_eval(f, y, singular, &dropped) * a.weight);
        total += a.weight;
      }
      if (system.probability_levels) return sum.value() / total;
      return sum.value();
    }

    case GroupFamily::AffineScaleLevel: {
      const int m = id.scale_level;
      const double du = kLn2 / static_cast<double>(1L << m);
      if (system.kind == ActionKind::AffineLeftSelf && f.support()) {
        const BorelRegion& S = *f.support();  // chart box
        const double ux = std::log(x.at(0));
        long klo = static_cast<long>(std::ceil((S.lo(0) - ux) / du - 1e-9));
        long khi = static_cast<long>(std::floor((S.hi(0) - ux) / du + 1e-9));
        KahanComplex<double> sum;
        bool dropped = false;
        for (long k = klo; k <= khi; ++k) {
          GroupElement base = affine_scale_atom(m, k, 0.0);
          double at = base.coords.at(0);
          // Offsets with t.x inside the support's b-range.
          double blo = S.lo(1) - at * x.at(1);
          double bhi = S.hi(1) - at * x.at(1);
          if (!(bhi > blo)) continue;
          std::size_t cells = offset_cells(bhi - blo, trunc.cells_per_unit);
          double hb = (bhi - blo) / static_cast<double>(cells);
          KahanComplex<double> inner;
          for (std::size_t i = 0; i < cells; ++i) {
            double bt = blo + (static_cast<double>(i) + 0.5) * hb;
            Point y = act(system, affine_scale_atom(m, k, bt), x);
            inner.add(guarded_eval(f, y, singular, &dropped));
          }
          sum.add(inner.value() * hb);
        }
        return sum.value() * du * scale;
      }
      // Window-and-double fallback (also the divergence detector for the
      // improper line action).
      auto windowed = [&](const TruncationPolicy& t) {
        auto atoms = enumerate_group(system.chain, id, t);
        KahanComplex<double> sum;
        bool dropped = false;
        for (const auto& a : atoms) {
          Point y = act(system, a.elem, x);
          sum.add(guarded_eval(f, y, singular, &dropped) * a.weight);
        }
        return sum.value();
      };
      std::complex<double> v1 = windowed(trunc);
      std::complex<double> v2 = windowed(trunc.doubled());
      if (!stabilized(v1, v2, trunc.doubling_tol))
        throw TruncationTooSmall(
            "orbital_integral: affine level sum not stable under window "
            "doubling");
      return v2;
    }

    default:
      throw UnsupportedLevel("orbital_integral: level " + id.describe());
  }
}

std::complex<double> ambient_orbital_integral(const ActionSystem& system,
                                              const Integrand& f,
                                              const Point& x,
                                              const TruncationPolicy& trunc,
                                              SingularPolicy singular) {
  trunc.validate();
  const double scale = system.chain.ambient_scale;
  switch (system.kind) {
    case ActionKind::TorusTranslate:
    case ActionKind::PlaneOnTorus2: {
      // Rotation invariance: the orbit average over one full period is the
      // space average.
      if (auto exact = system.space.exact_integral(f)) return *exact * scale;
      const MeasuredSpace& sp = system.space;
      Integrand shifted = Integrand::custom(
          [&system, &f, x, singular](const Point& t) {
            Point y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
              y[i] = torus_frac(x[i] + t[i]);
            if (f.singular_at(y)) {
              if (singular == SingularPolicy::Error)
                throw SingularHit("ambient quadrature hit the singular point");
              return std::complex<double>{0.0, 0.0};
            }
            return f.eval(y);
          },
          sp.dim, std::nullopt, true, f.is_real());
      std::vector<double> lo(static_cast<std::size_t>(sp.dim), 0.0);
      std::vector<double> hi(static_cast<std::size_t>(sp.dim), 1.0);
      return sp.mu_integral(shifted, BorelRegion::half_open_box(lo, hi),
                            trunc.cells_per_unit) *
             scale;
    }
    case ActionKind::LineTranslate: {
      if (auto exact = system.space.exact_integral(f)) return *exact * scale;
      if (!f.support())
        throw TruncationTooSmall(
            "ambient_orbital_integral: line integrand needs support metadata");
      // Translation invariance: integrate f over its own support.
      return system.space.mu_integral(f, *f.support(), trunc.cells_per_unit) *
             scale;
    }
    case ActionKind::AffineLeftSelf: {
      if (!f.support())
        throw TruncationTooSmall(
            "ambient_orbital_integral: affine integrand needs support "
            "metadata");
      const BorelRegion& S = *f.support();  // chart box
      const double ux = std::log(x.at(0));
      double ulo = S.lo(0) - ux, uhi = S.hi(0) - ux;
      std::size_t ucells = offset_cells(uhi - ulo, trunc.cells_per_unit);
      double hu = (uhi - ulo) / static_cast<double>(ucells);
      KahanComplex<double> sum;
      for (std::size_t i = 0; i < ucells; ++i) {
        double ut = ulo + (static_cast<double>(i) + 0.5) * hu;
        double at = std::exp(ut);
        double blo = S.lo(1) - at * x.at(1);
        double bhi = S.hi(1) - at * x.at(1);
        std::size_t bcells = offset_cells(bhi - blo, trunc.cells_per_unit);
        double hb = (bhi - blo) / static_cast<double>(bcells);
        KahanComplex<double> inner;
        for (std::size_t j = 0; j < bcells; ++j) {
          double bt = blo + (static_cast<double>(j) + 0.5) * hb;
          inner.add(f.eval({at * x.at(0), at * x.at(1) + bt}));
        }
        sum.add(inner.value() * hb);
      }
      return sum.value() * hu * scale;
    }
    case ActionKind::AffineOnLine: {
      // Each scale slice contributes the full line integral of f, so the
      // u-window integral grows without bound; report that honestly.
      if (!f.support())
        throw TruncationTooSmall(
            "ambient_orbital_integral: line integrand needs support metadata");
      auto windowed = [&](double W) {
        return midpoint_1d(
                   [&](double u) {
                     double a = std::exp(u);
                     double blo = f.support()->lo(0) - a * x.at(0);
                     double bhi = f.support()->hi(0) - a * x.at(0);
                     std::size_t cells =
                         offset_cells(bhi - blo, trunc.cells_per_unit);
                     double hb = (bhi - blo) / static_cast<double>(cells);
                     KahanSum<double> inner;
                     for (std::size_t i = 0; i < cells; ++i) {
                       double b = blo + (static_cast<double>(i) + 0.5) * hb;
                       inner.add(f.real_eval({a * x.at(0) + b}));
                     }
                     return inner.value() * hb;
                   },
                   -W, W, offset_cells(2.0 * W, trunc.cells_per_unit)) *
               scale;
      };
      double v1 = windowed(trunc.window);
      double v2 = windowed(2.0 * trunc.window);
      if (!stabilized({v1, 0.0}, {v2, 0.0}, trunc.doubling_tol))
        throw TruncationTooSmall(
            "ambient_orbital_integral: improper action, scale integral "
            "diverges");
      return {v2, 0.0};
    }
    case ActionKind::SymOnCylinder:
      throw UnsupportedLevel(
          "ambient_orbital_integral: counting measure on the union of "
          "finite permutation groups is not summable");
  }
  throw OrbintError("ambient_orbital_integral: unknown action kind");
}

std::complex<double> ratio_average(const ActionSystem& system,
                                   const LevelRef& level, const Integrand& f,
                                   const BorelRegion& B, const Point& x,
                                   const TruncationPolicy& trunc) {
  HittingValue h = hitting_measure(system, level, B, x, trunc);
  if (h.infinite)
    throw TruncationTooSmall("ratio_average: hitting measure diverges");
  if (h.value == 0.0)
    throw ZeroHitting("ratio_average: the orbit never enters the region");
  // Restrict f to B; the window metadata comes from B's bounding box.
  std::vector<double> blo(static_cast<std::size_t>(B.dim()));
  std::vector<double> bhi(static_cast<std::size_t>(B.dim()));
  for (int i = 0; i < B.dim(); ++i)
    B.bounding(i, &blo[static_cast<std::size_t>(i)],
               &bhi[static_cast<std::size_t>(i)]);
  Integrand restricted = Integrand::custom(
      [&f, &B](const Point& y) {
        return B.contains(y) ? f.eval(y) : std::complex<double>{0.0, 0.0};
      },
      B.dim(), BorelRegion::closed_box(blo, bhi), true, f.is_real());
  std::complex<double> num =
      orbital_integral(system, level, restricted, x, trunc);
  return num / h.value;
}

std::complex<double> restricted_average(const ActionSystem& system,
                                        const LevelRef& level,
                                        const Integrand& f,
                                        const BorelRegion& E,
                                        const GroupElement& s,
                                        Rationality s_class, const Point& x,
                                        const TruncationPolicy& trunc) {
  trunc.validate();
  std::vector<double> shift = element_chart(s);
  BorelRegion Es = E.translated(shift, s_class);
  const double scale = system.chain.ambient_scale;

  if (level.is_ambient()) {
    // Rational windows are Lebesgue-null: the ambient side vanishes exactly.
    if (Es.kind() == BorelRegion::Kind::RationalWindow ||
        Es.kind() == BorelRegion::Kind::Empty)
      return {0.0, 0.0};
    if (Es.kind() == BorelRegion::Kind::Union) {
      KahanComplex<double> total;
      for (const auto& part : Es.parts()) {
        // Undo the already-applied shift: integrate over each part directly.
        GroupElement id_elem = identity_element(s.group);
        total.add(restricted_average(system, level, f, part, id_elem,
                                     Rationality::Rational, x, trunc));
      }
      return total.value();
    }
    switch (system.kind) {
      case ActionKind::TorusTranslate: {
        KahanComplex<double> sum;
        std::size_t cells = offset_cells(Es.hi(0) - Es.lo(0),
                                         trunc.cells_per_unit);
        double h = (Es.hi(0) - Es.lo(0)) / static_cast<double>(cells);
        for (std::size_t i = 0; i < cells; ++i) {
          double t = Es.lo(0) + (static_cast<double>(i) + 0.5) * h;
          sum.add(f.eval({torus_frac(x[0] + t)}));
        }
        return sum.value() * h * scale;
      }
      case ActionKind::LineTranslate: {
        KahanComplex<double> sum;
        std::size_t cells = offset_cells(Es.hi(0) - Es.lo(0),
                                         trunc.cells_per_unit);
        double h = (Es.hi(0) - Es.lo(0)) / static_cast<double>(cells);
        for (std::size_t i = 0; i < cells; ++i) {
          double t = Es.lo(0) + (static_cast<double>(i) + 0.5) * h;
          sum.add(f.eval({x[0] + t}));
        }
        return sum.value() * h * scale;
      }
      default:
        throw UnsupportedLevel("restricted_average: unsupported ambient kind");
    }
  }

  const GroupId& id = *level.id;
  switch (id.family) {
    case GroupFamily::FiniteCyclic: {
      KahanComplex<double> sum;
      for (long j = 0; j < id.order; ++j) {
        GroupElement t = cyclic_atom(id.order, j);
        // Atoms live in [0,1); test the circle window modulo 1.
        std::vector<double> c = element_chart(t);
        bool in = Es.contains(c, Rationality::Rational);
        if (!in) {
          c[0] += 1.0;
          in = Es.contains(c, Rationality::Rational);
        }
        if (!in) {
          c[0] -= 2.0;
          in = Es.contains(c, Rationality::Rational);
        }
        if (!in) continue;
        sum.add(f.eval(act(system, t, x)));
      }
      return sum.value() / static_cast<double>(id.order) * scale;
    }
    case GroupFamily::ScaledLattice: {
      std::vector<long> klo(static_cast<std::size_t>(id.dim));
      std::vector<long> khi(static_cast<std::size_t>(id.dim));
      for (int i = 0; i < id.dim; ++i) {
        double blo, bhi;
        Es.bounding(i, &blo, &bhi);
        lattice_axis_range(blo, bhi, 0.0, id.step,
                           &klo[static_cast<std::size_t>(i)],
                           &khi[static_cast<std::size_t>(i)]);
      }
      KahanComplex<double> sum;
      std::vector<long> k = klo;
      while (true) {
        GroupElement t = lattice_atom(id.step, k);
        // Lattice atoms are dyadic rationals: declared class Rational.
        if (Es.contains(t.coords, Rationality::Rational))
          sum.add(f.eval(act(system, t, x)));
        int axis = 0;
        while (axis < id.dim) {
          std::size_t ua = static_cast<std::size_t>(axis);
          if (++k[ua] <= khi[ua]) break;
          k[ua] = klo[ua];
          ++axis;
        }
        if (axis == id.dim) break;
      }
      return sum.value() * std::pow(id.step, id.dim) * scale;
    }
    default:
      throw UnsupportedLevel("restricted_average: level " + id.describe());
  }
}

double maximal_function(const ActionSystem& system, const Integrand& f,
                        const Point& x, std::size_t level_cap,
                        const TruncationPolicy& trunc,
                        SingularPolicy singular) {
  if (!f.is_real())
    throw OrbintError("maximal_function: integrand must be nonnegative real");
  if (level_cap == 0 || system.chain.depth() == 0)
    throw UnsupportedLevel("maximal_function: no levels");
  double best = -std::numeric_limits<double>::infinity();
  std::size_t count = std::min(level_cap, system.chain.depth());
  for (std::size_t i = 0; i < count; ++i) {
    std::complex<double> v =
        orbital_integral(system, system.level(i), f, x, trunc, singular);
    best = std::max(best, v.real());
  }
  return best;
}

FundamentalReduction fundamental_reduce(const GroupChain& chain,
                                        const GroupElement& t,
                                        const BorelRegion& D) {
  if (chain.depth() == 0)
    throw UnsupportedLevel("fundamental_reduce: chain has no levels");
  const GroupId g0 = chain.level(0);
  std::vector<GroupElement> found;
  switch (g0.family) {
    case GroupFamily::ScaledLattice: {
      std::vector<long> klo(static_cast<std::size_t>(g0.dim));
      std::vector<long> khi(static_cast<std::size_t>(g0.dim));
      for (int i = 0; i < g0.dim; ++i) {
        double blo, bhi;
        D.bounding(i, &blo, &bhi);
        lattice_axis_range(blo, bhi, t.coords.at(static_cast<std::size_t>(i)),
                           g0.step, &klo[static_cast<std::size_t>(i)],
                           &khi[static_cast<std::size_t>(i)]);
      }
      std::vector<long> k = klo;
      while (true) {
        GroupElement g = lattice_atom(g0.step, k);
        if (D.contains(compose(g, t).coords)) found.push_back(g);
        int axis = 0;
        while (axis < g0.dim) {
          std::size_t ua = static_cast<std::size_t>(axis);
          if (++k[ua] <= khi[ua]) break;
          k[ua] = klo[ua];
          ++axis;
        }
        if (axis == g0.dim) break;
      }
      break;
    }
    case GroupFamily::FiniteCyclic: {
      for (long j = 0; j < g0.order; ++j) {
        GroupElement g = cyclic_atom(g0.order, j);
        if (D.contains(compose(g, t).coords)) found.push_back(g);
      }
      break;
    }
    default:
      throw NotAFundamentalDomain(
          "fundamental_reduce: unsupported first level " + g0.describe());
  }
  if (found.size() != 1)
    throw NotAFundamentalDomain(
        "fundamental_reduce: found " + std::to_string(found.size()) +
        " reducing elements; the domain is not fundamental for " +
        g0.describe());
  return {found[0], compose(found[0], t)};
}

namespace {

/// Candidate index runs per axis for lattice atoms inside a box domain.
std::vector<std::vector<long>> domain_axis_indices(const GroupId& id,
                                                   const BorelRegion& D) {
  std::vector<std::vector<long>> axes(static_cast<std::size_t>(id.dim));
  for (int i = 0; i < id.dim; ++i) {
    double blo, bhi;
    D.bounding(i, &blo, &bhi);
    long klo, khi;
    lattice_axis_range(blo, bhi, 0.0, id.step, &klo, &khi);
    for (long k = klo; k <= khi; ++k) {
      double v = static_cast<double>(k) * id.step;
      bool inside =
          D.kind() == BorelRegion::Kind::Box
              ? (v >= D.lo(i) && (v < D.hi(i) || (D.closed_hi(i) && v == D.hi(i))))
              : true;
      if (inside) axes[static_cast<std::size_t>(i)].push_back(k);
    }
  }
  return axes;
}

}  // namespace

long lattice_domain_count(const ActionSystem& system, const LevelRef& level,
                          const BorelRegion& D) {
  if (level.is_ambient())
    throw UnsupportedLevel("lattice_domain_count: ambient group is not discrete");
  const GroupId& id = *level.id;
  if (id.family != GroupFamily::ScaledLattice)
    throw UnsupportedLevel("lattice_domain_count: level " + id.describe());
  if (D.kind() == BorelRegion::Kind::Union) {
    long total = 0;
    for (const auto& part : D.parts())
      total += lattice_domain_count(system, level, part);
    return total;
  }
  if (D.kind() != BorelRegion::Kind::Box)
    throw NotAFundamentalDomain("lattice_domain_count: domain must be a box");
  auto axes = domain_axis_indices(id, D);
  long count = 1;
  for (const auto& axis : axes) count *= static_cast<long>(axis.size());
  return count;
}

std::complex<double> lattice_average(const ActionSystem& system,
                                     const LevelRef& level, const Integrand& f,
                                     const BorelRegion& D, const Point& x,
                                     double invariance_tol) {
  if (level.is_ambient())
    throw UnsupportedLevel("lattice_average: ambient group is not discrete");
  const GroupId& id = *level.id;
  if (id.family != GroupFamily::ScaledLattice)
    throw UnsupportedLevel("lattice_average: level " + id.describe());
  if (system.chain.depth() == 0)
    throw UnsupportedLevel("lattice_average: chain has no levels");

  // Spot check invariance of f under the first level.
  const GroupId g0 = system.chain.level(0);
  if (g0.family == GroupFamily::ScaledLattice) {
    std::vector<Point> probes = {x, system.space.sample(7, 0),
                                 system.space.sample(7, 1)};
    for (int axis = 0; axis < g0.dim; ++axis) {
      for (long kk : {1L, -1L}) {
        std::vector<long> kidx(static_cast<std::size_t>(g0.dim), 0);
        kidx[static_cast<std::size_t>(axis)] = kk;
        GroupElement g = lattice_atom(g0.step, kidx);
        for (const auto& p : probes) {
          double dev = std::abs(f.eval(act(system, g, p)) - f.eval(p));
          if (dev > invariance_tol)
            throw OrbintError(
                "lattice_average: integrand is not invariant under the "
                "first level (deviation " +
                std::to_string(dev) + ")");
        }
      }
    }
  }

  if (D.kind() == BorelRegion::Kind::Union) {
    // Weighted combination over the disjoint parts.
    KahanComplex<double> total;
    long count = 0;
    for (const auto& part : D.parts()) {
      long c = lattice_domain_count(system, level, part);
      if (c == 0) continue;
      std::complex<double> avg = lattice_average(system, level, f, part, x,
                                                 invariance_tol);
      total.add(avg * static_cast<double>(c));
      count += c;
    }
    if (count == 0)
      throw EmptyIntersection("lattice_average: level misses the domain");
    return total.value() / static_cast<double>(count);
  }
  if (D.kind() != BorelRegion::Kind::Box)
    throw NotAFundamentalDomain("lattice_average: domain must be a box");

  auto axes = domain_axis_indices(id, D);
  long count = 1;
  for (const auto& axis : axes) count *= static_cast<long>(axis.size());
  if (count == 0)
    throw EmptyIntersection("lattice_average: level misses the domain");

  // Character fast path: the average factorizes per axis, and per-axis
  // root-of-unity runs are accumulated in extended precision.
  if ((f.kind() == Integrand::Kind::Character ||
       f.kind() == Integrand::Kind::TrigPoly) &&
      system.kind == ActionKind::PlaneOnTorus2) {
    KahanComplex<double> total;
    for (const auto& term : f.terms()) {
      std::complex<double> prod{1.0, 0.0};
      for (int axis = 0; axis < id.dim; ++axis) {
        std::size_t ua = static_cast<std::size_t>(axis);
        long m = term.freq.at(ua);
        KahanComplex<double> axis_sum;
        for (long k : axes[ua])
          axis_sum.add(unit_phase(static_cast<long double>(m) *
                                  (static_cast<long double>(x[ua]) +
                                   static_cast<long double>(k) *
                                       static_cast<long double>(id.step))));
        prod *= axis_sum.value() / static_cast<double>(axes[ua].size());
      }
      total.add(term.coeff * prod);
    }
    return total.value();
  }

  KahanComplex<double> sum;
  std::vector<std::size_t> pos(static_cast<std::size_t>(id.dim), 0);
  std::vector<long> k(static_cast<std::size_t>(id.dim));
  while (true) {
    for (int i = 0; i < id.dim; ++i)
      k[static_cast<std::size_t>(i)] =
          axes[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]];
    sum.add(f.eval(act(system, lattice_atom(id.step, k), x)));
    int axis = 0;
    while (axis < id.dim) {
      std::size_t ua = static_cast<std::size_t>(axis);
      if (++pos[ua] < axes[ua].size()) break;
      pos[ua] = 0;
      ++axis;
    }
    if (axis == id.dim) break;
  }
  return sum.value() / static_cast<double>(count);
}

std::complex<double> product_average(const ActionSystem& system,
                                     const LevelRef& level,
                                     const ProductIntegrand& f,
                                     const GroupElement& s, const Point& x,
                                     const TruncationPolicy& trunc) {
  trunc.validate();
  if (level.is_ambient())
    throw UnsupportedLevel("product_average: ambient side not supported");
  const GroupId& id = *level.id;
  const double scale = system.chain.ambient_scale;
  switch (id.family) {
    case GroupFamily::FiniteCyclic: {
      KahanComplex<double> sum;
      for (long j = 0; j < id.order; ++j) {
        GroupElement t = cyclic_atom(id.order, j);
        sum.add(f.space_part.eval(act(system, t, x)) *
                f.group_part.eval(element_chart(compose(t, s))));
      }
      return sum.value() / static_cast<double>(id.order) * scale;
    }
    case GroupFamily::ScaledLattice: {
      // Window: ts must land in the group factor's support (shift by s),
      // intersected with the preimage of the space factor's support.
      std::optional<BorelRegion> gs = f.group_part.support();
      std::optional<BorelRegion> ss = f.space_part.support();
      if (!gs && !ss)
        throw TruncationTooSmall("product_average: needs support metadata");
      std::vector<long> klo(static_cast<std::size_t>(id.dim));
      std::vector<long> khi(static_cast<std::size_t>(id.dim));
      for (int i = 0; i < id.dim; ++i) {
        std::size_t ui = static_cast<std::size_t>(i);
        double lo = -1e300, hi = 1e300;
        if (gs) {
          double blo, bhi;
          gs->bounding(i, &blo, &bhi);
          lo = std::max(lo, blo - s.coords.at(ui));
          hi = std::min(hi, bhi - s.coords.at(ui));
        }
        if (ss && system.kind == ActionKind::LineTranslate) {
          double blo, bhi;
          ss->bounding(i, &blo, &bhi);
          lo = std::max(lo, blo - x[ui]);
          hi = std::min(hi, bhi - x[ui]);
        }
        if (lo > hi) return {0.0, 0.0};
        lattice_axis_range(lo, hi, 0.0, id.step, &klo[ui], &khi[ui]);
      }
      KahanComplex<double> sum;
      std::vector<long> k = klo;
      while (true) {
        GroupElement t = lattice_atom(id.step, k);
        sum.add(f.space_part.eval(act(system, t, x)) *
                f.group_part.eval(element_chart(compose(t, s))));
        int axis = 0;
        while (axis < id.dim) {
          std::size_t ua = static_cast<std::size_t>(axis);
          if (++k[ua] <= khi[ua]) break;
          k[ua] = klo[ua];
          ++axis;
        }
        if (axis == id.dim) break;
      }
      return sum.value() * std::pow(id.step, id.dim) * scale;
    }
    default:
      throw UnsupportedLevel("product_average: level " + id.describe());
  }
}

Trajectory trajectory(const ActionSystem& system, const Integrand& f,
                      const Point& x, const std::vector<ScheduleEntry>& schedule,
                      std::optional<std::complex<double>> reference,
                      const TruncationPolicy& trunc, SingularPolicy singular) {
  if (schedule.empty()) throw OrbintError("trajectory: empty level schedule");
  Trajectory out;
  out.x = x;
  out.labels.reserve(schedule.size());
  out.values.reserve(schedule.size());
  for (const auto& entry : schedule) {
    out.labels.push_back(entry.label);
    out.values.push_back(
        orbital_integral(system, entry.level, f, x, trunc, singular));
  }
  if (reference) {
    out.reference = *reference;
    out.reference_is_ambient = false;
  } else {
    out.reference = ambient_orbital_integral(system, f, x, trunc, singular);
    out.reference_is_ambient = true;
  }
  out.tail_deviation.assign(out.values.size(), 0.0);
  double running = 0.0;
  for (std::size_t i = out.values.size(); i-- > 0;) {
    running = std::max(running, std::abs(out.values[i] - out.reference));
    out.tail_deviation[i] = running;
  }
  return out;
}

}  // namespace orbint
