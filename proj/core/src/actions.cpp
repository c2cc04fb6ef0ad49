#include "orbint/actions.hpp"

#include <algorithm>
#include <cmath>

#include "orbint/quadrature.hpp"

namespace orbint {
namespace {

double torus_frac(double x) {
  double y = x - std::floor(x);
  return y >= 1.0 ? 0.0 : y;
}

void check_dims(const ActionSystem& system) {
  switch (system.kind) {
    case ActionKind::TorusTranslate:
      if (system.space.domain != SpaceDomain::Torus)
        throw OrbintError("ActionSystem: TorusTranslate needs a torus space");
      return;
    case ActionKind::LineTranslate:
      if (system.space.domain != SpaceDomain::RealLine)
        throw OrbintError("ActionSystem: LineTranslate needs a line space");
      return;
    case ActionKind::PlaneOnTorus2:
      if (system.space.domain != SpaceDomain::Torus || system.space.dim != 2)
        throw OrbintError("ActionSystem: PlaneOnTorus2 needs Torus(2)");
      return;
    case ActionKind::AffineLeftSelf:
      if (system.space.domain != SpaceDomain::AffineGroup)
        throw OrbintError("ActionSystem: AffineLeftSelf needs the affine space");
      return;
    case ActionKind::AffineOnLine:
      if (system.space.domain != SpaceDomain::RealLine || system.space.dim != 1)
        throw OrbintError("ActionSystem: AffineOnLine needs RealLine(1)");
      return;
    case ActionKind::SymOnCylinder:
      if (system.space.domain != SpaceDomain::Cylinder)
        throw OrbintError("ActionSystem: SymOnCylinder needs a cylinder space");
      return;
  }
}

Point group_chart(const GroupElement& t) { return element_chart(t, 0); }

/// Exact Lebesgue measure of {t in [-W, W] : frac(x + t) in A} for a 1-D
/// box A inside [0,1): full periods contribute content(A) each, the two
/// fringe pieces are interval intersections.
double periodic_hit_length(double lo, double hi, double x, double W) {
  double len = hi - lo;
  double a = -W, b = W;
  double first = std::ceil(a + x) - x;  // first integer crossing above a
  double full_lo = first;
  double full_hi = std::floor(b + x) - x;
  double total = 0.0;
  long periods = std::lround(full_hi - full_lo);
  if (periods > 0) total += static_cast<double>(periods) * len;
  // fringe [a, full_lo): frac(x+t) sweeps [frac(x+a), 1)
  double fa = torus_frac(x + a);
  total += std::max(0.0, std::min(1.0, hi) - std::max(fa, lo));
  // fringe [full_hi, b): sweeps [0, frac(x+b))
  double fb = torus_frac(x + b);
  total += std::max(0.0, std::min(fb, hi) - lo);
  return total;
}

double box_axis_len(const BorelRegion& B, int axis) {
  return B.hi(axis) - B.lo(axis);
}

}  // namespace

Point act(const ActionSystem& system, const GroupElement& g, const Point& x) {
  check_dims(system);
  if (g.group.ambient() != system.chain.ambient)
    throw MismatchedGroups("act: element of " + g.group.describe() +
                           " does not act through " +
                           system.chain.ambient.describe());
  switch (system.kind) {
    case ActionKind::TorusTranslate:
    case ActionKind::PlaneOnTorus2: {
      if (g.coords.size() != x.size())
        throw OrbintError("act: dimension mismatch");
      Point y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = torus_frac(x[i] + g.coords[i]);
      return y;
    }
    case ActionKind::LineTranslate: {
      if (g.coords.size() != x.size())
        throw OrbintError("act: dimension mismatch");
      Point y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + g.coords[i];
      return y;
    }
    case ActionKind::AffineLeftSelf: {
      if (x.size() != 2 || !(x[0] > 0.0))
        throw OrbintError("act: invalid affine point");
      return {g.coords.at(0) * x[0], g.coords.at(0) * x[1] + g.coords.at(1)};
    }
    case ActionKind::AffineOnLine: {
      if (x.size() != 1) throw OrbintError("act: invalid line point");
      return {g.coords.at(0) * x[0] + g.coords.at(1)};
    }
    case ActionKind::SymOnCylinder: {
      Point y = x;
      GroupElement gi = inverse(g);
      for (std::size_t i = 0; i < g.word.size() && i < x.size(); ++i) {
        // (g.x)_i = x_{g^{-1}(i)}, so composed actions compose correctly.
        std::size_t src = static_cast<std::size_t>(
            i < gi.word.size() ? gi.word[i] : static_cast<int>(i));
        if (src < x.size()) y[i] = x[src];
      }
      return y;
    }
  }
  throw OrbintError("act: unknown action kind");
}

std::complex<double> ProductIntegrand::eval(const Point& x,
                                            const GroupElement& t) const {
  return space_part.eval(x) * group_part.eval(group_chart(t));
}

InvarianceReport relative_invariance_report(
    const ActionSystem& system, const std::vector<GroupElement>& sample_elems,
    const std::vector<Integrand>& panel, double tol,
    std::size_t cells_per_axis) {
  check_dims(system);
  InvarianceReport report;
  report.tol = tol;
  for (const auto& s : sample_elems) {
    double delta = modular_value(system.chain, s);
    for (const auto& f : panel) {
      std::complex<double> lhs, rhs;
      if (system.space.domain == SpaceDomain::Cylinder) {
        // Exchangeable product measure: both sides are exact expectations.
        if (f.kind() != Integrand::Kind::CoordinateLinear &&
            f.kind() != Integrand::Kind::Constant)
          throw OrbintError(
              "relative_invariance_report: cylinder panel must be linear");
        // f(sx) for linear f is the same linear functional with permuted
        // coefficients: (sx)_i = x_{s^{-1}(i)}, so x_j picks up c_{s(j)}.
        // Both expectations are then exact.
        std::vector<double> coeffs(static_cast<std::size_t>(system.space.dim),
                                   0.0);
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
          std::size_t src = static_cast<std::size_t>(
              j < s.word.size() ? s.word[j] : static_cast<int>(j));
          if (src < f.lin_coeffs().size()) coeffs[j] = f.lin_coeffs()[src];
        }
        Integrand permuted = Integrand::coordinate_linear(
            std::move(coeffs), f.lin_constant());
        lhs = *system.space.exact_integral(permuted);
        rhs = delta * *system.space.exact_integral(f);
      } else {
        // Integration window: the support of x -> f(sx), i.e. the preimage
        // of supp f under the action of s, padded one cell.
        if (!f.support())
          throw OrbintError(
              "relative_invariance_report: panel needs support metadata");
        const BorelRegion& S = *f.support();
        BorelRegion window = S;
        switch (system.kind) {
          case ActionKind::TorusTranslate:
          case ActionKind::PlaneOnTorus2: {
            std::vector<double> lo(static_cast<std::size_t>(system.space.dim),
                                   0.0);
            std::vector<double> hi(static_cast<std::size_t>(system.space.dim),
                                   1.0);
            window = BorelRegion::half_open_box(lo, hi);
            break;
          }
          case ActionKind::LineTranslate: {
            std::vector<double> shift(S.dim());
            for (int i = 0; i < S.dim(); ++i)
              shift[static_cast<std::size_t>(i)] =
                  -s.coords.at(static_cast<std::size_t>(i));
            window = S.translated(shift);
            break;
          }
          case ActionKind::AffineLeftSelf: {
            double us = std::log(s.coords.at(0));
            double as = s.coords.at(0);
            double bs = s.coords.at(1);
            window = BorelRegion::closed_box(
                {S.lo(0) - us, std::min((S.lo(1) - bs) / as, (S.hi(1) - bs) / as)},
                {S.hi(0) - us, std::max((S.lo(1) - bs) / as, (S.hi(1) - bs) / as)});
            break;
          }
          case ActionKind::AffineOnLine: {
            double as = s.coords.at(0);
            double bs = s.coords.at(1);
            window = BorelRegion::closed_box(
                {std::min((S.lo(0) - bs) / as, (S.hi(0) - bs) / as)},
                {std::max((S.lo(0) - bs) / as, (S.hi(0) - bs) / as)});
            break;
          }
          case ActionKind::SymOnCylinder:
            throw OrbintError("unreachable");
        }
        Integrand pushed = Integrand::custom(
            [&system, s, f](const Point& x) {
              return f.eval(act(system, s, x));
            },
            system.space.dim, std::nullopt, true, f.is_real());
        lhs = system.space.mu_integral(pushed, window, cells_per_axis);
        BorelRegion base = system.space.domain == SpaceDomain::Torus
                               ? BorelRegion::half_open_box(
                                     std::vector<double>(
                                         static_cast<std::size_t>(
                                             system.space.dim),
                                         0.0),
                                     std::vector<double>(
                                         static_cast<std::size_t>(
                                             system.space.dim),
                                         1.0))
                               : S;
        rhs = delta * system.space.mu_integral(f, base, cells_per_axis);
      }
      double resid = std::abs(lhs - rhs);
      report.residuals.push_back(resid);
      report.max_residual = std::max(report.max_residual, resid);
    }
  }
  report.pass = report.max_residual <= tol;
  return report;
}

namespace {

struct Grid1D {
  std::vector<double> nodes;
  double weight = 0.0;
  static Grid1D over(double lo, double hi, std::size_t cells) {
    Grid1D g;
    g.weight = (hi - lo) / static_cast<double>(cells);
    g.nodes.resize(cells);
    for (std::size_t i = 0; i < cells; ++i)
      g.nodes[i] = lo + (static_cast<double>(i) + 0.5) * g.weight;
    return g;
  }
};

/// Weighted scale samples standing in for the u_t variable: a midpoint grid
/// for the ambient group, the exact scale atoms for a discrete level.
struct ScaleSamples {
  std::vector<double> u;
  std::vector<double> w;
};

ScaleSamples affine_scale_samples(const LevelRef& level, double ulo, double uhi,
                                  std::size_t cells) {
  ScaleSamples s;
  if (level.is_ambient()) {
    Grid1D g = Grid1D::over(ulo, uhi, cells);
    s.u = g.nodes;
    s.w.assign(cells, g.weight);
    return s;
  }
  if (level.id->family != GroupFamily::AffineScaleLevel)
    throw UnsupportedLevel("crucial_identity_report: level " +
                           level.id->describe());
  int m = level.id->scale_level;
  double du = 0.6931471805599453 / static_cast<double>(1L << m);
  long klo = static_cast<long>(std::ceil(ulo / du - 1e-9));
  long khi = static_cast<long>(std::floor(uhi / du + 1e-9));
  for (long k = klo; k <= khi; ++k) {
    s.u.push_back(static_cast<double>(k) * du);
    s.w.push_back(du);
  }
  return s;
}

CrucialIdentityReport identity_affine_self(const ActionSystem& system,
                                           const ProductIntegrand& f,
                                           const LevelRef& level,
                                           std::size_t n_ax, double tol) {
  const Integrand& g = f.space_part;
  const Integrand& h = f.group_part;
  if (!g.support() || !h.support())
    throw OrbintError("crucial_identity_report: parts need support metadata");
  const BorelRegion& S = *g.support();  // chart box of the space part
  const BorelRegion& H = *h.support();  // chart box of the group part
  const double scale = system.chain.ambient_scale;

  auto chart_eval_g = [&g](double u, double b) {
    return g.real_eval({std::exp(u), b});
  };
  auto chart_eval_h = [&h](double u, double b) {
    return h.real_eval({std::exp(u), b});
  };

  ScaleSamples ts = affine_scale_samples(level, H.lo(0), H.hi(0), n_ax);
  Grid1D tb = Grid1D::over(H.lo(1), H.hi(1), n_ax);

  // I2: mu-integral of g times the lambda-integral of h, lambda carrying
  // the modular density exp(-u) in the chart.
  KahanSum<double> gsum;
  {
    Grid1D xu = Grid1D::over(S.lo(0), S.hi(0), n_ax);
    Grid1D xb = Grid1D::over(S.lo(1), S.hi(1), n_ax);
    for (double u : xu.nodes)
      for (double b : xb.nodes)
        gsum.add(chart_eval_g(u, b) * xu.weight * xb.weight);
  }
  KahanSum<double> hlam;
  for (std::size_t i = 0; i < ts.u.size(); ++i)
    for (double b : tb.nodes)
      hlam.add(chart_eval_h(ts.u[i], b) * std::exp(-ts.u[i]) * ts.w[i] *
               tb.weight);
  double i2 = gsum.value() * hlam.value() * scale;

  // I3: same mu-integral of g times the rho-integral of h(t^{-1}); the
  // inverse support is curved, so grid a padded hull and let h vanish
  // smoothly inside it.
  double i3;
  {
    double ulo = -H.hi(0), uhi = -H.lo(0);
    double c1 = -H.hi(1), c2 = -H.lo(1);
    double emin = std::exp(ulo), emax = std::exp(uhi);
    double blo = std::min(std::min(c1 * emin, c1 * emax),
                          std::min(c2 * emin, c2 * emax));
    double bhi = std::max(std::max(c1 * emin, c1 * emax),
                          std::max(c2 * emin, c2 * emax));
    double pad_u = (uhi - ulo) / static_cast<double>(n_ax);
    double pad_b = (bhi - blo) / static_cast<double>(n_ax);
    ScaleSamples iu =
        affine_scale_samples(level, ulo - pad_u, uhi + pad_u, n_ax);
    Grid1D ib = Grid1D::over(blo - pad_b, bhi + pad_b, n_ax);
    KahanSum<double> hinv;
    for (std::size_t i = 0; i < iu.u.size(); ++i) {
      // Chart coordinates of the inverse: (-u, -b e^{-u}).
      double eu = std::exp(-iu.u[i]);
      for (double b : ib.nodes)
        hinv.add(chart_eval_h(-iu.u[i], -b * eu) * iu.w[i] * ib.weight);
    }
    i3 = gsum.value() * hinv.value() * scale;
  }

  // I1: outer rho-integral of h(t) times the inner mu-integral of g(tx),
  // over fixed hull windows so the inner quadrature error genuinely moves
  // with t. Product bumps factor the inner integral axis by axis.
  double i1;
  double xu_lo = S.lo(0) - H.hi(0), xu_hi = S.hi(0) - H.lo(0);
  double alo = std::exp(H.lo(0)), ahi = std::exp(H.hi(0));
  double xb_lo = std::min((S.lo(1) - H.hi(1)) / alo, (S.lo(1) - H.hi(1)) / ahi);
  xb_lo = std::min(xb_lo, std::min((S.lo(1) - H.lo(1)) / alo,
                                   (S.lo(1) - H.lo(1)) / ahi));
  double xb_hi = std::max((S.hi(1) - H.lo(1)) / alo, (S.hi(1) - H.lo(1)) / ahi);
  xb_hi = std::max(xb_hi, std::max((S.hi(1) - H.hi(1)) / alo,
                                   (S.hi(1) - H.hi(1)) / ahi));
  Grid1D xu = Grid1D::over(xu_lo, xu_hi, n_ax);
  Grid1D xb = Grid1D::over(xb_lo, xb_hi, n_ax);
  if (g.is_product_bump()) {
    // U(u_t) = int g_u(u_t + u_x) du_x on the fixed grid.
    std::vector<double> U(ts.u.size(), 0.0);
    for (std::size_t i = 0; i < ts.u.size(); ++i) {
      KahanSum<double> acc;
      for (double ux : xu.nodes)
        acc.add(g.bump_factor(0, ts.u[i] + ux) * xu.weight);
      U[i] = acc.value();
    }
    KahanSum<double> total;
    for (std::size_t i = 0; i < ts.u.size(); ++i) {
      if (U[i] == 0.0) continue;
      double at = std::exp(ts.u[i]);
      for (double bt : tb.nodes) {
        double hv = chart_eval_h(ts.u[i], bt);
        if (hv == 0.0) continue;
        KahanSum<double> inner;
        for (double bx : xb.nodes)
          inner.add(g.bump_factor(1, at * bx + bt) * xb.weight);
        total.add(hv * U[i] * inner.value() * ts.w[i] * tb.weight);
      }
    }
    i1 = total.value() * scale;
  } else {
    KahanSum<double> total;
    for (std::size_t i = 0; i < ts.u.size(); ++i) {
      double at = std::exp(ts.u[i]);
      for (double bt : tb.nodes) {
        double hv = chart_eval_h(ts.u[i], bt);
        if (hv == 0.0) continue;
        KahanSum<double> inner;
        for (double ux : xu.nodes)
          for (double bx : xb.nodes)
            inner.add(chart_eval_g(ts.u[i] + ux, at * bx + bt) * xu.weight *
                      xb.weight);
        total.add(hv * inner.value() * ts.w[i] * tb.weight);
      }
    }
    i1 = total.value() * scale;
  }

  CrucialIdentityReport report;
  report.i1 = i1;
  report.i2 = i2;
  report.i3 = i3;
  report.max_pairwise_gap = std::max(
      {std::abs(i1 - i2), std::abs(i1 - i3), std::abs(i2 - i3)});
  report.tol = tol;
  report.pass = report.max_pairwise_gap <= tol;
  return report;
}

CrucialIdentityReport identity_unimodular_translate(
    const ActionSystem& system, const ProductIntegrand& f,
    const LevelRef& level, std::size_t n_ax, double tol) {
  const Integrand& g = f.space_part;
  const Integrand& h = f.group_part;
  const double scale = system.chain.ambient_scale;
  const bool torus = system.space.domain == SpaceDomain::Torus;
  if (system.space.dim != 1)
    throw OrbintError("crucial_identity_report: 1-D spaces only");

  double slo = 0.0, shi = 1.0, hlo = 0.0, hhi = 1.0;
  if (!torus) {
    if (!g.support() || !h.support())
      throw OrbintError("crucial_identity_report: parts need support metadata");
    slo = g.support()->lo(0);
    shi = g.support()->hi(0);
    hlo = h.support()->lo(0);
    hhi = h.support()->hi(0);
  }

  struct TAtom {
    GroupElement elem;
    double w;
  };
  // The line t-window must cover supp h and its reflection: I3 evaluates
  // h(t^{-1}), so an asymmetric support would otherwise be truncated. The
  // torus keeps its full period.
  const double tlo = torus ? hlo : std::min(hlo, -hhi);
  const double thi = torus ? hhi : std::max(hhi, -hlo);

  std::vector<TAtom> tset;
  if (level.is_ambient()) {
    Grid1D tg = Grid1D::over(tlo, thi, n_ax);
    for (double t : tg.nodes)
      tset.push_back({torus ? torus_point({t}) : line_point({t}),
                      tg.weight * scale});
  } else if (level.id->family == GroupFamily::FiniteCyclic) {
    long n = level.id->order;
    for (long j = 0; j < n; ++j)
      tset.push_back(
          {cyclic_atom(n, j), scale / static_cast<double>(n)});
  } else if (level.id->family == GroupFamily::ScaledLattice) {
    double step = level.id->step;
    long klo = static_cast<long>(std::ceil(tlo / step - 1e-9));
    long khi = static_cast<long>(std::floor(thi / step + 1e-9));
    for (long k = klo; k <= khi; ++k)
      tset.push_back({lattice_atom(step, {k}), step * scale});
  } else {
    throw UnsupportedLevel("crucial_identity_report: level " +
                           level.id->describe());
  }

  Grid1D xg = Grid1D::over(slo, shi, n_ax);
  // Fixed hull window for the composed argument in I1.
  Grid1D xg1 = torus ? xg : Grid1D::over(slo - hhi, shi - hlo, n_ax);

  KahanSum<double> s1, s2, s3;
  for (const auto& t : tset) {
    double tc = t.elem.coords.at(0);
    double h_t = h.real_eval({tc});
    double h_ti = h.real_eval({inverse(t.elem).coords.at(0)});
    if (h_t != 0.0) {
      KahanSum<double> inner;
      for (double x : xg1.nodes) {
        double y = torus ? torus_frac(x + tc) : x + tc;
        inner.add(g.real_eval({y}) * xg1.weight);
      }
      s1.add(h_t * inner.value() * t.w);
    }
    if (h_t != 0.0 || h_ti != 0.0) {
      KahanSum<double> inner;
      for (double x : xg.nodes) inner.add(g.real_eval({x}) * xg.weight);
      // Unimodular: lambda = rho.
      s2.add(h_t * inner.value() * t.w);
      s3.add(h_ti * inner.value() * t.w);
    }
  }

  CrucialIdentityReport report;
  report.i1 = s1.value();
  report.i2 = s2.value();
  report.i3 = s3.value();
  report.max_pairwise_gap =
      std::max({std::abs(report.i1 - report.i2),
                std::abs(report.i1 - report.i3),
                std::abs(report.i2 - report.i3)});
  report.tol = tol;
  report.pass = report.max_pairwise_gap <= tol;
  return report;
}

}  // namespace

CrucialIdentityReport crucial_identity_report(const ActionSystem& system,
                                              const ProductIntegrand& f,
                                              const LevelRef& level,
                                              const TruncationPolicy& trunc,
                                              std::size_t resolution,
                                              double tol) {
  check_dims(system);
  trunc.validate();
  std::size_t n_ax = static_cast<std::size_t>(
      std::max(8.0, std::round(std::sqrt(static_cast<double>(resolution)))));
  switch (system.kind) {
    case ActionKind::AffineLeftSelf:
      return identity_affine_self(system, f, level, n_ax, tol);
    case ActionKind::TorusTranslate:
    case ActionKind::LineTranslate:
      return identity_unimodular_translate(system, f, level, n_ax, tol);
    default:
      throw OrbintError("crucial_identity_report: unsupported action kind");
  }
}

HittingValue hitting_measure(const ActionSystem& system, const LevelRef& level,
                             const BorelRegion& B, const Point& x,
                             const TruncationPolicy& trunc) {
  check_dims(system);
  trunc.validate();
  const double scale = system.chain.ambient_scale;

  if (B.kind() == BorelRegion::Kind::Union) {
    HittingValue total;
    for (const auto& part : B.parts()) {
      HittingValue h = hitting_measure(system, level, part, x, trunc);
      if (h.infinite) return {0.0, true};
      total.value += h.value;
    }
    return total;
  }
  if (B.kind() == BorelRegion::Kind::Empty) return {0.0, false};
  if (B.kind() == BorelRegion::Kind::RationalWindow && level.is_ambient())
    return {0.0, false};  // Lebesgue-null target

  if (!level.is_ambient()) {
    const GroupId& id = *level.id;
    if (!subgroup_leq(id, system.chain.ambient))
      throw MismatchedGroups("hitting_measure: level is not a subgroup");
    switch (id.family) {
      case GroupFamily::FiniteCyclic: {
        long hits = 0;
        for (long j = 0; j < id.order; ++j) {
          Point y = act(system, cyclic_atom(id.order, j), x);
          if (B.contains(y)) ++hits;
        }
        return {scale * static_cast<double>(hits) /
                    static_cast<double>(id.order),
                false};
      }
      case GroupFamily::ScaledLattice: {
        if (system.kind == ActionKind::LineTranslate) {
          // Exact finite count: candidate indices from the bounding box.
          double w = std::pow(id.step, id.dim) * scale;
          std::vector<long> klo(static_cast<std::size_t>(id.dim));
          std::vector<long> khi(static_cast<std::size_t>(id.dim));
          for (int i = 0; i < id.dim; ++i) {
            double blo, bhi;
            B.bounding(i, &blo, &bhi);
            klo[static_cast<std::size_t>(i)] = static_cast<long>(
                std::floor((blo - x[static_cast<std::size_t>(i)]) / id.step)) - 1;
            khi[static_cast<std::size_t>(i)] = static_cast<long>(
                std::ceil((bhi - x[static_cast<std::size_t>(i)]) / id.step)) + 1;
          }
          long hits = 0;
          std::vector<long> k = klo;
          while (true) {
            GroupElement t = lattice_atom(id.step, k);
            if (B.contains(act(system, t, x))) ++hits;
            int axis = 0;
            while (axis < id.dim) {
              if (++k[static_cast<std::size_t>(axis)] <=
                  khi[static_cast<std::size_t>(axis)])
                break;
              k[static_cast<std::size_t>(axis)] =
                  klo[static_cast<std::size_t>(axis)];
              ++axis;
            }
            if (axis == id.dim) break;
          }
          return {w * static_cast<double>(hits), false};
        }
        // Periodic image (PlaneOnTorus2): count within windows and watch
        // for growth under doubling.
        double w = std::pow(id.step, id.dim) * scale;
        double prev = -1.0, prev2 = -1.0, value = 0.0;
        TruncationPolicy t = trunc;
        for (int round = 0; round < 3; ++round) {
          long kmax = static_cast<long>(std::floor(t.window / id.step));
          long hits = 0;
          std::vector<long> k(static_cast<std::size_t>(id.dim), -kmax);
          while (true) {
            if (B.contains(act(system, lattice_atom(id.step, k), x))) ++hits;
            int axis = 0;
            while (axis < id.dim) {
              if (++k[static_cast<std::size_t>(axis)] <= kmax) break;
              k[static_cast<std::size_t>(axis)] = -kmax;
              ++axis;
            }
            if (axis == id.dim) break;
          }
          prev2 = prev;
          prev = value;
          value = w * static_cast<double>(hits);
          t = t.doubled();
        }
        bool diverging = prev2 >= 0.0 && prev > (1.0 + trunc.doubling_tol) * prev2 &&
                         value > (1.0 + trunc.doubling_tol) * prev;
        return {value, diverging};
      }
      case GroupFamily::SymFinite: {
        auto atoms = enumerate_group(system.chain, id, trunc);
        double v = 0.0;
        for (const auto& a : atoms)
          if (B.contains(act(system, a.elem, x))) v += a.weight;
        return {v, false};
      }
      case GroupFamily::AffineScaleLevel: {
        // Exact b-slices: for each scale atom the offsets hitting B form an
        // interval of length |B_b| (self action) or |B| (line action).
        int m = id.scale_level;
        double wk = (0.6931471805599453 / static_cast<double>(1L << m)) * scale;
        if (system.kind == ActionKind::AffineLeftSelf) {
          double ux = std::log(x.at(0));
          long klo = static_cast<long>(std::ceil(
              (B.lo(0) - ux) * static_cast<double>(1L << m) / 0.6931471805599453 -
              1e-9));
          long khi = static_cast<long>(std::floor(
              (B.hi(0) - ux) * static_cast<double>(1L << m) / 0.6931471805599453 +
              1e-9));
          double v = 0.0;
          for (long k = klo; k <= khi; ++k) {
            double uk = static_cast<double>(k) * 0.6931471805599453 /
                        static_cast<double>(1L << m);
            if (uk + ux >= B.lo(0) && uk + ux <= B.hi(0))
              v += wk * box_axis_len(B, 1);
          }
          return {v, false};
        }
        if (system.kind == ActionKind::AffineOnLine) {
          // Every scale index contributes |B|; the total grows linearly in
          // the window, which the doubling test reports as divergence.
          double len = box_axis_len(B, 0);
          double prev = -1.0, prev2 = -1.0, value = 0.0;
          TruncationPolicy t = trunc;
          for (int round = 0; round < 3; ++round) {
            long kmax = static_cast<long>(std::floor(
                t.window * static_cast<double>(1L << m) / 0.6931471805599453));
            prev2 = prev;
            prev = value;
            value = wk * static_cast<double>(2 * kmax + 1) * len;
            t = t.doubled();
          }
          bool diverging = prev > (1.0 + trunc.doubling_tol) * prev2 &&
                           value > (1.0 + trunc.doubling_tol) * prev;
          return {value, diverging};
        }
        throw OrbintError("hitting_measure: unsupported affine level action");
      }
      default:
        throw UnsupportedLevel("hitting_measure: level " + id.describe());
    }
  }

  // Ambient group.
  switch (system.kind) {
    case ActionKind::TorusTranslate: {
      // Rotation preserves arc length; fringes handled exactly.
      if (system.space.dim == 1)
        return {scale * periodic_hit_length(B.lo(0), B.hi(0), x[0], 0.5), false};
      double v = scale;
      for (int i = 0; i < system.space.dim; ++i)
        v *= periodic_hit_length(B.lo(i), B.hi(i),
                                 x[static_cast<std::size_t>(i)], 0.5);
      return {v, false};
    }
    case ActionKind::LineTranslate: {
      // Translation-invariant Lebesgue measure: the hitting set is B - x.
      return {scale * B.content(), false};
    }
    case ActionKind::PlaneOnTorus2: {
      // Periodic image of a plane action: grows with the window area.
      double prev = -1.0, prev2 = -1.0, value = 0.0;
      TruncationPolicy t = trunc;
      for (int round = 0; round < 3; ++round) {
        double v = scale;
        for (int i = 0; i < 2; ++i)
          v *= periodic_hit_length(B.lo(i), B.hi(i),
                                   x[static_cast<std::size_t>(i)], t.window);
        prev2 = prev;
        prev = value;
        value = v;
        t = t.doubled();
      }
      bool diverging = prev > (1.0 + trunc.doubling_tol) * prev2 &&
                       value > (1.0 + trunc.doubling_tol) * prev;
      return {value, diverging};
    }
    case ActionKind::AffineLeftSelf: {
      // {t : tx in B}: u_t fills an interval of length |B_u|, and for each
      // u_t the offsets fill an interval of length |B_b|; Fubini gives the
      // exact product.
      return {scale * box_axis_len(B, 0) * box_axis_len(B, 1), false};
    }
    case ActionKind::AffineOnLine: {
      // For every scale u the offsets hitting B fill an interval of length
      // |B|; the u-integral grows linearly in the window.
      double len = box_axis_len(B, 0);
      double prev = -1.0, prev2 = -1.0, value = 0.0;
      TruncationPolicy t = trunc;
      for (int round = 0; round < 3; ++round) {
        prev2 = prev;
        prev = value;
        value = scale * 2.0 * t.window * len;
        t = t.doubled();
      }
      bool diverging = prev > (1.0 + trunc.doubling_tol) * prev2 &&
                       value > (1.0 + trunc.doubling_tol) * prev;
      return {value, diverging};
    }
    case ActionKind::SymOnCylinder: {
      if (B.kind() == BorelRegion::Kind::All) return {0.0, true};
      throw OrbintError("hitting_measure: unsupported cylinder target");
    }
  }
  throw OrbintError("hitting_measure: unknown action kind");
}

IntegrabilityReport integrability_certificate(
    const ActionSystem& system, const std::vector<BorelRegion>& cover,
    std::size_t sample_size, std::uint64_t seed,
    const TruncationPolicy& trunc) {
  IntegrabilityReport report;
  report.finite_fraction.assign(cover.size(), 0.0);
  if (sample_size == 0) return report;
  for (std::size_t r = 0; r < cover.size(); ++r) {
    std::size_t finite = 0;
    for (std::size_t i = 0; i < sample_size; ++i) {
      Point x = system.space.sample(seed, i);
      HittingValue h =
          hitting_measure(system, LevelRef::ambient(), cover[r], x, trunc);
      if (!h.infinite) ++finite;
    }
    report.finite_fraction[r] =
        static_cast<double>(finite) / static_cast<double>(sample_size);
  }
  report.pass = true;
  for (double fr : report.finite_fraction) report.pass = report.pass && fr == 1.0;
  return report;
}

}  // namespace orbint
