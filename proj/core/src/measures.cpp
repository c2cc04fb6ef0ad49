#include "orbint/measures.hpp"

#include <algorithm>
#include <cmath>

#include "orbint/errors.hpp"
#include "orbint/quadrature.hpp"

namespace orbint {
namespace {

constexpr double kLn2 = 0.6931471805599453;

GroupElement translate(const GroupElement& t, const HaarIntegralSpec& spec) {
  if (!spec.translator) return t;
  return spec.left ? compose(*spec.translator, t)
                   : compose(t, *spec.translator);
}

const BorelRegion& required_support(const TestFunction& phi) {
  if (!phi.support())
    throw OrbintError(
        "haar_integral: non-compact group needs support metadata on the "
        "test function");
  return *phi.support();
}

std::size_t quad_cells(double len, const TruncationPolicy& trunc) {
  double want = len * static_cast<double>(trunc.cells_per_unit);
  if (!std::isfinite(want) || want > double(1u << 22))
    throw QuadratureFailure("haar_integral: window too large");
  return static_cast<std::size_t>(std::max(8.0, std::ceil(want)));
}

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw QuadratureFailure(std::string(what) + ": non-finite value");
  return v;
}

}  // namespace

std::vector<HaarAtom> HaarSpec::atoms(const GroupChain& chain,
                                      const TruncationPolicy& trunc) const {
  if (!level) throw UnsupportedLevel("HaarSpec::atoms: ambient measure has no atoms");
  return enumerate_level(chain, *level, trunc);
}

HaarSpec fell_haar(const GroupChain& chain, std::optional<std::size_t> level) {
  HaarSpec spec;
  spec.level = level;
  spec.norm_constant = chain.ambient_scale;
  if (!level) {
    spec.group = chain.ambient;
    switch (chain.ambient.family) {
      case GroupFamily::Torus:
      case GroupFamily::RealLine:
      case GroupFamily::Affine:
        spec.discrete = false;
        spec.continuous_offset = true;
        spec.atom_weight = chain.ambient_scale;
        return spec;
      case GroupFamily::SymInfinite:
        spec.discrete = true;
        spec.continuous_offset = false;
        spec.atom_weight = chain.ambient_scale;  // counting measure
        return spec;
      default:
        throw UnsupportedLevel("fell_haar: not an ambient family");
    }
  }
  const GroupId id = chain.level(*level);
  spec.group = id;
  spec.discrete = true;
  spec.continuous_offset = id.family == GroupFamily::AffineScaleLevel;
  spec.atom_weight = level_atom_weight(chain, id);
  return spec;
}

double haar_integral(const GroupChain& chain, std::optional<std::size_t> level,
                     const TestFunction& phi, const HaarIntegralSpec& spec,
                     const TruncationPolicy& trunc) {
  trunc.validate();
  const double scale = chain.ambient_scale;
  const GroupId id = level ? chain.level(*level) : chain.ambient;
  const bool delta = spec.modular_density;
  const double hu_shift =
      spec.translator && (id.family == GroupFamily::Affine ||
                          id.family == GroupFamily::AffineScaleLevel)
          ? std::log(spec.translator->coords.at(0))
          : 0.0;

  switch (id.family) {
    case GroupFamily::FiniteCyclic: {
      KahanSum<double> sum;
      for (long j = 0; j < id.order; ++j)
        sum.add(phi.real_eval(element_chart(translate(cyclic_atom(id.order, j), spec))));
      return checked(sum.value() / static_cast<double>(id.order) * scale,
                     "haar_integral");
    }
    case GroupFamily::SymFinite: {
      auto atoms = enumerate_group(chain, id, trunc);
      KahanSum<double> sum;
      for (const auto& a : atoms)
        sum.add(phi.real_eval(
            element_chart(translate(a.elem, spec), phi.dim())));
      return checked(sum.value() * scale, "haar_integral");
    }
    case GroupFamily::ScaledLattice: {
      const BorelRegion& S = required_support(phi);
      std::vector<double> shift(static_cast<std::size_t>(id.dim), 0.0);
      if (spec.translator)
        for (int i = 0; i < id.dim; ++i)
          shift[static_cast<std::size_t>(i)] =
              spec.translator->coords.at(static_cast<std::size_t>(i));
      std::vector<long> klo(static_cast<std::size_t>(id.dim));
      std::vector<long> khi(static_cast<std::size_t>(id.dim));
      for (int i = 0; i < id.dim; ++i) {
        std::size_t ui = static_cast<std::size_t>(i);
        klo[ui] = static_cast<long>(
                      std::floor((S.lo(i) - shift[ui]) / id.step)) - 1;
        khi[ui] = static_cast<long>(
                      std::ceil((S.hi(i) - shift[ui]) / id.step)) + 1;
      }
      KahanSum<double> sum;
      std::vector<long> k = klo;
      while (true) {
        sum.add(phi.real_eval(
            element_chart(translate(lattice_atom(id.step, k), spec))));
        int axis = 0;
        while (axis < id.dim) {
          std::size_t ua = static_cast<std::size_t>(axis);
          if (++k[ua] <= khi[ua]) break;
          k[ua] = klo[ua];
          ++axis;
        }
        if (axis == id.dim) break;
      }
      return checked(sum.value() * std::pow(id.step, id.dim) * scale,
                     "haar_integral");
    }
    case GroupFamily::AffineScaleLevel: {
      const BorelRegion& S = required_support(phi);
      int m = id.scale_level;
      const double du = kLn2 / static_cast<double>(1L << m);
      long klo = static_cast<long>(
          std::floor((S.lo(0) - hu_shift) / du)) - 1;
      long khi = static_cast<long>(
          std::ceil((S.hi(0) - hu_shift) / du)) + 1;
      KahanSum<double> sum;
      for (long k = klo; k <= khi; ++k) {
        double ak = std::exp2(static_cast<double>(k) /
                              static_cast<double>(1L << m));
        // Offset window: preimage of the support's b-range under the
        // translated argument.
        double blo = S.lo(1), bhi = S.hi(1);
        if (spec.translator) {
          double ah = spec.translator->coords.at(0);
          double bh = spec.translator->coords.at(1);
          if (spec.left) {
            blo = (S.lo(1) - bh) / ah;
            bhi = (S.hi(1) - bh) / ah;
          } else {
            blo = S.lo(1) - ak * bh;
            bhi = S.hi(1) - ak * bh;
          }
          if (blo > bhi) std::swap(blo, bhi);
        }
        std::size_t cells = quad_cells(bhi - blo, trunc);
        double hb = (bhi - blo) / static_cast<double>(cells);
        double w = delta ? 1.0 / ak : 1.0;
        KahanSum<double> inner;
        for (std::size_t i = 0; i < cells; ++i) {
          double b = blo + (static_cast<double>(i) + 0.5) * hb;
          inner.add(phi.real_eval(
              element_chart(translate(affine_scale_atom(m, k, b), spec))));
        }
        sum.add(inner.value() * hb * w);
      }
      return checked(sum.value() * (kLn2 / static_cast<double>(1L << m)) * scale,
                     "haar_integral");
    }
    case GroupFamily::Torus: {
      std::size_t cells = static_cast<std::size_t>(trunc.cells_per_unit);
      KahanSum<double> sum;
      if (id.dim == 1) {
        for (std::size_t i = 0; i < cells; ++i) {
          double t = (static_cast<double>(i) + 0.5) / static_cast<double>(cells);
          sum.add(phi.real_eval(element_chart(translate(torus_point({t}), spec))));
        }
        return checked(sum.value() / static_cast<double>(cells) * scale,
                       "haar_integral");
      }
      if (id.dim != 2)
        throw UnsupportedLevel("haar_integral: torus dim > 2");
      for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t j = 0; j < cells; ++j) {
          double t0 = (static_cast<double>(i) + 0.5) / static_cast<double>(cells);
          double t1 = (static_cast<double>(j) + 0.5) / static_cast<double>(cells);
          sum.add(phi.real_eval(
              element_chart(translate(torus_point({t0, t1}), spec))));
        }
      return checked(
          sum.value() / static_cast<double>(cells * cells) * scale,
          "haar_integral");
    }
    case GroupFamily::RealLine: {
      const BorelRegion& S = required_support(phi);
      std::vector<double> lo(static_cast<std::size_t>(id.dim));
      std::vector<double> hi(static_cast<std::size_t>(id.dim));
      std::vector<std::size_t> cells(static_cast<std::size_t>(id.dim));
      double cellw = scale;
      for (int i = 0; i < id.dim; ++i) {
        std::size_t ui = static_cast<std::size_t>(i);
        double shift = spec.translator ? spec.translator->coords.at(ui) : 0.0;
        lo[ui] = S.lo(i) - shift;
        hi[ui] = S.hi(i) - shift;
        cells[ui] = quad_cells(hi[ui] - lo[ui], trunc);
        cellw *= (hi[ui] - lo[ui]) / static_cast<double>(cells[ui]);
      }
      KahanSum<double> sum;
      std::vector<std::size_t> idx(static_cast<std::size_t>(id.dim), 0);
      std::vector<double> t(static_cast<std::size_t>(id.dim));
      while (true) {
        for (int i = 0; i < id.dim; ++i) {
          std::size_t ui = static_cast<std::size_t>(i);
          t[ui] = lo[ui] + (static_cast<double>(idx[ui]) + 0.5) *
                               (hi[ui] - lo[ui]) /
                               static_cast<double>(cells[ui]);
        }
        sum.add(phi.real_eval(element_chart(translate(line_point(t), spec))));
        int axis = 0;
        while (axis < id.dim) {
          std::size_t ua = static_cast<std::size_t>(axis);
          if (++idx[ua] < cells[ua]) break;
          idx[ua] = 0;
          ++axis;
        }
        if (axis == id.dim) break;
      }
      return checked(sum.value() * cellw, "haar_integral");
    }
    case GroupFamily::Affine: {
      const BorelRegion& S = required_support(phi);
      double ulo = S.lo(0) - hu_shift, uhi = S.hi(0) - hu_shift;
      std::size_t ucells = quad_cells(uhi - ulo, trunc);
      double hu = (uhi - ulo) / static_cast<double>(ucells);
      KahanSum<double> sum;
      for (std::size_t i = 0; i < ucells; ++i) {
        double u = ulo + (static_cast<double>(i) + 0.5) * hu;
        double a = std::exp(u);
        double blo = S.lo(1), bhi = S.hi(1);
        if (spec.translator) {
          double ah = spec.translator->coords.at(0);
          double bh = spec.translator->coords.at(1);
          if (spec.left) {
            blo = (S.lo(1) - bh) / ah;
            bhi = (S.hi(1) - bh) / ah;
          } else {
            blo = S.lo(1) - a * bh;
            bhi = S.hi(1) - a * bh;
          }
          if (blo > bhi) std::swap(blo, bhi);
        }
        std::size_t bcells = quad_cells(bhi - blo, trunc);
        double hb = (bhi - blo) / static_cast<double>(bcells);
        double w = delta ? 1.0 / a : 1.0;
        KahanSum<double> inner;
        for (std::size_t j = 0; j < bcells; ++j) {
          double b = blo + (static_cast<double>(j) + 0.5) * hb;
          inner.add(phi.real_eval(
              element_chart(translate(affine_element(a, b), spec))));
        }
        sum.add(inner.value() * hb * w);
      }
      return checked(sum.value() * hu * scale, "haar_integral");
    }
    case GroupFamily::SymInfinite:
      throw UnsupportedLevel(
          "haar_integral: counting measure on the full union is not "
          "summable");
  }
  throw UnsupportedLevel("haar_integral: unknown family");
}

FellReport fell_convergence_report(const GroupChain& chain,
                                   std::size_t first_level,
                                   std::size_t last_level,
                                   const std::vector<TestFunction>& panel,
                                   const TruncationPolicy& trunc, double tol) {
  if (panel.empty()) throw OrbintError("fell_convergence_report: empty panel");
  if (last_level < first_level || last_level >= chain.depth())
    throw UnsupportedLevel("fell_convergence_report: bad level range");
  FellReport report;
  report.first_level = first_level;
  report.tol = tol;
  std::vector<double> ambient(panel.size());
  for (std::size_t p = 0; p < panel.size(); ++p)
    ambient[p] = haar_integral(chain, std::nullopt, panel[p], {}, trunc);
  for (std::size_t l = first_level; l <= last_level; ++l) {
    std::vector<double> devs(panel.size());
    double level_max = 0.0;
    for (std::size_t p = 0; p < panel.size(); ++p) {
      double v = haar_integral(chain, l, panel[p], {}, trunc);
      devs[p] = std::abs(v - ambient[p]);
      if (!std::isfinite(devs[p]))
        throw QuadratureFailure("fell_convergence_report: non-finite deviation");
      level_max = std::max(level_max, devs[p]);
    }
    report.deviations.push_back(std::move(devs));
    report.per_level_max.push_back(level_max);
  }
  report.final_max = report.per_level_max.back();
  report.tail_nonincreasing = true;
  for (std::size_t l = 1; l < report.per_level_max.size(); ++l)
    if (report.per_level_max[l] > 2.0 * report.per_level_max[l - 1] + 1e-15)
      report.tail_nonincreasing = false;
  report.pass = report.final_max <= tol;
  return report;
}

RightInvarianceReport haar_right_invariance_report(
    const GroupChain& chain, std::optional<std::size_t> level,
    const std::vector<GroupElement>& translators,
    const std::vector<TestFunction>& panel, const TruncationPolicy& trunc,
    double tol) {
  RightInvarianceReport report;
  report.tol = tol;
  for (const auto& phi : panel) {
    double base = haar_integral(chain, level, phi, {}, trunc);
    for (const auto& h : translators) {
      HaarIntegralSpec spec;
      spec.translator = h;
      double shifted = haar_integral(chain, level, phi, spec, trunc);
      report.max_residual =
          std::max(report.max_residual, std::abs(shifted - base));
    }
  }
  report.pass = report.max_residual <= tol;
  return report;
}

ModularConditionReport modular_condition_report(
    const GroupChain& chain, std::size_t level,
    const std::vector<GroupElement>& translators,
    const std::vector<TestFunction>& panel, const TruncationPolicy& trunc,
    double tol) {
  ModularConditionReport report;
  report.tol = tol;
  for (const auto& phi : panel) {
    HaarIntegralSpec base_spec;
    base_spec.modular_density = true;
    double base = haar_integral(chain, level, phi, base_spec, trunc);
    for (const auto& h : translators) {
      HaarIntegralSpec spec;
      spec.translator = h;
      spec.left = true;
      spec.modular_density = true;
      double shifted = haar_integral(chain, level, phi, spec, trunc);
      double resid = std::abs(shifted - base);
      report.residuals.push_back(resid);
      report.max_residual = std::max(report.max_residual, resid);
    }
  }
  report.pass = report.max_residual <= tol;
  return report;
}

ModularConditionReport modular_condition_report(
    const GroupChain& chain, std::size_t level,
    const std::vector<TestFunction>& panel, const TruncationPolicy& trunc,
    double tol) {
  return modular_condition_report(
      chain, level, default_translators(chain, chain.level(level), trunc),
      panel, trunc, tol);
}

std::vector<TestFunction> default_test_panel(const GroupId& group) {
  switch (group.family) {
    case GroupFamily::Torus:
    case GroupFamily::FiniteCyclic:
      return {TestFunction::bump({0.35}, {0.2}, 1),
              TestFunction::bump({0.62}, {0.25}, 2),
              TestFunction::bump({0.5}, {0.3}, 0)};
    case GroupFamily::RealLine:
    case GroupFamily::ScaledLattice: {
      std::size_t d = static_cast<std::size_t>(group.dim);
      auto vec = [d](double v) { return std::vector<double>(d, v); };
      return {TestFunction::bump(vec(0.3), vec(1.0), 1),
              TestFunction::bump(vec(-0.4), vec(0.75), 2),
              TestFunction::bump(vec(0.0), vec(1.5), 0)};
    }
    case GroupFamily::Affine:
    case GroupFamily::AffineScaleLevel:
      return {TestFunction::bump({0.2, 0.1}, {0.9, 0.8}, 2),
              TestFunction::bump({-0.3, 0.4}, {0.7, 0.6}, 1),
              TestFunction::bump({0.0, 0.0}, {1.1, 1.0}, 0)};
    case GroupFamily::SymInfinite:
    case GroupFamily::SymFinite:
      return {TestFunction::bump({1.0}, {1.3}, 1),
              TestFunction::bump({2.0}, {2.2}, 2),
              TestFunction::bump({0.5}, {1.1}, 0)};
  }
  throw UnsupportedLevel("default_test_panel: unknown family");
}

std::vector<GroupElement> default_translators(const GroupChain& chain,
                                              const GroupId& level_id,
                                              const TruncationPolicy& trunc) {
  (void)trunc;
  (void)chain;
  switch (level_id.family) {
    case GroupFamily::FiniteCyclic: {
      long n = level_id.order;
      std::vector<GroupElement> out;
      for (long j : {1L, n / 4, n / 2, (3 * n) / 4, n - 1})
        out.push_back(cyclic_atom(n, ((j % n) + n) % n));
      return out;
    }
    case GroupFamily::ScaledLattice: {
      std::vector<GroupElement> out;
      for (long k : {1L, -1L, 2L, -2L, 3L}) {
        std::vector<long> idx(static_cast<std::size_t>(level_id.dim), 0);
        idx[0] = k;
        out.push_back(lattice_atom(level_id.step, idx));
      }
      return out;
    }
    case GroupFamily::SymFinite: {
      long n = level_id.order;
      if (n < 3)
        throw UnsupportedLevel("default_translators: need degree >= 3");
      auto swap01 = perm_element(n, [n] {
        std::vector<int> im(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) im[static_cast<std::size_t>(i)] = static_cast<int>(i);
        std::swap(im[0], im[1]);
        return im;
      }());
      auto swap12 = perm_element(n, [n] {
        std::vector<int> im(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) im[static_cast<std::size_t>(i)] = static_cast<int>(i);
        std::swap(im[1], im[2]);
        return im;
      }());
      auto swap02 = perm_element(n, [n] {
        std::vector<int> im(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) im[static_cast<std::size_t>(i)] = static_cast<int>(i);
        std::swap(im[0], im[2]);
        return im;
      }());
      auto cycle = perm_element(n, [n] {
        std::vector<int> im(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i)
          im[static_cast<std::size_t>(i)] = static_cast<int>((i + 1) % n);
        return im;
      }());
      auto reverse = perm_element(n, [n] {
        std::vector<int> im(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i)
          im[static_cast<std::size_t>(i)] = static_cast<int>(n - 1 - i);
        return im;
      }());
      return {swap01, swap12, swap02, cycle, reverse};
    }
    case GroupFamily::AffineScaleLevel: {
      int m = level_id.scale_level;
      return {affine_scale_atom(m, 1, 0.3), affine_scale_atom(m, -1, -0.2),
              affine_scale_atom(m, 2, 0.5), affine_scale_atom(m, 0, 0.7),
              affine_scale_atom(m, -2, -0.4)};
    }
    case GroupFamily::Torus: {
      return {torus_point({0.1}), torus_point({0.25}), torus_point({0.4}),
              torus_point({0.55}), torus_point({0.7})};
    }
    case GroupFamily::RealLine: {
      std::size_t d = static_cast<std::size_t>(level_id.dim);
      std::vector<GroupElement> out;
      for (double v : {0.3, -0.45, 0.8, -1.1, 0.6})
        out.push_back(line_point(std::vector<double>(d, v)));
      return out;
    }
    case GroupFamily::Affine: {
      return {affine_element(1.3, 0.2), affine_element(0.7, -0.4),
              affine_element(2.1, 0.5), affine_element(0.5, 0.1),
              affine_element(1.0, -0.8)};
    }
    default:
      throw UnsupportedLevel("default_translators: unknown family");
  }
}

}  // namespace orbint
