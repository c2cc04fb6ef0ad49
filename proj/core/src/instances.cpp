#include "orbint/instances.hpp"

#include <algorithm>
#include <cmath>

namespace orbint {
namespace {

void require_range(long lo, long hi, const char* what) {
  if (lo > hi) throw OrbintError(std::string(what) + ": empty level range");
}

}  // namespace

ActionSystem torus_dyadic_system(int k_lo, int k_hi) {
  require_range(k_lo, k_hi, "torus_dyadic_system");
  if (k_lo < 0 || k_hi > 24)
    throw OrbintError("torus_dyadic_system: exponents must lie in [0, 24]");
  std::vector<GroupId> levels;
  for (int k = k_lo; k <= k_hi; ++k)
    levels.push_back(GroupId::finite_cyclic(1L << k));
  ActionSystem system;
  system.chain = make_chain(GroupId::torus(1), std::move(levels));
  system.space = MeasuredSpace::torus(1);
  system.kind = ActionKind::TorusTranslate;
  return system;
}

ActionSystem line_dyadic_system(int n_lo, int n_hi) {
  require_range(n_lo, n_hi, "line_dyadic_system");
  if (n_lo < 0 || n_hi > 30)
    throw OrbintError("line_dyadic_system: exponents must lie in [0, 30]");
  std::vector<GroupId> levels;
  for (int n = n_lo; n <= n_hi; ++n)
    levels.push_back(GroupId::scaled_lattice(std::ldexp(1.0, -n), 1));
  ActionSystem system;
  system.chain = make_chain(GroupId::real_line(1), std::move(levels));
  system.space = MeasuredSpace::real_line(1);
  system.kind = ActionKind::LineTranslate;
  return system;
}

ActionSystem plane_dyadic_system(int n_lo, int n_hi) {
  require_range(n_lo, n_hi, "plane_dyadic_system");
  if (n_lo < 0 || n_hi > 15)
    throw OrbintError("plane_dyadic_system: exponents must lie in [0, 15]");
  std::vector<GroupId> levels;
  for (int n = n_lo; n <= n_hi; ++n)
    levels.push_back(GroupId::scaled_lattice(std::ldexp(1.0, -n), 2));
  ActionSystem system;
  system.chain = make_chain(GroupId::real_line(2), std::move(levels));
  system.space = MeasuredSpace::torus(2);
  system.kind = ActionKind::PlaneOnTorus2;
  return system;
}

ActionSystem affine_self_system(int m_lo, int m_hi) {
  require_range(m_lo, m_hi, "affine_self_system");
  if (m_lo < 0 || m_hi > 12)
    throw OrbintError("affine_self_system: resolutions must lie in [0, 12]");
  std::vector<GroupId> levels;
  for (int m = m_lo; m <= m_hi; ++m)
    levels.push_back(GroupId::affine_scale_level(m));
  ActionSystem system;
  system.chain = make_chain(GroupId::affine(), std::move(levels));
  system.space = MeasuredSpace::affine_group();
  system.kind = ActionKind::AffineLeftSelf;
  return system;
}

ActionSystem affine_line_system(int m_lo, int m_hi) {
  require_range(m_lo, m_hi, "affine_line_system");
  std::vector<GroupId> levels;
  for (int m = m_lo; m <= m_hi; ++m)
    levels.push_back(GroupId::affine_scale_level(m));
  ActionSystem system;
  system.chain = make_chain(GroupId::affine(), std::move(levels));
  system.space = MeasuredSpace::real_line(1);
  system.kind = ActionKind::AffineOnLine;
  return system;
}

ActionSystem cylinder_sym_system(std::vector<long> degrees, double p,
                                 int length) {
  if (degrees.empty())
    throw OrbintError("cylinder_sym_system: no permutation degrees");
  if (!std::is_sorted(degrees.begin(), degrees.end()))
    throw OrbintError("cylinder_sym_system: degrees must increase");
  if (p <= 0.0 || p >= 1.0)
    throw OrbintError("cylinder_sym_system: p must lie in (0, 1)");
  const long max_degree = degrees.back();
  if (length == 0) length = static_cast<int>(max_degree);
  if (length < max_degree)
    throw OrbintError(
        "cylinder_sym_system: word length below the largest degree");
  std::vector<GroupId> levels;
  for (long n : degrees) levels.push_back(GroupId::sym_finite(n));
  ActionSystem system;
  system.chain = make_chain(GroupId::sym_infinite(), std::move(levels));
  system.space = MeasuredSpace::cylinder(length, p);
  system.kind = ActionKind::SymOnCylinder;
  system.probability_levels = true;
  return system;
}

std::vector<ScheduleEntry> chain_schedule(const ActionSystem& system) {
  std::vector<ScheduleEntry> out;
  for (std::size_t i = 0; i < system.chain.depth(); ++i) {
    const GroupId& id = system.chain.level(i);
    long label = 0;
    switch (id.family) {
      case GroupFamily::FiniteCyclic:
      case GroupFamily::SymFinite:
        label = id.order;
        break;
      case GroupFamily::ScaledLattice:
        label = std::lround(-std::log2(id.step));
        break;
      case GroupFamily::AffineScaleLevel:
        label = id.scale_level;
        break;
      default:
        label = static_cast<long>(i);
    }
    out.push_back({label, system.level(i)});
  }
  return out;
}

std::vector<ScheduleEntry> cyclic_schedule(long n_lo, long n_hi) {
  require_range(n_lo, n_hi, "cyclic_schedule");
  if (n_lo < 1) throw OrbintError("cyclic_schedule: orders start at 1");
  std::vector<ScheduleEntry> out;
  out.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
  for (long n = n_lo; n <= n_hi; ++n)
    out.push_back({n, LevelRef::group(GroupId::finite_cyclic(n))});
  return out;
}

ScheduleSpec parse_schedule_spec(const std::string& expr) {
  const auto colon = expr.find(':');
  const auto dots = expr.find("..");
  if (colon == std::string::npos || dots == std::string::npos ||
      dots < colon + 1)
    throw ConfigError("schedule expression must look like kind:lo..hi, got '" +
                      expr + "'");
  ScheduleSpec spec;
  spec.kind = expr.substr(0, colon);
  try {
    std::size_t used = 0;
    std::string lo_text = expr.substr(colon + 1, dots - colon - 1);
    spec.lo = std::stol(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument("lo");
    std::string hi_text = expr.substr(dots + 2);
    spec.hi = std::stol(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument("hi");
  } catch (const std::exception&) {
    throw ConfigError("schedule bounds must be integers, got '" + expr + "'");
  }
  if (spec.kind.empty())
    throw ConfigError("schedule kind must be nonempty, got '" + expr + "'");
  if (spec.lo > spec.hi)
    throw ConfigError("schedule range is empty in '" + expr + "'");
  return spec;
}

}  // namespace orbint
