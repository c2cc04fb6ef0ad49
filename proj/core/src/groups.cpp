#include "orbint/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace orbint {
namespace {

constexpr double kLn2 = 0.69314718055994530941723212145818;

double torus_frac(double x) {
  double y = x - std::floor(x);
  return y >= 1.0 ? 0.0 : y;  // floor rounding can land exactly on 1
}

bool is_perm_word(const std::vector<int>& word) {
  std::vector<bool> seen(word.size(), false);
  for (int v : word) {
    if (v < 0 || static_cast<std::size_t>(v) >= word.size()) return false;
    if (seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

void trim_word(std::vector<int>& word) {
  while (!word.empty() && word.back() == static_cast<int>(word.size()) - 1)
    word.pop_back();
}

int word_image(const std::vector<int>& word, int i) {
  return (i >= 0 && static_cast<std::size_t>(i) < word.size())
             ? word[static_cast<std::size_t>(i)]
             : i;
}

double canonical_cyclic_coord(long n, long j) {
  j %= n;
  if (j < 0) j += n;
  return static_cast<double>(j) / static_cast<double>(n);
}

double canonical_scale(int m, long k) {
  return std::exp2(static_cast<double>(k) /
                   static_cast<double>(1L << m));
}

/// Index of a torus coordinate in {j/n}, or -1 when it is not a canonical
/// atom value. Canonical atoms round-trip bitwise.
long cyclic_index_of(long n, double x) {
  if (!(x >= 0.0) || !(x < 1.0)) return -1;
  long j = std::lround(x * static_cast<double>(n));
  j %= n;
  if (j < 0) j += n;
  if (canonical_cyclic_coord(n, j) == x) return j;
  return -1;
}

bool lattice_index_of(double step, double x, long* out) {
  double q = x / step;
  if (!std::isfinite(q) || std::abs(q) > 9.0e15) return false;
  long k = std::llround(q);
  if (static_cast<double>(k) * step != x) return false;
  *out = k;
  return true;
}

bool scale_index_of(int m, double a, long* out) {
  if (!(a > 0.0) || !std::isfinite(a)) return false;
  double q = std::log2(a) * static_cast<double>(1L << m);
  if (std::abs(q) > 9.0e15) return false;
  long k = std::llround(q);
  if (canonical_scale(m, k) != a) return false;
  *out = k;
  return true;
}

[[noreturn]] void mismatch(const GroupId& a, const GroupId& b,
                           const char* where) {
  throw MismatchedGroups(std::string(where) + ": incompatible groups " +
                         a.describe() + " and " + b.describe());
}

/// Smallest stored id containing both operands: one of the two tags when
/// they are comparable, otherwise their common ambient group.
GroupId join_id(const GroupId& a, const GroupId& b, const char* where) {
  if (subgroup_leq(a, b)) return b;
  if (subgroup_leq(b, a)) return a;
  if (a.ambient() == b.ambient()) return a.ambient();
  mismatch(a, b, where);
}

void require_coords(const GroupElement& g, std::size_t n, const char* where) {
  if (g.coords.size() != n)
    throw OrbintError(std::string(where) + ": element of " +
                      g.group.describe() + " must carry " + std::to_string(n) +
                      " coordinates");
}

}  // namespace

GroupId GroupId::torus(int d) {
  GroupId id;
  id.family = GroupFamily::Torus;
  id.dim = d;
  return id;
}

GroupId GroupId::real_line(int d) {
  GroupId id;
  id.family = GroupFamily::RealLine;
  id.dim = d;
  return id;
}

GroupId GroupId::affine() {
  GroupId id;
  id.family = GroupFamily::Affine;
  id.dim = 2;
  return id;
}

GroupId GroupId::sym_infinite() {
  GroupId id;
  id.family = GroupFamily::SymInfinite;
  id.dim = 0;
  return id;
}

GroupId GroupId::finite_cyclic(long n) {
  if (n <= 0) throw OrbintError("finite_cyclic: order must be positive");
  GroupId id;
  id.family = GroupFamily::FiniteCyclic;
  id.dim = 1;
  id.order = n;
  return id;
}

GroupId GroupId::scaled_lattice(double step, int d) {
  if (!(step > 0.0)) throw OrbintError("scaled_lattice: step must be positive");
  if (d <= 0) throw OrbintError("scaled_lattice: dimension must be positive");
  GroupId id;
  id.family = GroupFamily::ScaledLattice;
  id.dim = d;
  id.step = step;
  return id;
}

GroupId GroupId::sym_finite(long n) {
  if (n <= 0) throw OrbintError("sym_finite: degree must be positive");
  GroupId id;
  id.family = GroupFamily::SymFinite;
  id.dim = 0;
  id.order = n;
  return id;
}

GroupId GroupId::affine_scale_level(int m) {
  if (m < 0) throw OrbintError("affine_scale_level: level must be >= 0");
  GroupId id;
  id.family = GroupFamily::AffineScaleLevel;
  id.dim = 2;
  id.scale_level = m;
  return id;
}

bool GroupId::operator==(const GroupId& o) const {
  if (family != o.family) return false;
  switch (family) {
    case GroupFamily::Torus:
    case GroupFamily::RealLine:
      return dim == o.dim;
    case GroupFamily::Affine:
    case GroupFamily::SymInfinite:
      return true;
    case GroupFamily::FiniteCyclic:
    case GroupFamily::SymFinite:
      return order == o.order;
    case GroupFamily::ScaledLattice:
      return dim == o.dim && step == o.step;
    case GroupFamily::AffineScaleLevel:
      return scale_level == o.scale_level;
  }
  return false;
}

GroupId GroupId::ambient() const {
  switch (family) {
    case GroupFamily::Torus:
    case GroupFamily::RealLine:
    case GroupFamily::Affine:
    case GroupFamily::SymInfinite:
      return *this;
    case GroupFamily::FiniteCyclic:
      return torus(1);
    case GroupFamily::ScaledLattice:
      return real_line(dim);
    case GroupFamily::SymFinite:
      return sym_infinite();
    case GroupFamily::AffineScaleLevel:
      return affine();
  }
  return *this;
}

std::string GroupId::describe() const {
  std::ostringstream os;
  switch (family) {
    case GroupFamily::Torus:
      os << "Torus(" << dim << ")";
      break;
    case GroupFamily::RealLine:
      os << "RealLine(" << dim << ")";
      break;
    case GroupFamily::Affine:
      os << "Affine";
      break;
    case GroupFamily::SymInfinite:
      os << "SymInfinite";
      break;
    case GroupFamily::FiniteCyclic:
      os << "FiniteCyclic(" << order << ")";
      break;
    case GroupFamily::ScaledLattice:
      os << "ScaledLattice(" << step << ", d=" << dim << ")";
      break;
    case GroupFamily::SymFinite:
      os << "SymFinite(" << order << ")";
      break;
    case GroupFamily::AffineScaleLevel:
      os << "AffineScaleLevel(" << scale_level << ")";
      break;
  }
  return os.str();
}

bool subgroup_leq(const GroupId& sub, const GroupId& sup) {
  if (sub == sup) return true;
  if (sub.ambient() != sup.ambient()) return false;
  if (sup.is_ambient()) return true;
  if (sub.is_ambient()) return false;
  switch (sub.family) {
    case GroupFamily::FiniteCyclic:
      return sup.family == GroupFamily::FiniteCyclic &&
             sup.order % sub.order == 0;
    case GroupFamily::ScaledLattice: {
      if (sup.family != GroupFamily::ScaledLattice || sup.dim != sub.dim)
        return false;
      // sub.step must be an integer multiple of sup.step, exactly.
      double q = sub.step / sup.step;
      if (!(q >= 1.0) || q > 9.0e15) return false;
      long r = std::llround(q);
      return static_cast<double>(r) * sup.step == sub.step;
    }
    case GroupFamily::SymFinite:
      return sup.family == GroupFamily::SymFinite && sub.order <= sup.order;
    case GroupFamily::AffineScaleLevel:
      return sup.family == GroupFamily::AffineScaleLevel &&
             sub.scale_level <= sup.scale_level;
    default:
      return false;
  }
}

GroupElement identity_element(const GroupId& id) {
  GroupElement g;
  g.group = id;
  switch (id.family) {
    case GroupFamily::Torus:
    case GroupFamily::RealLine:
      g.coords.assign(static_cast<std::size_t>(id.dim), 0.0);
      break;
    case GroupFamily::FiniteCyclic:
      g.coords = {0.0};
      break;
    case GroupFamily::ScaledLattice:
      g.coords.assign(static_cast<std::size_t>(id.dim), 0.0);
      break;
    case GroupFamily::Affine:
    case GroupFamily::AffineScaleLevel:
      g.coords = {1.0, 0.0};
      break;
    case GroupFamily::SymInfinite:
    case GroupFamily::SymFinite:
      break;
  }
  return g;
}

GroupElement cyclic_atom(long n, long j) {
  GroupElement g;
  g.group = GroupId::finite_cyclic(n);
  g.coords = {canonical_cyclic_coord(n, j)};
  return g;
}

GroupElement lattice_atom(double step, const std::vector<long>& k) {
  GroupElement g;
  g.group = GroupId::scaled_lattice(step, static_cast<int>(k.size()));
  g.coords.reserve(k.size());
  for (long ki : k) g.coords.push_back(static_cast<double>(ki) * step);
  return g;
}

GroupElement perm_element(long n, const std::vector<int>& images) {
  GroupElement g;
  g.group = GroupId::sym_finite(n);
  g.word = images;
  if (!is_perm_word(g.word))
    throw OrbintError("perm_element: images are not a permutation");
  if (static_cast<long>(g.word.size()) > n)
    throw OrbintError("perm_element: word exceeds declared degree");
  trim_word(g.word);
  return g;
}

GroupElement affine_element(double a, double b) {
  if (!(a > 0.0)) throw OrbintError("affine_element: scale must be positive");
  GroupElement g;
  g.group = GroupId::affine();
  g.coords = {a, b};
  return g;
}

GroupElement affine_scale_atom(int m, long k, double b) {
  GroupElement g;
  g.group = GroupId::affine_scale_level(m);
  g.coords = {canonical_scale(m, k), b};
  return g;
}

GroupElement torus_point(const std::vector<double>& coords) {
  GroupElement g;
  g.group = GroupId::torus(static_cast<int>(coords.size()));
  g.coords.reserve(coords.size());
  for (double c : coords) g.coords.push_back(torus_frac(c));
  return g;
}

GroupElement line_point(const std::vector<double>& coords) {
  GroupElement g;
  g.group = GroupId::real_line(static_cast<int>(coords.size()));
  g.coords = coords;
  return g;
}

bool member_of(const GroupId& id, const GroupElement& g) {
  switch (id.family) {
    case GroupFamily::Torus: {
      if (g.coords.size() != static_cast<std::size_t>(id.dim)) return false;
      for (double c : g.coords)
        if (!(c >= 0.0) || !(c < 1.0)) return false;
      return g.group.ambient() == id;
    }
    case GroupFamily::RealLine: {
      if (g.coords.size() != static_cast<std::size_t>(id.dim)) return false;
      for (double c : g.coords)
        if (!std::isfinite(c)) return false;
      return g.group.ambient() == id;
    }
    case GroupFamily::Affine:
      return g.group.ambient() == id && g.coords.size() == 2 &&
             g.coords[0] > 0.0 && std::isfinite(g.coords[1]);
    case GroupFamily::SymInfinite:
      return g.group.ambient() == id && is_perm_word(g.word);
    case GroupFamily::FiniteCyclic:
      return g.group.ambient() == id.ambient() && g.coords.size() == 1 &&
             cyclic_index_of(id.order, g.coords[0]) >= 0;
    case GroupFamily::ScaledLattice: {
      if (g.group.ambient() != id.ambient()) return false;
      if (g.coords.size() != static_cast<std::size_t>(id.dim)) return false;
      for (double c : g.coords) {
        long k = 0;
        if (!lattice_index_of(id.step, c, &k)) return false;
      }
      return true;
    }
    case GroupFamily::SymFinite: {
      if (g.group.ambient() != id.ambient()) return false;
      if (!is_perm_word(g.word)) return false;
      return static_cast<long>(g.word.size()) <= id.order;
    }
    case GroupFamily::AffineScaleLevel: {
      if (g.group.ambient() != id.ambient()) return false;
      if (g.coords.size() != 2 || !std::isfinite(g.coords[1])) return false;
      long k = 0;
      return scale_index_of(id.scale_level, g.coords[0], &k);
    }
  }
  return false;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  GroupId out_id = join_id(g.group, h.group, "compose");
  GroupElement out;
  out.group = out_id;
  switch (out_id.family) {
    case GroupFamily::Torus: {
      require_coords(g, static_cast<std::size_t>(out_id.dim), "compose");
      require_coords(h, static_cast<std::size_t>(out_id.dim), "compose");
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i) {
        double s = g.coords[i] + h.coords[i];
        out.coords[i] = s >= 1.0 ? s - 1.0 : s;
      }
      return out;
    }
    case GroupFamily::RealLine: {
      require_coords(g, static_cast<std::size_t>(out_id.dim), "compose");
      require_coords(h, static_cast<std::size_t>(out_id.dim), "compose");
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i)
        out.coords[i] = g.coords[i] + h.coords[i];
      return out;
    }
    case GroupFamily::FiniteCyclic: {
      long jg = cyclic_index_of(out_id.order, g.coords.at(0));
      long jh = cyclic_index_of(out_id.order, h.coords.at(0));
      if (jg < 0 || jh < 0) mismatch(g.group, h.group, "compose");
      return cyclic_atom(out_id.order, jg + jh);
    }
    case GroupFamily::ScaledLattice: {
      std::vector<long> k(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i) {
        long kg = 0, kh = 0;
        if (!lattice_index_of(out_id.step, g.coords[i], &kg) ||
            !lattice_index_of(out_id.step, h.coords[i], &kh))
          mismatch(g.group, h.group, "compose");
        k[i] = kg + kh;
      }
      return lattice_atom(out_id.step, k);
    }
    case GroupFamily::SymFinite:
    case GroupFamily::SymInfinite: {
      std::size_t len = std::max(g.word.size(), h.word.size());
      out.word.resize(len);
      for (std::size_t i = 0; i < len; ++i)
        out.word[i] = word_image(g.word, word_image(h.word, static_cast<int>(i)));
      trim_word(out.word);
      return out;
    }
    case GroupFamily::AffineScaleLevel: {
      long kg = 0, kh = 0;
      if (!scale_index_of(out_id.scale_level, g.coords.at(0), &kg) ||
          !scale_index_of(out_id.scale_level, h.coords.at(0), &kh))
        mismatch(g.group, h.group, "compose");
      double b = g.coords[0] * h.coords[1] + g.coords[1];
      return affine_scale_atom(out_id.scale_level, kg + kh, b);
    }
    case GroupFamily::Affine: {
      require_coords(g, 2, "compose");
      require_coords(h, 2, "compose");
      out.coords = {g.coords[0] * h.coords[0],
                    g.coords[0] * h.coords[1] + g.coords[1]};
      return out;
    }
  }
  mismatch(g.group, h.group, "compose");
}

GroupElement inverse(const GroupElement& g) {
  GroupElement out;
  out.group = g.group;
  switch (g.group.family) {
    case GroupFamily::Torus: {
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i)
        out.coords[i] = g.coords[i] == 0.0 ? 0.0 : 1.0 - g.coords[i];
      return out;
    }
    case GroupFamily::FiniteCyclic: {
      long j = cyclic_index_of(g.group.order, g.coords.at(0));
      if (j < 0)
        throw OrbintError("inverse: element is not a canonical cyclic atom");
      return cyclic_atom(g.group.order, -j);
    }
    case GroupFamily::RealLine:
    case GroupFamily::ScaledLattice: {
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i)
        out.coords[i] = -g.coords[i];
      return out;
    }
    case GroupFamily::SymFinite:
    case GroupFamily::SymInfinite: {
      out.word.assign(g.word.size(), 0);
      for (std::size_t i = 0; i < g.word.size(); ++i)
        out.word[static_cast<std::size_t>(g.word[i])] = static_cast<int>(i);
      trim_word(out.word);
      return out;
    }
    case GroupFamily::AffineScaleLevel: {
      long k = 0;
      if (!scale_index_of(g.group.scale_level, g.coords.at(0), &k))
        throw OrbintError("inverse: element is not a canonical scale atom");
      return affine_scale_atom(g.group.scale_level, -k,
                               -g.coords[1] / g.coords[0]);
    }
    case GroupFamily::Affine: {
      require_coords(g, 2, "inverse");
      out.coords = {1.0 / g.coords[0], -g.coords[1] / g.coords[0]};
      return out;
    }
  }
  throw OrbintError("inverse: unknown family");
}

double ModularFn::operator()(const GroupElement& g) const {
  if (ambient_family == GroupFamily::Affine) {
    if (g.coords.size() != 2 || !(g.coords[0] > 0.0))
      throw OrbintError("ModularFn: affine element required");
    return 1.0 / g.coords[0];
  }
  return 1.0;
}

GroupChain make_chain(const GroupId& ambient, std::vector<GroupId> levels,
                      double ambient_scale) {
  if (!(ambient_scale > 0.0))
    throw OrbintError("make_chain: ambient_scale must be positive");
  GroupChain chain;
  chain.ambient = ambient;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!subgroup_leq(levels[i], ambient))
      throw MismatchedGroups("make_chain: level " + levels[i].describe() +
                             " is not a subgroup of " + ambient.describe());
    if (i > 0 && !subgroup_leq(levels[i - 1], levels[i]))
      throw MismatchedGroups("make_chain: levels must increase, but " +
                             levels[i - 1].describe() +
                             " is not contained in " + levels[i].describe());
  }
  chain.levels = std::move(levels);
  chain.modular.ambient_family = ambient.family;
  chain.ambient_scale = ambient_scale;
  return chain;
}

double modular_value(const GroupChain& chain, const GroupElement& g) {
  if (g.group.ambient() != chain.ambient)
    throw MismatchedGroups("modular_value: element of " + g.group.describe() +
                           " is not in " + chain.ambient.describe());
  return chain.modular(g);
}

double level_atom_weight(const GroupChain& chain, const GroupId& level_id) {
  double base = 0.0;
  switch (level_id.family) {
    case GroupFamily::FiniteCyclic:
      base = 1.0 / static_cast<double>(level_id.order);
      break;
    case GroupFamily::ScaledLattice:
      base = std::pow(level_id.step, level_id.dim);
      break;
    case GroupFamily::SymFinite:
      base = 1.0;
      break;
    case GroupFamily::AffineScaleLevel:
      base = kLn2 / static_cast<double>(1L << level_id.scale_level);
      break;
    default:
      throw UnsupportedLevel("level_atom_weight: " + level_id.describe() +
                             " has no discrete atom weight");
  }
  return base * chain.ambient_scale;
}

std::vector<HaarAtom> enumerate_group(const GroupChain& chain,
                                      const GroupId& level_id,
                                      const TruncationPolicy& trunc) {
  trunc.validate();
  if (!subgroup_leq(level_id, chain.ambient))
    throw MismatchedGroups("enumerate_group: " + level_id.describe() +
                           " is not a subgroup of " + chain.ambient.describe());
  std::vector<HaarAtom> atoms;
  switch (level_id.family) {
    case GroupFamily::FiniteCyclic: {
      double w = level_atom_weight(chain, level_id);
      atoms.reserve(static_cast<std::size_t>(level_id.order));
      for (long j = 0; j < level_id.order; ++j)
        atoms.push_back({cyclic_atom(level_id.order, j), w});
      return atoms;
    }
    case GroupFamily::ScaledLattice: {
      double w = level_atom_weight(chain, level_id);
      long kmax = static_cast<long>(std::floor(trunc.window / level_id.step));
      if (kmax < 0)
        throw TruncationTooSmall("enumerate_group: window below lattice step");
      std::vector<long> k(static_cast<std::size_t>(level_id.dim), -kmax);
      while (true) {
        atoms.push_back({lattice_atom(level_id.step, k), w});
        int axis = 0;
        while (axis < level_id.dim) {
          if (++k[static_cast<std::size_t>(axis)] <= kmax) break;
          k[static_cast<std::size_t>(axis)] = -kmax;
          ++axis;
        }
        if (axis == level_id.dim) break;
      }
      return atoms;
    }
    case GroupFamily::SymFinite: {
      if (level_id.order > 8)
        throw UnsupportedLevel(
            "enumerate_group: SymFinite enumeration capped at degree 8");
      double w = level_atom_weight(chain, level_id);
      std::vector<int> images(static_cast<std::size_t>(level_id.order));
      std::iota(images.begin(), images.end(), 0);
      do {
        atoms.push_back({perm_element(level_id.order, images), w});
      } while (std::next_permutation(images.begin(), images.end()));
      return atoms;
    }
    case GroupFamily::AffineScaleLevel: {
      int m = level_id.scale_level;
      double scale_w = level_atom_weight(chain, level_id);
      long kmax = static_cast<long>(
          std::floor(trunc.window * static_cast<double>(1L << m) / kLn2));
      std::size_t cells = static_cast<std::size_t>(std::max<double>(
          1.0, std::llround(2.0 * trunc.window *
                            static_cast<double>(trunc.cells_per_unit))));
      double hb = 2.0 * trunc.window / static_cast<double>(cells);
      atoms.reserve(static_cast<std::size_t>(2 * kmax + 1) * cells);
      for (long k = -kmax; k <= kmax; ++k) {
        for (std::size_t i = 0; i < cells; ++i) {
          double b =
              -trunc.window + (static_cast<double>(i) + 0.5) * hb;
          atoms.push_back({affine_scale_atom(m, k, b), scale_w * hb});
        }
      }
      return atoms;
    }
    default:
      throw UnsupportedLevel("enumerate_group: " + level_id.describe() +
                             " is not a discrete level");
  }
}

std::vector<HaarAtom> enumerate_level(const GroupChain& chain,
                                      std::size_t level,
                                      const TruncationPolicy& trunc) {
  return enumerate_group(chain, chain.level(level), trunc);
}

std::vector<double> element_chart(const GroupElement& t, int sym_dim) {
  switch (t.group.family) {
    case GroupFamily::Torus:
    case GroupFamily::RealLine:
    case GroupFamily::FiniteCyclic:
    case GroupFamily::ScaledLattice:
      return t.coords;
    case GroupFamily::Affine:
    case GroupFamily::AffineScaleLevel:
      return {std::log(t.coords.at(0)), t.coords.at(1)};
    case GroupFamily::SymInfinite:
    case GroupFamily::SymFinite: {
      if (sym_dim <= 0)
        throw OrbintError("element_chart: no chart for " + t.group.describe());
      std::vector<double> out(static_cast<std::size_t>(sym_dim));
      for (int i = 0; i < sym_dim; ++i) {
        std::size_t ui = static_cast<std::size_t>(i);
        out[ui] = static_cast<double>(ui < t.word.size()
                                          ? t.word[ui]
                                          : static_cast<int>(i));
      }
      return out;
    }
  }
  throw OrbintError("element_chart: unknown family");
}

}  // namespace orbint
