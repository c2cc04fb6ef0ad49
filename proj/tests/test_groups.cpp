#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "orbint/groups.hpp"
#include "orbint/rng.hpp"

using namespace orbint;

namespace {

GroupChain torus_chain(int k_hi) {
  std::vector<GroupId> levels;
  for (int k = 0; k <= k_hi; ++k)
    levels.push_back(GroupId::finite_cyclic(1L << k));
  return make_chain(GroupId::torus(1), std::move(levels));
}

GroupChain line_chain(int n_hi) {
  std::vector<GroupId> levels;
  for (int n = 0; n <= n_hi; ++n)
    levels.push_back(GroupId::scaled_lattice(std::ldexp(1.0, -n), 1));
  return make_chain(GroupId::real_line(1), std::move(levels));
}

GroupChain affine_chain(int m_hi) {
  std::vector<GroupId> levels;
  for (int m = 0; m <= m_hi; ++m)
    levels.push_back(GroupId::affine_scale_level(m));
  return make_chain(GroupId::affine(), std::move(levels));
}

double uniform(std::uint64_t seed, std::uint64_t i, double lo, double hi) {
  SplitMix64 rng(substream(seed, i));
  return rng.uniform(lo, hi);
}

}  // namespace

TEST_CASE("affine group law and inverse") {
  GroupElement g = affine_element(2.0, 1.0);
  GroupElement h = affine_element(3.0, 4.0);
  GroupElement gh = compose(g, h);
  CHECK(gh.coords[0] == 6.0);
  CHECK(gh.coords[1] == 9.0);

  GroupElement gi = inverse(g);
  CHECK(gi.coords[0] == 0.5);
  CHECK(gi.coords[1] == -0.5);
  GroupElement e = compose(g, gi);
  CHECK(e.coords[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(e.coords[1]) <= 1e-12);
}

TEST_CASE("torus and lattice inverses are exact") {
  GroupElement t = inverse(torus_point({0.3}));
  CHECK(t.coords[0] == doctest::Approx(0.7).epsilon(1e-15));

  GroupElement l = inverse(lattice_atom(0.125, {3}));  // 0.375
  CHECK(l.coords[0] == -0.375);
  CHECK(member_of(GroupId::scaled_lattice(0.125), l));
}

TEST_CASE("identity composes as a unit") {
  for (const GroupId& id :
       {GroupId::finite_cyclic(12), GroupId::scaled_lattice(0.25, 2),
        GroupId::sym_finite(4), GroupId::affine()}) {
    GroupElement e = identity_element(id);
    GroupElement g = id.family == GroupFamily::SymFinite
                         ? perm_element(4, {1, 2, 0, 3})
                         : id.family == GroupFamily::Affine
                               ? affine_element(2.5, -1.0)
                               : id.family == GroupFamily::FiniteCyclic
                                     ? cyclic_atom(12, 5)
                                     : lattice_atom(0.25, {3, -2});
    GroupElement ge = compose(g, e);
    CHECK(ge.coords == g.coords);
    CHECK(ge.word == g.word);
  }
}

TEST_CASE("modular function: unimodular families and the affine 1/a") {
  GroupChain tc = torus_chain(3);
  CHECK(modular_value(tc, torus_point({0.3})) == 1.0);

  GroupChain ac = affine_chain(3);
  GroupElement s = affine_element(2.0, 1.0);
  CHECK(modular_value(ac, s) == doctest::Approx(0.5).epsilon(1e-15));

  // Push Lebesgue measure through x -> 2x + 1 on a panel of intervals and
  // fit the single scalar c with (s.mu)(A) = c*mu(A): the preimage of
  // [a, b] is [(a-1)/2, (b-1)/2], so c = 1/2 on every interval.
  for (double a : {-3.0, 0.0, 1.5}) {
    double b = a + 2.0;
    double pre_lo = (a - 1.0) / 2.0, pre_hi = (b - 1.0) / 2.0;
    double c = (pre_hi - pre_lo) / (b - a);
    CHECK(modular_value(ac, s) == doctest::Approx(c).epsilon(1e-12));
  }

  GroupChain sc = make_chain(GroupId::sym_infinite(),
                             {GroupId::sym_finite(3), GroupId::sym_finite(5)});
  CHECK(modular_value(sc, perm_element(5, {1, 0, 2, 4, 3})) == 1.0);
}

TEST_CASE("modular function is multiplicative on random affine pairs") {
  GroupChain ac = affine_chain(2);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    GroupElement g = affine_element(std::exp(uniform(11, 2 * i, -2.0, 2.0)),
                                    uniform(12, 2 * i, -3.0, 3.0));
    GroupElement h =
        affine_element(std::exp(uniform(11, 2 * i + 1, -2.0, 2.0)),
                       uniform(12, 2 * i + 1, -3.0, 3.0));
    double lhs = modular_value(ac, compose(g, h));
    double rhs = modular_value(ac, g) * modular_value(ac, h);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("composition is associative on sampled triples") {
  GroupChain ac = affine_chain(2);
  (void)ac;
  for (std::uint64_t i = 0; i < 200; ++i) {
    GroupElement g = affine_element(std::exp(uniform(21, 3 * i, -1.5, 1.5)),
                                    uniform(22, 3 * i, -2.0, 2.0));
    GroupElement h = affine_element(std::exp(uniform(21, 3 * i + 1, -1.5, 1.5)),
                                    uniform(22, 3 * i + 1, -2.0, 2.0));
    GroupElement k = affine_element(std::exp(uniform(21, 3 * i + 2, -1.5, 1.5)),
                                    uniform(22, 3 * i + 2, -2.0, 2.0));
    GroupElement lhs = compose(compose(g, h), k);
    GroupElement rhs = compose(g, compose(h, k));
    CHECK(lhs.coords[0] == doctest::Approx(rhs.coords[0]).epsilon(1e-12));
    CHECK(lhs.coords[1] ==
          doctest::Approx(rhs.coords[1]).epsilon(1e-12).scale(1.0));
  }
  for (std::uint64_t i = 0; i < 200; ++i) {
    GroupElement g = cyclic_atom(48, static_cast<long>(i % 48));
    GroupElement h = cyclic_atom(48, static_cast<long>((5 * i) % 48));
    GroupElement k = cyclic_atom(48, static_cast<long>((11 * i) % 48));
    CHECK(compose(compose(g, h), k).coords ==
          compose(g, compose(h, k)).coords);
  }
}

TEST_CASE("subgroup relations are decided from ids") {
  CHECK(subgroup_leq(GroupId::finite_cyclic(4), GroupId::finite_cyclic(8)));
  CHECK_FALSE(
      subgroup_leq(GroupId::finite_cyclic(3), GroupId::finite_cyclic(8)));
  CHECK(subgroup_leq(GroupId::finite_cyclic(8), GroupId::torus(1)));
  CHECK(subgroup_leq(GroupId::scaled_lattice(0.5),
                     GroupId::scaled_lattice(0.25)));
  CHECK_FALSE(subgroup_leq(GroupId::scaled_lattice(0.25),
                           GroupId::scaled_lattice(0.5)));
  CHECK(subgroup_leq(GroupId::sym_finite(3), GroupId::sym_finite(4)));
  CHECK(subgroup_leq(GroupId::affine_scale_level(2),
                     GroupId::affine_scale_level(3)));
  CHECK_FALSE(subgroup_leq(GroupId::affine_scale_level(3),
                           GroupId::affine_scale_level(2)));
  CHECK(subgroup_leq(GroupId::affine_scale_level(3), GroupId::affine()));
}

TEST_CASE("subgroup closure holds bitwise for discrete levels") {
  for (long j = 0; j < 16; ++j)
    for (long k = 0; k < 16; ++k) {
      GroupElement p = compose(cyclic_atom(16, j), cyclic_atom(16, k));
      CHECK(member_of(GroupId::finite_cyclic(16), p));
    }
  const double step = std::ldexp(1.0, -7);
  for (long a : {-37L, 0L, 5L, 101L})
    for (long b : {-64L, 1L, 88L}) {
      GroupElement p = compose(lattice_atom(step, {a}), lattice_atom(step, {b}));
      CHECK(member_of(GroupId::scaled_lattice(step), p));
      CHECK(p.coords[0] == static_cast<double>(a + b) * step);
    }
}

TEST_CASE("level enumeration: cyclic, lattice, permutations") {
  GroupChain tc = torus_chain(3);
  TruncationPolicy trunc;
  auto atoms = enumerate_group(tc, GroupId::finite_cyclic(4), trunc);
  REQUIRE(atoms.size() == 4);
  std::set<double> coords;
  for (const auto& a : atoms) {
    CHECK(a.weight == 0.25);
    coords.insert(a.elem.coords[0]);
  }
  CHECK(coords == std::set<double>{0.0, 0.25, 0.5, 0.75});

  GroupChain lc = line_chain(4);
  TruncationPolicy narrow;
  narrow.window = 1.0;
  auto lat = enumerate_group(lc, GroupId::scaled_lattice(0.25), narrow);
  REQUIRE(lat.size() == 9);
  for (const auto& a : lat) CHECK(a.weight == 0.25);

  GroupChain sc = make_chain(GroupId::sym_infinite(), {GroupId::sym_finite(3)});
  auto perms = enumerate_level(sc, 0, trunc);
  REQUIRE(perms.size() == 6);
  for (const auto& a : perms) CHECK(a.weight == 1.0);
}

TEST_CASE("affine scale level atoms carry the log-spacing weight") {
  GroupChain ac = affine_chain(4);
  for (int m : {0, 2, 4}) {
    double w = level_atom_weight(ac, GroupId::affine_scale_level(m));
    CHECK(w == doctest::Approx(std::log(2.0) / std::ldexp(1.0, m))
                   .epsilon(1e-15));
  }
  GroupElement atom = affine_scale_atom(2, 3, 1.5);
  CHECK(atom.coords[0] ==
        doctest::Approx(std::pow(2.0, 3.0 / 4.0)).epsilon(1e-15));
  CHECK(atom.coords[1] == 1.5);
  CHECK(member_of(GroupId::affine_scale_level(2), atom));
  CHECK(member_of(GroupId::affine_scale_level(3), atom));
  CHECK_FALSE(member_of(GroupId::affine_scale_level(1), atom));
}

TEST_CASE("dyadic torus levels are 2^-n dense") {
  GroupChain tc = torus_chain(6);
  TruncationPolicy trunc;
  for (std::size_t l : {0u, 3u, 6u}) {
    auto atoms = enumerate_level(tc, l, trunc);
    std::vector<double> xs;
    for (const auto& a : atoms) xs.push_back(a.elem.coords[0]);
    std::sort(xs.begin(), xs.end());
    double gap = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      gap = std::max(gap, xs[i + 1] - xs[i]);
    gap = std::max(gap, 1.0 - xs.back() + xs.front());
    CHECK(gap == std::ldexp(1.0, -static_cast<int>(l)));
  }
}

TEST_CASE("chains validate their ladders") {
  CHECK_THROWS_AS(
      make_chain(GroupId::torus(1),
                 {GroupId::finite_cyclic(4), GroupId::finite_cyclic(6)}),
      MismatchedGroups);
  CHECK_THROWS_AS(make_chain(GroupId::real_line(1), {GroupId::finite_cyclic(4)}),
                  MismatchedGroups);
  GroupChain tc = torus_chain(2);
  CHECK_THROWS_AS(tc.level(7), UnsupportedLevel);
}

TEST_CASE("element chart: raw, log-affine, permutation images") {
  CHECK(element_chart(line_point({1.5, -2.0})) ==
        std::vector<double>{1.5, -2.0});
  auto chart = element_chart(affine_element(std::exp(1.0), 0.25));
  CHECK(chart[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chart[1] == 0.25);
  auto perm = element_chart(perm_element(3, {1, 0, 2}), 4);
  CHECK(perm == std::vector<double>{1.0, 0.0, 2.0, 3.0});
  CHECK_THROWS_AS(element_chart(perm_element(3, {1, 0, 2})), OrbintError);
}
