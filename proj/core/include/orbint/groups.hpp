#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbint/errors.hpp"
#include "orbint/truncation.hpp"

namespace orbint {

/// The closed family of group instances the library knows how to average
/// over. Continuous ambients come first, then the discrete-or-mixed
/// subgroup families that serve as chain levels.
enum class GroupFamily {
  Torus,             // (R/Z)^d, coordinates in [0,1)
  RealLine,          // R^d under addition
  Affine,            // {(a,b) : a>0}, (a,b)(a',b') = (aa', ab'+b)
  SymInfinite,       // finitely supported permutations of {0,1,2,...}
  FiniteCyclic,      // {j/n} inside Torus(1)
  ScaledLattice,     // (step*Z)^d inside RealLine(d)
  SymFinite,         // permutations moving only {0..n-1}
  AffineScaleLevel,  // {(2^{k/2^m}, b) : k in Z, b in R} inside Affine
};

/// Identifies one group instance. Subgroup families carry enough data to
/// decide membership exactly and to name their ambient group.
struct GroupId {
  GroupFamily family = GroupFamily::Torus;
  int dim = 1;        // Torus, RealLine, ScaledLattice coordinate count
  long order = 0;     // FiniteCyclic n, SymFinite n
  double step = 0.0;  // ScaledLattice spacing
  int scale_level = 0;  // AffineScaleLevel m

  static GroupId torus(int d = 1);
  static GroupId real_line(int d = 1);
  static GroupId affine();
  static GroupId sym_infinite();
  static GroupId finite_cyclic(long n);
  static GroupId scaled_lattice(double step, int d = 1);
  static GroupId sym_finite(long n);
  static GroupId affine_scale_level(int m);

  bool operator==(const GroupId& o) const;
  bool operator!=(const GroupId& o) const { return !(*this == o); }

  /// The ambient group this id lives inside (itself for ambient families).
  GroupId ambient() const;
  bool is_ambient() const { return ambient() == *this; }

  std::string describe() const;
};

/// Returns true when every element of `sub` is an element of `sup`.
/// Decidable exactly from the id parameters alone.
bool subgroup_leq(const GroupId& sub, const GroupId& sup);

/// One group element, tagged with the smallest group id it was built in.
/// Continuous coordinates live in `coords` (torus/real coordinates, or the
/// affine pair (a,b)); permutations live in `word` as a 0-based image
/// vector trimmed of trailing fixed points.
struct GroupElement {
  GroupId group;
  std::vector<double> coords;
  std::vector<int> word;
};

/// Identity of the given group.
GroupElement identity_element(const GroupId& id);

/// Canonical elements of the discrete families. All membership tests and
/// index arithmetic round-trip bitwise through these constructors.
GroupElement cyclic_atom(long n, long j);
GroupElement lattice_atom(double step, const std::vector<long>& k);
GroupElement perm_element(long n, const std::vector<int>& images);
GroupElement affine_element(double a, double b);
GroupElement affine_scale_atom(int m, long k, double b);
GroupElement torus_point(const std::vector<double>& coords);
GroupElement line_point(const std::vector<double>& coords);

/// Exact membership of an element in the given (sub)group.
bool member_of(const GroupId& id, const GroupElement& g);

/// Group product in the join of the operand tags. When both operands carry
/// comparable discrete tags the product is computed by exact index
/// arithmetic, so subgroup closure holds bitwise; otherwise ambient
/// coordinate arithmetic applies, reduced to the canonical domain.
GroupElement compose(const GroupElement& g, const GroupElement& h);

/// Group inverse, canonical-domain reduced; exact for discrete tags.
GroupElement inverse(const GroupElement& g);

/// Left-invariant-versus-right-invariant correction factor of the ambient
/// group. Identically 1 for every family here except Affine, where
/// modular(a, b) = 1/a.
struct ModularFn {
  GroupFamily ambient_family = GroupFamily::Torus;
  double operator()(const GroupElement& g) const;
};

/// An ambient group with an increasing ladder of subgroup levels.
/// `ambient_scale` rescales the reference right Haar measure; every
/// level weight produced downstream scales with it.
struct GroupChain {
  GroupId ambient;
  std::vector<GroupId> levels;
  ModularFn modular;
  bool mc_verified = false;
  double ambient_scale = 1.0;

  const GroupId& level(std::size_t i) const {
    if (i >= levels.size())
      throw UnsupportedLevel("GroupChain: level index " + std::to_string(i) +
                             " out of range");
    return levels[i];
  }
  std::size_t depth() const { return levels.size(); }
};

/// Builds a chain after checking that each level is a subgroup of the next
/// and of the ambient group.
GroupChain make_chain(const GroupId& ambient, std::vector<GroupId> levels,
                      double ambient_scale = 1.0);

/// Modular function value of the chain's ambient group at g.
double modular_value(const GroupChain& chain, const GroupElement& g);

/// One quadrature atom of a level Haar measure.
struct HaarAtom {
  GroupElement elem;
  double weight = 0.0;
};

/// Materializes every level element inside the truncation window together
/// with its normalized Haar weight. Levels with a continuous factor
/// (AffineScaleLevel) come out as scale atoms crossed with a midpoint grid
/// in the offset coordinate. Unbounded requests (SymFinite beyond 8!)
/// raise UnsupportedLevel.
std::vector<HaarAtom> enumerate_level(const GroupChain& chain,
                                      std::size_t level,
                                      const TruncationPolicy& trunc);

/// Same, for a group id that need not be one of the chain's stored levels
/// (it must still be a subgroup of the chain's ambient group). Scenario
/// schedules that sweep every n use this entry point.
std::vector<HaarAtom> enumerate_group(const GroupChain& chain,
                                      const GroupId& level_id,
                                      const TruncationPolicy& trunc);

/// Fell-normalized uniform atom weight of a discrete level: 1/n for
/// FiniteCyclic(n), step^d for ScaledLattice, 1 for SymFinite, ln(2)/2^m
/// per scale index for AffineScaleLevel. Includes the chain's
/// ambient_scale factor.
double level_atom_weight(const GroupChain& chain, const GroupId& level_id);

/// Coordinates a group-side test function sees: raw coordinates for torus
/// and line families, (ln a, b) for affine ones, the first sym_dim images
/// for permutations (identity-padded). Throws for permutations when
/// sym_dim <= 0.
std::vector<double> element_chart(const GroupElement& t, int sym_dim = 0);

}  // namespace orbint
