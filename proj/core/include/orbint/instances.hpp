#pragma once

#include <string>
#include <vector>

#include "orbint/averaging.hpp"

namespace orbint {

/// Circle rotations: levels {j/2^k} for k in [k_lo, k_hi], probability
/// Haar on the ambient circle.
ActionSystem torus_dyadic_system(int k_lo = 0, int k_hi = 12);

/// Dyadic lattices 2^-n Z acting on the line by translation, n in
/// [n_lo, n_hi]; ambient Lebesgue.
ActionSystem line_dyadic_system(int n_lo = 1, int n_hi = 12);

/// Dyadic planar lattices 2^-n Z^2 acting on the 2-torus modulo Z^2,
/// n in [n_lo, n_hi]; the n = 0 level is the integer lattice.
ActionSystem plane_dyadic_system(int n_lo = 0, int n_hi = 8);

/// The positive-affine group acting on itself by left multiplication,
/// levels of scale resolution m in [m_lo, m_hi]; right Haar ambient.
ActionSystem affine_self_system(int m_lo = 0, int m_hi = 6);

/// The same chain acting improperly on the line by x -> a*x + b; the
/// negative control whose ambient orbit integrals diverge.
ActionSystem affine_line_system(int m_lo = 0, int m_hi = 3);

/// Finite permutation groups acting on Bernoulli(p) words by coordinate
/// permutation; orbit averages use probability normalization. `length` of
/// the truncated words defaults to the largest degree.
ActionSystem cylinder_sym_system(std::vector<long> degrees, double p = 0.3,
                                 int length = 0);

/// Labels every chain level with its natural parameter: cyclic order n,
/// dyadic exponent n of a 2^-n lattice, scale resolution m, permutation
/// degree n.
std::vector<ScheduleEntry> chain_schedule(const ActionSystem& system);

/// Cyclic schedule {Z/nZ : n in [n_lo, n_hi]} labeled by n; used by
/// full-sequence sweeps that are not chains.
std::vector<ScheduleEntry> cyclic_schedule(long n_lo, long n_hi);

/// Parsed schedule expression "kind:lo..hi" (e.g. "dyadic:0..14",
/// "all:1..10000"). The scenario decides what the kind means for its
/// instance family.
struct ScheduleSpec {
  std::string kind;
  long lo = 0;
  long hi = 0;
};
ScheduleSpec parse_schedule_spec(const std::string& expr);

}  // namespace orbint
