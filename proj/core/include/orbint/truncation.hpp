#pragma once

#include <cstddef>

#include "orbint/errors.hpp"

namespace orbint {

/// Caller-supplied truncation for noncompact coordinates. Nothing in the
/// library invents a window on its own; every operation that touches an
/// unbounded group or space takes one of these explicitly.
struct TruncationPolicy {
  /// Half-width of the window applied to each noncompact coordinate
  /// (lattice span, log-scale range, affine offset range).
  double window = 8.0;

  /// Relative growth across two window doublings above which a truncated
  /// integral is flagged as failing to stabilize. Must lie in (0, 0.5).
  double doubling_tol = 0.05;

  /// Quadrature density for continuous factors: cells per unit length.
  std::size_t cells_per_unit = 1u << 8;

  void validate() const {
    if (!(window > 0.0))
      throw TruncationTooSmall("TruncationPolicy: window must be positive");
    if (!(doubling_tol > 0.0) || !(doubling_tol < 0.5))
      throw OrbintError("TruncationPolicy: doubling_tol must lie in (0, 0.5)");
    if (cells_per_unit == 0)
      throw OrbintError("TruncationPolicy: cells_per_unit must be positive");
  }

  TruncationPolicy doubled() const {
    TruncationPolicy t = *this;
    t.window *= 2.0;
    return t;
  }
};

}  // namespace orbint
