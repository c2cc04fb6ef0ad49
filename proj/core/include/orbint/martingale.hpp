#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "orbint/actions.hpp"
#include "orbint/integrands.hpp"

namespace orbint {

/// One finite orbit of the level action restricted to the base region,
/// with normalized mu-weights (they sum to 1 within the block).
struct OrbitBlock {
  std::vector<Point> points;
  std::vector<double> weights;
};

/// The sigma-field of level-invariant subsets of a base region, presented
/// through its atoms: the finite orbits of the level action. Conditional
/// expectations average over the orbit of the query point; for dyadic
/// grids on the circle the blocks can also be materialized exactly.
class OrbitPartition {
 public:
  /// On-demand partition: blocks are computed per query point.
  static OrbitPartition orbit_sigma_field(const ActionSystem& system,
                                          const GroupId& level,
                                          const BorelRegion& region);

  /// Materialized partition of the dyadic grid {p/2^m} inside the region,
  /// under a cyclic level of order 2^l, l <= m. Blocks and the index map
  /// are built by exact integer arithmetic on grid indices.
  static OrbitPartition dyadic_grid(const ActionSystem& system,
                                    const GroupId& level,
                                    const BorelRegion& region, int grid_level);

  const BorelRegion& region() const { return region_; }
  const GroupId& level() const { return level_; }
  const ActionSystem& system() const { return system_; }

  /// Materialized blocks; empty for on-demand partitions.
  const std::vector<OrbitBlock>& blocks() const { return blocks_; }
  /// Index of the materialized block containing the grid point x; the
  /// point must lie exactly on the grid and inside the region.
  long block_index(const Point& x) const;

  /// The block of an arbitrary region point, computed on demand.
  OrbitBlock block_of(const Point& x) const;

 private:
  ActionSystem system_;
  GroupId level_;
  BorelRegion region_ = BorelRegion::all(1);
  int grid_level_ = -1;
  std::vector<OrbitBlock> blocks_;
  std::vector<long> residue_to_block_;
};

/// Mu-weighted average of f over the block containing x. Equals the
/// orbital integral at the same level when the level carries probability
/// Haar and the region is the whole space (that identity is checked by
/// tests, never assumed here).
std::complex<double> orbit_conditional_expectation(
    const OrbitPartition& partition, const Integrand& f, const Point& x);

/// The conditional expectation as a function: linear integrands on the
/// cylinder come back in closed form, everything else as an evaluator
/// that computes the block average per call.
Integrand orbit_conditional_expectation_fn(const OrbitPartition& partition,
                                           const Integrand& f);

/// Two-part certificate over a point sample and a level range: the tower
/// property E_{n+1}(E_n(f)) = E_{n+1}(f) within tol, and per-level median
/// deviations of E_n(f)(x) from the declared limit. Passes when the tower
/// holds and the final median is at most half the first plus tol.
struct MartingaleReport {
  double tower_residual = 0.0;
  std::vector<double> median_deviation;
  double first_median = 0.0;
  double final_median = 0.0;
  std::complex<double> declared_limit{0.0, 0.0};
  double tol = 0.0;
  bool pass = false;
};
MartingaleReport reversed_martingale_check(
    const ActionSystem& system, const Integrand& f,
    const std::vector<Point>& x_sample, std::size_t level_lo,
    std::size_t level_hi, double tol,
    std::optional<std::complex<double>> limit = std::nullopt);

}  // namespace orbint
