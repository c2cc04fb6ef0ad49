#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "orbint/errors.hpp"

namespace orbint {

/// Compensated (Kahan) accumulator. Summation order is always the natural
/// index order, so totals are bitwise reproducible.
template <typename T>
class KahanSum {
 public:
  void add(T v) {
    T y = v - comp_;
    T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  T value() const { return sum_; }

 private:
  T sum_{};
  T comp_{};
};

template <typename T>
class KahanComplex {
 public:
  void add(std::complex<T> v) {
    re_.add(v.real());
    im_.add(v.imag());
  }
  std::complex<T> value() const { return {re_.value(), im_.value()}; }

 private:
  KahanSum<T> re_;
  KahanSum<T> im_;
};

/// Composite midpoint rule on [lo, hi] with `cells` equal cells.
/// Exact for affine integrands; O(h^2) for C^2 integrands.
template <typename Fn>
double midpoint_1d(Fn&& f, double lo, double hi, std::size_t cells) {
  if (!(hi > lo) || cells == 0)
    throw QuadratureFailure("midpoint_1d: empty interval or zero cells");
  const double h = (hi - lo) / static_cast<double>(cells);
  KahanSum<double> acc;
  for (std::size_t i = 0; i < cells; ++i) {
    double t = lo + (static_cast<double>(i) + 0.5) * h;
    acc.add(f(t));
  }
  double v = acc.value() * h;
  if (!std::isfinite(v))
    throw QuadratureFailure("midpoint_1d: non-finite result");
  return v;
}

/// Composite midpoint rule on the box [lo0,hi0] x [lo1,hi1] with a
/// cells0 x cells1 grid.
template <typename Fn>
double midpoint_2d(Fn&& f, double lo0, double hi0, std::size_t cells0,
                   double lo1, double hi1, std::size_t cells1) {
  if (!(hi0 > lo0) || !(hi1 > lo1) || cells0 == 0 || cells1 == 0)
    throw QuadratureFailure("midpoint_2d: empty box or zero cells");
  const double h0 = (hi0 - lo0) / static_cast<double>(cells0);
  const double h1 = (hi1 - lo1) / static_cast<double>(cells1);
  KahanSum<double> acc;
  for (std::size_t i = 0; i < cells0; ++i) {
    double u = lo0 + (static_cast<double>(i) + 0.5) * h0;
    for (std::size_t j = 0; j < cells1; ++j) {
      double v = lo1 + (static_cast<double>(j) + 0.5) * h1;
      acc.add(f(u, v));
    }
  }
  double out = acc.value() * h0 * h1;
  if (!std::isfinite(out))
    throw QuadratureFailure("midpoint_2d: non-finite result");
  return out;
}

/// Midpoint nodes of [lo, hi] with `cells` cells, with the common weight
/// returned separately.  Used when a grid must be shared between several
/// sums so that grid-consistency is explicit.
struct MidpointGrid {
  std::vector<double> nodes;
  double weight = 0.0;

  static MidpointGrid over(double lo, double hi, std::size_t cells) {
    if (!(hi > lo) || cells == 0)
      throw QuadratureFailure("MidpointGrid: empty interval or zero cells");
    MidpointGrid g;
    const double h = (hi - lo) / static_cast<double>(cells);
    g.weight = h;
    g.nodes.resize(cells);
    for (std::size_t i = 0; i < cells; ++i)
      g.nodes[i] = lo + (static_cast<double>(i) + 0.5) * h;
    return g;
  }
};

/// Default number of cells per unit length for honest quadrature.
inline constexpr std::size_t kDefaultCellsPerUnit = 1u << 14;

}  // namespace orbint
