#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "orbint/errors.hpp"

namespace orbint {

/// Declared arithmetic nature of a real value. Every double is a rational
/// number, so "irrational" is a declaration about the mathematical object a
/// value stands for, not about its bits. A value declared Irrational is
/// treated as algebraically independent of every rational, which is the
/// almost-sure case for sampled reals.
enum class Rationality { Rational, Irrational };

inline Rationality combine(Rationality a, Rationality b) {
  return (a == Rationality::Irrational || b == Rationality::Irrational)
             ? Rationality::Irrational
             : Rationality::Rational;
}

/// Point-set described geometrically, with exact membership. Supported
/// shapes: boxes with per-axis closed/half-open upper faces (intervals and
/// torus arcs are 1-D boxes), the rationals inside a window (Lebesgue-null),
/// finite disjoint unions, the whole space, and the empty set.
class BorelRegion {
 public:
  enum class Kind { Box, RationalWindow, Union, All, Empty };

  static BorelRegion interval(double lo, double hi, bool closed_hi = true);
  static BorelRegion half_open_interval(double lo, double hi) {
    return interval(lo, hi, false);
  }
  static BorelRegion box(std::vector<double> lo, std::vector<double> hi,
                         std::vector<bool> closed_hi);
  static BorelRegion half_open_box(std::vector<double> lo,
                                   std::vector<double> hi);
  static BorelRegion closed_box(std::vector<double> lo,
                                std::vector<double> hi);
  /// The rationals inside [lo, hi]; Lebesgue content 0.
  static BorelRegion rational_window(double lo, double hi);
  static BorelRegion all(int dim);
  static BorelRegion empty(int dim);
  /// Parts must be pairwise disjoint (checked exactly for boxes).
  static BorelRegion disjoint_union(std::vector<BorelRegion> parts);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Exact membership. `cls` declares the arithmetic nature of x (all
  /// coordinates); only the rational-window shape consults it.
  bool contains(const std::vector<double>& x,
                Rationality cls = Rationality::Rational) const;
  bool contains1(double x, Rationality cls = Rationality::Rational) const;

  /// Lebesgue content (product measure of the underlying coordinates).
  /// 0 for rational windows and Empty; infinite() for All.
  double content() const;
  bool infinite_content() const { return kind_ == Kind::All; }

  /// Geometric translate by s (componentwise). The declared class of the
  /// shift matters only for rational windows, where it accumulates.
  BorelRegion translated(const std::vector<double>& s,
                         Rationality cls = Rationality::Rational) const;
  BorelRegion translated1(double s,
                          Rationality cls = Rationality::Rational) const;

  /// Box accessors; throw unless kind is Box.
  double lo(int axis) const;
  double hi(int axis) const;
  bool closed_hi(int axis) const;

  /// Bounding box of the region (tight for Box/RationalWindow/Union).
  void bounding(int axis, double* lo, double* hi) const;

  const std::vector<BorelRegion>& parts() const { return parts_; }

  std::string describe() const;

 private:
  Kind kind_ = Kind::Empty;
  int dim_ = 1;
  std::vector<double> lo_, hi_;
  std::vector<bool> closed_hi_;
  // Rational windows remember the accumulated shift and its declared class:
  // membership of x in (Q cap [lo,hi]) + shift requires x - shift rational.
  double shift_ = 0.0;
  Rationality shift_class_ = Rationality::Rational;
  std::vector<BorelRegion> parts_;
};

}  // namespace orbint
