#include "orbint/regions.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace orbint {
namespace {

/// Box-box disjointness: disjoint iff the intervals fail to meet along some
/// axis. Touching faces meet only when the touching side is closed, so
/// adjacent half-open tiles count as disjoint.
bool boxes_disjoint(const BorelRegion& a, const BorelRegion& b) {
  for (int ax = 0; ax < a.dim(); ++ax) {
    double alo = a.lo(ax), ahi = a.hi(ax);
    double blo = b.lo(ax), bhi = b.hi(ax);
    if (ahi < blo || bhi < alo) return true;
    if (ahi == blo && !a.closed_hi(ax)) return true;
    if (bhi == alo && !b.closed_hi(ax)) return true;
  }
  return false;
}

}  // namespace

BorelRegion BorelRegion::interval(double lo, double hi, bool closed_hi) {
  return box({lo}, {hi}, {closed_hi});
}

BorelRegion BorelRegion::box(std::vector<double> lo, std::vector<double> hi,
                             std::vector<bool> closed_hi) {
  if (lo.size() != hi.size() || lo.size() != closed_hi.size() || lo.empty())
    throw OrbintError("BorelRegion::box: inconsistent axis counts");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw OrbintError("BorelRegion::box: invalid bounds on axis " +
                        std::to_string(i));
  BorelRegion r;
  r.kind_ = Kind::Box;
  r.dim_ = static_cast<int>(lo.size());
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  r.closed_hi_ = std::move(closed_hi);
  return r;
}

BorelRegion BorelRegion::half_open_box(std::vector<double> lo,
                                       std::vector<double> hi) {
  std::size_t n = lo.size();
  return box(std::move(lo), std::move(hi), std::vector<bool>(n, false));
}

BorelRegion BorelRegion::closed_box(std::vector<double> lo,
                                    std::vector<double> hi) {
  std::size_t n = lo.size();
  return box(std::move(lo), std::move(hi), std::vector<bool>(n, true));
}

BorelRegion BorelRegion::rational_window(double lo, double hi) {
  if (!(lo <= hi)) throw OrbintError("rational_window: invalid bounds");
  BorelRegion r;
  r.kind_ = Kind::RationalWindow;
  r.dim_ = 1;
  r.lo_ = {lo};
  r.hi_ = {hi};
  r.closed_hi_ = {true};
  return r;
}

BorelRegion BorelRegion::all(int dim) {
  BorelRegion r;
  r.kind_ = Kind::All;
  r.dim_ = dim;
  return r;
}

BorelRegion BorelRegion::empty(int dim) {
  BorelRegion r;
  r.kind_ = Kind::Empty;
  r.dim_ = dim;
  return r;
}

BorelRegion BorelRegion::disjoint_union(std::vector<BorelRegion> parts) {
  if (parts.empty()) throw OrbintError("disjoint_union: no parts");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].dim() != parts[0].dim())
      throw OrbintError("disjoint_union: mixed dimensions");
    if (parts[i].kind() == Kind::All || parts[i].kind() == Kind::Union)
      throw OrbintError("disjoint_union: nested unions or All not supported");
    for (std::size_t j = 0; j < i; ++j)
      if (parts[i].kind() == Kind::Box && parts[j].kind() == Kind::Box &&
          !boxes_disjoint(parts[i], parts[j]))
        throw OrbintError("disjoint_union: parts overlap");
  }
  BorelRegion r;
  r.kind_ = Kind::Union;
  r.dim_ = parts[0].dim();
  r.parts_ = std::move(parts);
  return r;
}

bool BorelRegion::contains(const std::vector<double>& x,
                           Rationality cls) const {
  if (static_cast<int>(x.size()) != dim_)
    throw OrbintError("BorelRegion::contains: dimension mismatch");
  switch (kind_) {
    case Kind::Empty:
      return false;
    case Kind::All:
      return true;
    case Kind::Box: {
      for (int i = 0; i < dim_; ++i) {
        double v = x[static_cast<std::size_t>(i)];
        if (v < lo_[static_cast<std::size_t>(i)]) return false;
        if (v > hi_[static_cast<std::size_t>(i)]) return false;
        if (v == hi_[static_cast<std::size_t>(i)] &&
            !closed_hi_[static_cast<std::size_t>(i)] &&
            hi_[static_cast<std::size_t>(i)] != lo_[static_cast<std::size_t>(i)])
          return false;
      }
      return true;
    }
    case Kind::RationalWindow: {
      // x must equal (rational in window) + shift. A rational x matches a
      // rational shift; any declared-irrational ingredient breaks
      // membership almost surely, which is the declared semantics.
      if (cls == Rationality::Irrational ||
          shift_class_ == Rationality::Irrational)
        return false;
      double v = x[0] - shift_;
      return v >= lo_[0] && v <= hi_[0];
    }
    case Kind::Union: {
      for (const auto& p : parts_)
        if (p.contains(x, cls)) return true;
      return false;
    }
  }
  return false;
}

bool BorelRegion::contains1(double x, Rationality cls) const {
  return contains(std::vector<double>{x}, cls);
}

double BorelRegion::content() const {
  switch (kind_) {
    case Kind::Empty:
    case Kind::RationalWindow:
      return 0.0;
    case Kind::All:
      return std::numeric_limits<double>::infinity();
    case Kind::Box: {
      double v = 1.0;
      for (int i = 0; i < dim_; ++i)
        v *= hi_[static_cast<std::size_t>(i)] - lo_[static_cast<std::size_t>(i)];
      return v;
    }
    case Kind::Union: {
      double v = 0.0;
      for (const auto& p : parts_) v += p.content();
      return v;
    }
  }
  return 0.0;
}

BorelRegion BorelRegion::translated(const std::vector<double>& s,
                                    Rationality cls) const {
  if (static_cast<int>(s.size()) != dim_)
    throw OrbintError("BorelRegion::translated: dimension mismatch");
  BorelRegion r = *this;
  switch (kind_) {
    case Kind::Empty:
    case Kind::All:
      return r;
    case Kind::Box:
      for (int i = 0; i < dim_; ++i) {
        r.lo_[static_cast<std::size_t>(i)] += s[static_cast<std::size_t>(i)];
        r.hi_[static_cast<std::size_t>(i)] += s[static_cast<std::size_t>(i)];
      }
      return r;
    case Kind::RationalWindow:
      r.shift_ += s[0];
      r.shift_class_ = combine(r.shift_class_, cls);
      return r;
    case Kind::Union:
      for (auto& p : r.parts_) p = p.translated(s, cls);
      return r;
  }
  return r;
}

BorelRegion BorelRegion::translated1(double s, Rationality cls) const {
  return translated(std::vector<double>{s}, cls);
}

double BorelRegion::lo(int axis) const {
  if (kind_ != Kind::Box && kind_ != Kind::RationalWindow)
    throw OrbintError("BorelRegion::lo: not a box");
  return lo_.at(static_cast<std::size_t>(axis));
}

double BorelRegion::hi(int axis) const {
  if (kind_ != Kind::Box && kind_ != Kind::RationalWindow)
    throw OrbintError("BorelRegion::hi: not a box");
  return hi_.at(static_cast<std::size_t>(axis));
}

bool BorelRegion::closed_hi(int axis) const {
  if (kind_ != Kind::Box)
    throw OrbintError("BorelRegion::closed_hi: not a box");
  return closed_hi_.at(static_cast<std::size_t>(axis));
}

void BorelRegion::bounding(int axis, double* lo, double* hi) const {
  switch (kind_) {
    case Kind::Box:
    case Kind::RationalWindow:
      *lo = lo_.at(static_cast<std::size_t>(axis)) +
            (kind_ == Kind::RationalWindow ? shift_ : 0.0);
      *hi = hi_.at(static_cast<std::size_t>(axis)) +
            (kind_ == Kind::RationalWindow ? shift_ : 0.0);
      return;
    case Kind::Union: {
      double l = std::numeric_limits<double>::infinity();
      double h = -std::numeric_limits<double>::infinity();
      for (const auto& p : parts_) {
        double pl, ph;
        p.bounding(axis, &pl, &ph);
        l = std::min(l, pl);
        h = std::max(h, ph);
      }
      *lo = l;
      *hi = h;
      return;
    }
    case Kind::All:
      *lo = -std::numeric_limits<double>::infinity();
      *hi = std::numeric_limits<double>::infinity();
      return;
    case Kind::Empty:
      *lo = 0.0;
      *hi = 0.0;
      return;
  }
}

std::string BorelRegion::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Empty:
      os << "empty";
      break;
    case Kind::All:
      os << "all(" << dim_ << ")";
      break;
    case Kind::Box:
      for (int i = 0; i < dim_; ++i) {
        os << (i ? "x" : "") << "[" << lo_[static_cast<std::size_t>(i)] << ","
           << hi_[static_cast<std::size_t>(i)]
           << (closed_hi_[static_cast<std::size_t>(i)] ? "]" : ")");
      }
      break;
    case Kind::RationalWindow:
      os << "Q cap [" << lo_[0] << "," << hi_[0] << "] + " << shift_
         << (shift_class_ == Rationality::Irrational ? " (irrational)" : "");
      break;
    case Kind::Union:
      os << "union of " << parts_.size() << " parts";
      break;
  }
  return os.str();
}

}  // namespace orbint
