#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace degreelab::polycore {

/// Closed interval [lo, hi] with outward-rounded arithmetic.
///
/// Every operation computes the endpoint in round-to-nearest and then steps
/// one ulp outward, so the true real result is always enclosed. This is
/// slightly wider than directed rounding but does not depend on the FPU
/// rounding mode surviving the optimizer.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  constexpr Interval(double point) : lo(point), hi(point) {}  // NOLINT(implicit)
  Interval(double lo_, double hi_);

  static Interval hull(double a, double b) { return a <= b ? Interval(a, b) : Interval(b, a); }
  /// Tightest double interval containing the rational q.
  static Interval enclose(const mpq_class& q);
  static Interval entire() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }

  double width() const { return hi - lo; }
  double mid() const;
  double mag() const { return std::max(std::fabs(lo), std::fabs(hi)); }
  /// Smallest |x| over the interval.
  double mig() const;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
  bool subset_of(const Interval& o) const { return o.lo <= lo && hi <= o.hi; }
  bool strictly_inside(const Interval& o) const { return o.lo < lo && hi < o.hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

double round_down(double x);
double round_up(double x);

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
/// Integer power with the even-power range rule (x^2 on [-1,1] is [0,1]).
Interval pow(const Interval& a, unsigned k);
Interval sqr(const Interval& a);
/// Intersection; empty intersections are reported through the bool.
bool intersect(const Interval& a, const Interval& b, Interval& out);

bool operator==(const Interval& a, const Interval& b);
std::ostream& operator<<(std::ostream& os, const Interval& x);

/// Axis-aligned product of closed intervals.
class IntervalBox {
 public:
  IntervalBox() = default;
  explicit IntervalBox(std::vector<Interval> sides);
  /// The cube [-r, r]^dims.
  static IntervalBox cube(std::size_t dims, double r);
  /// The degenerate box at a point.
  static IntervalBox point(std::span<const double> x);

  std::size_t dims() const { return sides_.size(); }
  const Interval& operator[](std::size_t i) const { return sides_[i]; }
  Interval& operator[](std::size_t i) { return sides_[i]; }
  std::span<const Interval> sides() const { return sides_; }

  std::vector<double> midpoint() const;
  std::vector<double> widths() const;
  double max_width() const;
  /// Index of the widest side; ties go to the lowest index.
  std::size_t widest() const;
  std::pair<IntervalBox, IntervalBox> bisect(std::size_t dim) const;

  bool contains(std::span<const double> x) const;
  bool subset_of(const IntervalBox& o) const;
  bool strictly_inside(const IntervalBox& o) const;
  bool intersects(const IntervalBox& o) const;

  friend bool operator==(const IntervalBox& a, const IntervalBox& b) = default;

 private:
  std::vector<Interval> sides_;
};

std::ostream& operator<<(std::ostream& os, const IntervalBox& b);

}  // namespace degreelab::polycore
