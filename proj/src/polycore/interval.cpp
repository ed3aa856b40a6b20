#include "degreelab/interval.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <stdexcept>

namespace degreelab::polycore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 0 * inf is taken as 0: an endpoint at zero contributes nothing however
// large the other factor is.
double mul_point(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

}  // namespace

double round_down(double x) {
  if (x == -kInf) return x;
  return std::nextafter(x, -kInf);
}

double round_up(double x) {
  if (x == kInf) return x;
  return std::nextafter(x, kInf);
}

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) {
    throw std::invalid_argument("Interval: invalid endpoints");
  }
}

Interval Interval::enclose(const mpq_class& q) {
  double d = q.get_d();
  if (!std::isfinite(d)) return entire();
  int c = cmp(mpq_class(d), q);
  if (c == 0) return {d, d};
  if (c < 0) return {d, round_up(d)};
  return {round_down(d), d};
}

double Interval::mid() const {
  if (std::isinf(lo) && std::isinf(hi)) return 0.0;
  if (std::isinf(lo)) return -std::numeric_limits<double>::max();
  if (std::isinf(hi)) return std::numeric_limits<double>::max();
  return lo + 0.5 * (hi - lo);
}

double Interval::mig() const {
  if (contains_zero()) return 0.0;
  return std::min(std::fabs(lo), std::fabs(hi));
}

Interval operator+(const Interval& a, const Interval& b) {
  return {round_down(a.lo + b.lo), round_up(a.hi + b.hi)};
}

Interval operator-(const Interval& a, const Interval& b) {
  return {round_down(a.lo - b.hi), round_up(a.hi - b.lo)};
}

Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  if (a.lo == a.hi && b.lo == b.hi) {
    double p = mul_point(a.lo, b.lo);
    if (p == 0.0) return {0.0, 0.0};
    return {round_down(p), round_up(p)};
  }
  double p1 = mul_point(a.lo, b.lo);
  double p2 = mul_point(a.lo, b.hi);
  double p3 = mul_point(a.hi, b.lo);
  double p4 = mul_point(a.hi, b.hi);
  double lo = std::min({p1, p2, p3, p4});
  double hi = std::max({p1, p2, p3, p4});
  return {round_down(lo), round_up(hi)};
}

namespace {

// [a^k, b^k] for 0 <= a <= b, rounded outward at every step.
Interval pow_nonneg(double a, double b, unsigned k) {
  double lo = 1.0, hi = 1.0;
  for (unsigned i = 0; i < k; ++i) {
    lo = std::max(0.0, round_down(mul_point(lo, a)));
    hi = round_up(mul_point(hi, b));
  }
  return {lo, hi};
}

}  // namespace

Interval pow(const Interval& a, unsigned k) {
  if (k == 0) return {1.0, 1.0};
  if (k == 1) return a;
  if (a.lo >= 0.0) return pow_nonneg(a.lo, a.hi, k);
  if (a.hi <= 0.0) {
    Interval m = pow_nonneg(-a.hi, -a.lo, k);
    return (k % 2 == 0) ? m : -m;
  }
  if (k % 2 == 0) {
    return {0.0, pow_nonneg(0.0, std::max(-a.lo, a.hi), k).hi};
  }
  return {-pow_nonneg(0.0, -a.lo, k).hi, pow_nonneg(0.0, a.hi, k).hi};
}

Interval sqr(const Interval& a) { return pow(a, 2); }

bool intersect(const Interval& a, const Interval& b, Interval& out) {
  double lo = std::max(a.lo, b.lo);
  double hi = std::min(a.hi, b.hi);
  if (lo > hi) return false;
  out = Interval(lo, hi);
  return true;
}

bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << x.lo << ", " << x.hi << ']';
}

IntervalBox::IntervalBox(std::vector<Interval> sides) : sides_(std::move(sides)) {
  if (sides_.empty()) throw std::invalid_argument("IntervalBox: zero dimensions");
}

IntervalBox IntervalBox::cube(std::size_t dims, double r) {
  return IntervalBox(std::vector<Interval>(dims, Interval(-r, r)));
}

IntervalBox IntervalBox::point(std::span<const double> x) {
  std::vector<Interval> s;
  s.reserve(x.size());
  for (double v : x) s.emplace_back(v);
  return IntervalBox(std::move(s));
}

std::vector<double> IntervalBox::midpoint() const {
  std::vector<double> m(sides_.size());
  for (std::size_t i = 0; i < sides_.size(); ++i) m[i] = sides_[i].mid();
  return m;
}

std::vector<double> IntervalBox::widths() const {
  std::vector<double> w(sides_.size());
  for (std::size_t i = 0; i < sides_.size(); ++i) w[i] = sides_[i].width();
  return w;
}

double IntervalBox::max_width() const {
  double w = 0.0;
  for (const auto& s : sides_) w = std::max(w, s.width());
  return w;
}

std::size_t IntervalBox::widest() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sides_.size(); ++i) {
    if (sides_[i].width() > sides_[best].width()) best = i;
  }
  return best;
}

std::pair<IntervalBox, IntervalBox> IntervalBox::bisect(std::size_t dim) const {
  IntervalBox left = *this, right = *this;
  double m = sides_[dim].mid();
  left.sides_[dim].hi = m;
  right.sides_[dim].lo = m;
  return {std::move(left), std::move(right)};
}

bool IntervalBox::contains(std::span<const double> x) const {
  assert(x.size() == sides_.size());
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (!sides_[i].contains(x[i])) return false;
  }
  return true;
}

bool IntervalBox::subset_of(const IntervalBox& o) const {
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (!sides_[i].subset_of(o.sides_[i])) return false;
  }
  return true;
}

bool IntervalBox::strictly_inside(const IntervalBox& o) const {
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (!sides_[i].strictly_inside(o.sides_[i])) return false;
  }
  return true;
}

bool IntervalBox::intersects(const IntervalBox& o) const {
  for (std::size_t i = 0; i < sides_.size(); ++i) {
    if (!sides_[i].intersects(o.sides_[i])) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const IntervalBox& b) {
  for (std::size_t i = 0; i < b.dims(); ++i) {
    if (i) os << " x ";
    os << b[i];
  }
  return os;
}

}  // namespace degreelab::polycore
