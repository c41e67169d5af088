#pragma once

#include <algorithm>
#include <stdexcept>

#include "dioph/numeric.hpp"

namespace dioph {

// Closed interval with exact rational endpoints.  Every operation returns a
// sound enclosure of the pointwise image.
struct Interval {
  Rational lo, hi;

  Interval() : lo(0), hi(0) {}
  explicit Interval(Rational v) : lo(v), hi(std::move(v)) {}
  Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::invalid_argument("Interval: lo > hi");
  }

  static Interval point(const Rational& v) { return Interval(v); }

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
  bool is_point() const { return lo == hi; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }

  Interval operator+(const Interval& o) const { return Interval(lo + o.lo, hi + o.hi); }
  Interval operator-(const Interval& o) const { return Interval(lo - o.hi, hi - o.lo); }
  Interval operator-() const { return Interval(-hi, -lo); }
  Interval operator+(const Rational& r) const { return Interval(lo + r, hi + r); }
  Interval operator-(const Rational& r) const { return Interval(lo - r, hi - r); }

  Interval operator*(const Rational& r) const {
    if (r >= 0) return Interval(lo * r, hi * r);
    return Interval(hi * r, lo * r);
  }

  Interval operator*(const Interval& o) const {
    Rational a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    return Interval(std::min(std::min(a, b), std::min(c, d)),
                    std::max(std::max(a, b), std::max(c, d)));
  }

  Interval operator/(const Rational& r) const {
    if (r == 0) throw std::domain_error("Interval: divide by zero");
    if (r > 0) return Interval(lo / r, hi / r);
    return Interval(hi / r, lo / r);
  }

  // reciprocal, requires the interval to exclude 0
  Interval inv() const {
    if (lo <= 0 && hi >= 0) throw std::domain_error("Interval::inv: contains zero");
    return Interval(1 / hi, 1 / lo);
  }

  // x^e for e >= 0, valid on nonnegative intervals (all uses here are such)
  Interval pow_nonneg(unsigned e) const {
    if (lo < 0) throw std::domain_error("Interval::pow_nonneg: negative interval");
    return Interval(rpow(lo, static_cast<long>(e)), rpow(hi, static_cast<long>(e)));
  }

  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

inline Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

// outward rounding to denominator 2^bits; keeps long accumulations from
// growing unbounded denominators while staying sound
inline Interval coarsen(const Interval& x, unsigned bits = 64) {
  Integer scale = Integer(1) << bits;
  Integer lo = floor_div(num(x.lo) * scale, den(x.lo));
  Integer hi = -floor_div(-(num(x.hi) * scale), den(x.hi));  // ceil
  return Interval(Rational(lo, scale), Rational(hi, scale));
}

// enclosure of min(x, y): [min(lo), min(hi)] is exact for the min of two values
inline Interval min_enclosure(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::min(a.hi, b.hi));
}

inline Interval max_enclosure(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo, b.lo), std::max(a.hi, b.hi));
}

enum class Cmp { Less, Greater, Overlap };

// Less iff a.hi < b.lo, Greater iff a.lo > b.hi, Overlap otherwise (shared
// endpoints and equality are Overlap; the caller refines and retries).
inline Cmp compare(const Interval& a, const Interval& b) {
  if (a.hi < b.lo) return Cmp::Less;
  if (a.lo > b.hi) return Cmp::Greater;
  return Cmp::Overlap;
}

inline bool contains_integer(const Interval& x) {
  return rat_floor(x.hi) >= -rat_floor(-x.lo);  // floor(hi) >= ceil(lo)
}

inline bool contains_half_integer(const Interval& x) {
  // some odd k with k/2 in [lo, hi]
  Integer lo2 = -rat_floor(-(x.lo * 2));  // ceil(2 lo)
  Integer hi2 = rat_floor(x.hi * 2);
  if (lo2 > hi2) return false;
  if (lo2 % 2 != 0 || hi2 % 2 != 0) return true;
  return hi2 - lo2 >= 2;
}

// Exact image enclosure of x |-> <x> (distance to the nearest integer) over
// the interval.  The sawtooth has minima 0 at integers and maxima 1/2 at
// half-integers; with neither inside, the extrema sit at the endpoints.
inline Interval nearest_int_dist(const Interval& x) {
  const Rational half(1, 2);
  if (x.width() >= 1) return Interval(Rational(0), half);
  Rational dlo = nearest_int_dist(x.lo);
  Rational dhi = nearest_int_dist(x.hi);
  Rational mn = contains_integer(x) ? Rational(0) : std::min(dlo, dhi);
  Rational mx = contains_half_integer(x) ? half : std::max(dlo, dhi);
  return Interval(mn, mx);
}

}  // namespace dioph
