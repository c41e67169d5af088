#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "dioph/errors.hpp"

namespace dioph {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer den(const Rational& r) { return boost::multiprecision::denominator(r); }

// floor(a/b) for b > 0.
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Integer rat_floor(const Rational& x) { return floor_div(num(x), den(x)); }

// fractional part in [0,1)
inline Rational rat_frac(const Rational& x) { return x - Rational(rat_floor(x)); }

// distance to the nearest integer, in [0, 1/2]
inline Rational nearest_int_dist(const Rational& x) {
  Rational f = rat_frac(x);
  Rational g = 1 - f;
  return f <= g ? f : g;
}

// nearest integer; exact half ties round to the even integer
inline Integer round_nearest_even(const Rational& x) {
  Integer fl = rat_floor(x);
  Rational f = x - Rational(fl);
  if (f < Rational(1, 2)) return fl;
  if (f > Rational(1, 2)) return fl + 1;
  return (fl % 2 == 0) ? fl : fl + 1;
}

inline Integer ipow(Integer base, unsigned e) {
  Integer r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// x^e for integer e (negative allowed, x != 0 then)
inline Rational rpow(const Rational& x, long e) {
  if (e >= 0) {
    Rational r(ipow(num(x), static_cast<unsigned>(e)), ipow(den(x), static_cast<unsigned>(e)));
    return r;
  }
  if (x == 0) throw std::domain_error("rpow: 0 to negative power");
  unsigned ue = static_cast<unsigned>(-e);
  return Rational(ipow(den(x), ue), ipow(num(x), ue));
}

// floor(x^(1/n)) for x >= 0, n >= 1
inline Integer int_nth_root_floor(const Integer& x, unsigned n) {
  if (x < 0) throw std::domain_error("int_nth_root_floor: negative");
  if (n == 0) throw std::domain_error("int_nth_root_floor: n = 0");
  if (x == 0 || n == 1) return x;
  Integer lo = 0, hi = Integer(1) << (boost::multiprecision::msb(x) / n + 1);
  while (lo < hi) {
    Integer mid = (lo + hi + 1) / 2;
    if (ipow(mid, n) <= x) lo = mid;
    else hi = mid - 1;
  }
  return lo;
}

inline std::size_t bit_length(const Integer& x) {
  if (x == 0) return 0;
  return boost::multiprecision::msb(boost::multiprecision::abs(x)) + 1;
}

// Canonical rational rendering "p/q", q >= 1, gcd-reduced (cpp_rational keeps
// it reduced).  Used everywhere machine-readable output is emitted.
inline std::string rat_str(const Rational& r) {
  return num(r).str() + "/" + den(r).str();
}

inline std::string int_str(const Integer& z) { return z.str(); }

// Parses "p/q", "p" or a decimal like "0.25" into an exact rational.
inline Rational parse_rational(std::string_view s) {
  auto bad = [&] { throw ParseError("bad rational literal: '" + std::string(s) + "'"); };
  if (s.empty()) bad();
  auto slash = s.find('/');
  try {
    if (slash != std::string_view::npos) {
      Integer p(std::string(s.substr(0, slash)));
      Integer q(std::string(s.substr(slash + 1)));
      if (q == 0) bad();
      return Rational(p, q);
    }
    auto dot = s.find('.');
    if (dot != std::string_view::npos) {
      std::string ip(s.substr(0, dot)), fp(s.substr(dot + 1));
      if (fp.empty()) bad();
      for (char c : fp)
        if (!std::isdigit(static_cast<unsigned char>(c))) bad();
      bool neg = !ip.empty() && ip[0] == '-';
      Integer whole = ip.empty() || ip == "-" ? Integer(0) : Integer(ip);
      Integer scale = ipow(Integer(10), static_cast<unsigned>(fp.size()));
      Integer frac(fp);
      Rational r = Rational(boost::multiprecision::abs(whole)) + Rational(frac, scale);
      return neg ? -r : r;
    }
    return Rational(Integer(std::string(s)));
  } catch (const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) throw;
    bad();
  }
  return Rational(0);  // unreachable
}

// ---- certified log2 brackets -------------------------------------------------
//
// log2(x) for x >= 1 is bracketed by [u/v, (u+1)/v] with u = msb(x^v).  For
// very wide x the plain bit-length bracket [msb, msb+1] is already relatively
// tight and raising to a power would be wasteful, so refinement only happens
// below `kRefineBitCap` bits.

struct RatPair {
  Rational lo, hi;
};

inline constexpr std::size_t kRefineBitCap = 1 << 14;

inline RatPair log2_bracket(const Integer& x, unsigned denom = 256) {
  if (x <= 0) throw std::domain_error("log2_bracket: x <= 0");
  if (x == 1) return {Rational(0), Rational(0)};
  std::size_t bits = bit_length(x);
  if ((Integer(1) << (bits - 1)) == x)  // exact power of two
    return {Rational(bits - 1), Rational(bits - 1)};
  if (bits > kRefineBitCap || denom <= 1)
    return {Rational(bits - 1), Rational(bits)};
  Integer p = ipow(x, denom);
  std::size_t u = bit_length(p) - 1;
  return {Rational(Integer(u), Integer(denom)), Rational(Integer(u) + 1, Integer(denom))};
}

inline RatPair log2_bracket(const Rational& x, unsigned denom = 256) {
  if (x <= 0) throw std::domain_error("log2_bracket: x <= 0");
  RatPair pn = log2_bracket(num(x), denom);
  RatPair pd = log2_bracket(den(x), denom);
  return {pn.lo - pd.hi, pn.hi - pd.lo};
}

// certified bracket of log(a)/log(b) for integers a, b >= 2
inline RatPair log_ratio_bracket(const Integer& a, const Integer& b, unsigned denom = 256) {
  RatPair la = log2_bracket(a, denom);
  RatPair lb = log2_bracket(b, denom);
  if (la.lo <= 0 || lb.lo <= 0) throw std::domain_error("log_ratio_bracket: operand < 2");
  return {la.lo / lb.hi, la.hi / lb.lo};
}

}  // namespace dioph
