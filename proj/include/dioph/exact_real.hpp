#pragma once

#include <span>
#include <variant>
#include <vector>

#include "dioph/contfrac.hpp"
#include "dioph/interval.hpp"

namespace dioph {

inline constexpr unsigned kDefaultBudgetBits = 256;

// A real number known exactly: either a rational or a continued-fraction
// value refinable to nested enclosures of arbitrary precision.  Finite
// continued fractions are rational and are rejected here (use the rational
// form instead); irrationals always enter through a quotient rule.
class ExactReal {
 public:
  ExactReal() : v_(Rational(0)) {}
  ExactReal(Rational r) : v_(std::move(r)) {}
  ExactReal(ContinuedFraction cf) : v_(std::move(cf)) {
    if (std::get<ContinuedFraction>(v_).is_finite())
      throw std::invalid_argument(
          "finite continued fractions are rational; pass a p/q rational instead");
  }

  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  const Rational& rational() const { return std::get<Rational>(v_); }
  const ContinuedFraction& cf() const { return std::get<ContinuedFraction>(v_); }

  // Enclosure of width <= 2^-precision_bits; rationals come back as points.
  Interval refine(unsigned precision_bits) const {
    if (is_rational()) return Interval(rational());
    return cf().enclosure(precision_bits);
  }

 private:
  std::variant<Rational, ContinuedFraction> v_;
};

// Interval result with a flag set when the requested decision could not be
// narrowed within the precision budget (the enclosure itself stays sound).
struct DistResult {
  Interval enc;
  bool precision_exhausted = false;
};

// <x>: distance to the nearest integer, in [0, 1/2].  Exact for rationals.
// For continued-fraction values the result is the image enclosure of a
// 2^-budget refinement; the flag is raised when the enclosure straddles a
// half-integer (distance is still well defined and enclosed, only the
// nearest-integer choice is undecided).
inline DistResult nearest_int_dist(const ExactReal& x, unsigned budget_bits = kDefaultBudgetBits) {
  if (x.is_rational())
    return {Interval(nearest_int_dist(x.rational())), false};
  Interval enc = x.refine(budget_bits);
  return {nearest_int_dist(enc), contains_half_integer(enc)};
}

// <y> = max_i <y_i> for the supremum norm distance to Z^m.
inline DistResult vec_dist(std::span<const ExactReal> y, unsigned budget_bits = kDefaultBudgetBits) {
  if (y.empty()) throw std::invalid_argument("vec_dist: empty vector");
  DistResult r = nearest_int_dist(y[0], budget_bits);
  for (std::size_t i = 1; i < y.size(); ++i) {
    DistResult ri = nearest_int_dist(y[i], budget_bits);
    r.enc = max_enclosure(r.enc, ri.enc);
    r.precision_exhausted = r.precision_exhausted || ri.precision_exhausted;
  }
  return r;
}

}  // namespace dioph
