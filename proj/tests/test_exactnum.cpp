#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dioph/exact_real.hpp"
#include "dioph/io.hpp"

using namespace dioph;

TEST_CASE("rational parsing and canonical form") {
  CHECK(parse_rational("3/7") == Rational(3, 7));
  CHECK(parse_rational("-2/4") == Rational(-1, 2));
  CHECK(parse_rational("5") == Rational(5));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(rat_str(Rational(6, 4)) == "3/2");
  CHECK(rat_str(Rational(0)) == "0/1");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
}

TEST_CASE("nearest integer distance, exact rationals") {
  CHECK(nearest_int_dist(Rational(7, 3)) == Rational(1, 3));
  CHECK(nearest_int_dist(Rational(1, 2)) == Rational(1, 2));  // boundary
  CHECK(nearest_int_dist(Rational(0)) == Rational(0));
  CHECK(nearest_int_dist(Rational(-7, 3)) == Rational(1, 3));
  // integer shifts do not change the distance
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> num(-50, 50), d(1, 23), shift(-40, 40);
  for (int i = 0; i < 200; ++i) {
    Rational x(num(rng), d(rng));
    CHECK(nearest_int_dist(x) == nearest_int_dist(x + Rational(shift(rng))));
  }
}

TEST_CASE("refine: rationals are points, CF values nest") {
  ExactReal r(Rational(3, 7));
  Interval it = r.refine(10);
  CHECK(it.lo == Rational(3, 7));
  CHECK(it.hi == Rational(3, 7));

  ExactReal g{ContinuedFraction::golden()};
  Interval prev = g.refine(1);
  for (unsigned p = 2; p <= 64; ++p) {
    Interval cur = g.refine(p);
    CHECK(prev.contains(cur));
    CHECK(cur.width() * rpow(Rational(2), p) <= 1);
    prev = cur;
  }
  // contains (sqrt(5)-1)/2: check against the defining equation x^2 + x = 1
  Interval enc = g.refine(80);
  Interval eq = enc * enc + enc;
  CHECK(eq.lo <= 1);
  CHECK(eq.hi >= 1);
}

TEST_CASE("refine nesting for random CF values") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> quot(1, 9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Integer> prefix;
    for (int i = 0; i < 12; ++i) prefix.push_back(quot(rng));
    ExactReal x{ContinuedFraction::constant_tail(prefix, quot(rng))};
    Interval prev = x.refine(1);
    for (unsigned p = 2; p <= 64; p += 3) {
      Interval cur = x.refine(p);
      CHECK(prev.contains(cur));
      prev = cur;
    }
  }
}

TEST_CASE("nearest_int_dist on exact reals") {
  // <q_5 alpha> for golden, q_5 = 8: inside (1/21, 1/13)
  ExactReal g{ContinuedFraction::golden()};
  // 8 * alpha
  Interval enc = g.refine(64) * Rational(8);
  Interval d = nearest_int_dist(enc);
  CHECK(d.lo > Rational(1, 21));
  CHECK(d.hi < Rational(1, 13));

  DistResult dr = nearest_int_dist(ExactReal(Rational(7, 3)), 64);
  CHECK(dr.enc.lo == Rational(1, 3));
  CHECK(dr.enc.hi == Rational(1, 3));
  CHECK_FALSE(dr.precision_exhausted);

  // a rational exactly at a half-integer has distance exactly 1/2, no flag
  DistResult half = nearest_int_dist(ExactReal(Rational(1, 2)), 64);
  CHECK(half.enc.lo == Rational(1, 2));
  CHECK_FALSE(half.precision_exhausted);
}

TEST_CASE("vec_dist is the componentwise max") {
  std::vector<ExactReal> y;
  y.emplace_back(Rational(1, 3));
  y.emplace_back(Rational(1, 4));
  DistResult d = vec_dist(y, 64);
  CHECK(d.enc.lo == Rational(1, 3));

  std::vector<ExactReal> z{ExactReal(Rational(0)), ExactReal(Rational(0))};
  CHECK(vec_dist(z, 64).enc.hi == Rational(0));

  std::vector<ExactReal> w{ExactReal(Rational(3, 5)), ExactReal(Rational(49, 100))};
  CHECK(vec_dist(w, 64).enc.lo == Rational(49, 100));
}

TEST_CASE("interval compare") {
  Interval a(Rational(0), Rational(1, 4));
  Interval b(Rational(1, 2), Rational(1));
  CHECK(compare(a, b) == Cmp::Less);
  CHECK(compare(b, a) == Cmp::Greater);
  Interval c(Rational(0), Rational(1, 2));
  CHECK(compare(c, b) == Cmp::Overlap);  // touching endpoints overlap
  Interval p(Rational(3, 7));
  CHECK(compare(p, p) == Cmp::Overlap);  // equality is overlap
}

TEST_CASE("triangle inequality for <.> on enclosure midpoints") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(0, 99), d(1, 47);
  for (int i = 0; i < 300; ++i) {
    Rational x(num(rng), d(rng)), y(num(rng), d(rng));
    CHECK(nearest_int_dist(x + y) <= nearest_int_dist(x) + nearest_int_dist(y));
  }
}

TEST_CASE("exact real literals") {
  CHECK(parse_exact_real("3/7").is_rational());
  CHECK_FALSE(parse_exact_real("golden").is_rational());
  CHECK_FALSE(parse_exact_real("liouville:10").is_rational());
  CHECK_FALSE(parse_exact_real("cf:const:2").is_rational());
  CHECK_FALSE(parse_exact_real("cf:growth:2").is_rational());
  // finite CFs are rational and must be written as p/q
  CHECK_THROWS_AS(parse_exact_real("cf:[1,2,3]"), ParseError);
}

TEST_CASE("interval sawtooth image") {
  // interval straddling an integer has min 0
  Interval x(Rational(9, 10), Rational(11, 10));
  Interval d = nearest_int_dist(x);
  CHECK(d.lo == Rational(0));
  CHECK(d.hi == Rational(1, 10));
  // straddling a half-integer caps at 1/2
  Interval y(Rational(2, 5), Rational(3, 5));
  Interval dy = nearest_int_dist(y);
  CHECK(dy.hi == Rational(1, 2));
  CHECK(dy.lo == Rational(2, 5));
  // width >= 1 covers the full range
  Interval z(Rational(0), Rational(3, 2));
  CHECK(nearest_int_dist(z).hi == Rational(1, 2));
  CHECK(nearest_int_dist(z).lo == Rational(0));
}
