#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dioph/contfrac.hpp"
#include "dioph/io.hpp"

using namespace dioph;

TEST_CASE("golden convergents are Fibonacci") {
  auto cf = ContinuedFraction::golden();
  ConvergentTable t = convergents(cf, 6);
  std::vector<long> expect{1, 1, 2, 3, 5, 8, 13};  // q_0..q_6
  REQUIRE(t.rows.size() == 7);
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(t.rows[i].q == expect[i]);
  CHECK(t.rows[5].q == 8);  // q_5 = 8
}

TEST_CASE("single-quotient table") {
  auto cf = ContinuedFraction::finite({Integer(2)});
  auto r = cf.row(1);
  CHECK(r.p == 1);
  CHECK(r.q == 2);  // p_1/q_1 = 1/2
}

TEST_CASE("growth rule a_{k+1} = q_k") {
  auto cf = ContinuedFraction::growth_qk({Integer(2)});
  CHECK(cf.row(1).q == 2);
  CHECK(cf.quotient(2) == 2);  // a_2 = q_1
  CHECK(cf.row(2).q == 5);     // q_2 = 2*2 + 1
  CHECK(cf.row(3).q == 27);
  CHECK(cf.row(4).q == 734);
  CHECK(cf.row(5).q == 538783);
}

TEST_CASE("recurrences hold exactly") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> quot(1, 9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Integer> prefix;
    for (int i = 0; i < 28; ++i) prefix.push_back(quot(rng));
    auto cf = ContinuedFraction::constant_tail(prefix, quot(rng));
    for (std::size_t k = 2; k <= 26; ++k) {
      auto r2 = cf.row(k), r1 = cf.row(k - 1), r0 = cf.row(k - 2);
      Integer a = cf.quotient(k);
      CHECK(r2.p == a * r1.p + r0.p);
      CHECK(r2.q == a * r1.q + r0.q);
      CHECK(boost::multiprecision::gcd(r2.p, r2.q) == 1);
      CHECK(r2.q > r1.q);
    }
  }
}

TEST_CASE("qk_dist sandwich for golden") {
  auto cf = ContinuedFraction::golden();
  // k=4: q_4=5, q_5=8: inside (1/13, 1/8)
  Interval d4 = qk_dist(cf, 4);
  CHECK(d4.lo > Rational(1, 13));
  CHECK(d4.hi < Rational(1, 8));
  // k=5: q_5=8, q_6=13: inside (1/21, 1/13)
  Interval d5 = qk_dist(cf, 5);
  CHECK(d5.lo > Rational(1, 21));
  CHECK(d5.hi < Rational(1, 13));
}

TEST_CASE("qk_dist sandwich for random CFs, k <= 25") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> quot(1, 9);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<Integer> prefix;
    for (int i = 0; i < 28; ++i) prefix.push_back(quot(rng));
    auto cf = ContinuedFraction::constant_tail(prefix, quot(rng), 1 << 12);
    for (std::size_t k = 1; k <= 25; ++k) {
      Interval d = qk_dist(cf, k);
      Integer qk = cf.row(k).q, qk1 = cf.row(k + 1).q;
      CHECK(d.lo > Rational(Integer(1), qk1 + qk));
      CHECK(d.hi < Rational(Integer(1), qk1));
    }
  }
}

TEST_CASE("|q_k alpha - p_k| strictly decreasing") {
  auto cf = parse_cf("cf:const:3");
  Interval prev = qk_dist(cf, 1);
  for (std::size_t k = 2; k <= 25; ++k) {
    Interval cur = qk_dist(cf, k);
    CHECK(cur.hi < prev.lo);
    prev = cur;
  }
}

TEST_CASE("liouville truncation rows") {
  auto cf = ContinuedFraction::liouville(10);
  CHECK(cf.row(1).q == 10);
  CHECK(cf.row(2).q == 100);
  CHECK(cf.row(3).q == 1000000);  // 10^{3!}
  CHECK(cf.row(2).p == 11);       // 11/100
  CHECK(cf.row(3).p == 110001);   // truncation numerator
  // <q_k alpha> ~ q_k^-k: the scaled product sits in (1, 1.001)
  for (std::size_t k = 1; k <= 4; ++k) {
    Interval d = qk_dist(cf, k);
    Rational scale(ipow(cf.row(k).q, static_cast<unsigned>(k)));
    CHECK(d.lo * scale > 1);
    CHECK(d.hi * scale < Rational(1001, 1000));
  }
}

TEST_CASE("best approximation property") {
  auto golden = ContinuedFraction::golden();
  CHECK(best_approx_check(golden, 4, Integer(7)) == CheckResult::True);
  CHECK(best_approx_check(golden, 2, Integer(2)) == CheckResult::True);

  std::mt19937 rng(9);
  std::uniform_int_distribution<int> quot(1, 3);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Integer> prefix;
    for (int i = 0; i < 10; ++i) prefix.push_back(quot(rng));
    auto cf = ContinuedFraction::constant_tail(prefix, 1);
    for (std::size_t k = 2; k <= 6; ++k) {
      Integer N = cf.row(k + 1).q - 1;
      if (N > 300) N = 300;
      CHECK(best_approx_check(cf, k, N) == CheckResult::True);
    }
  }
}

TEST_CASE("property-2 exhaustive sweep") {
  auto cf = ContinuedFraction::golden();
  for (std::size_t k = 3; k <= 10; ++k) {
    Integer N = cf.row(k + 1).q - 1;
    CHECK(best_approx_check(cf, k, N) == CheckResult::True);
  }
}

TEST_CASE("irrationality exponent windows") {
  // golden: ratios tend to 1; trailing window of K=20 sits in [1, 1.1]
  auto golden = ContinuedFraction::golden();
  ExponentEstimate eg = irrationality_exponent_estimate(golden, 20);
  CHECK(eg.window_limsup.lo >= 1);
  CHECK(eg.window_limsup.hi <= Rational(11, 10));
  CHECK(eg.window_liminf.lo <= eg.window_limsup.hi);

  // growth rule: q_{k+1} ~ q_k^2, window limsup near 2
  auto growth = ContinuedFraction::growth_qk({Integer(2)}, 1 << 14);
  ExponentEstimate eg2 = irrationality_exponent_estimate(growth, 12);
  CHECK(eg2.window_limsup.hi >= Rational(18, 10));
  CHECK(eg2.window_limsup.hi <= Rational(22, 10));
  CHECK(eg2.window_limsup.lo >= Rational(18, 10));

  // liouville truncations: ratio (k+1)!/k! = k+1, so K=5 gives >= 4
  auto liou = ContinuedFraction::liouville(10);
  ExponentEstimate eg3 = irrationality_exponent_estimate(liou, 5);
  CHECK(eg3.window_limsup.lo >= 4);
}

TEST_CASE("generation overflow is reported, not truncated") {
  auto growth = ContinuedFraction::growth_qk({Integer(2)}, 4096);
  CHECK_THROWS_AS(convergents(growth, 20), GenerationOverflow);
  // a larger budget allows it
  auto big = ContinuedFraction::growth_qk({Integer(2)}, 1 << 14);
  CHECK_NOTHROW(convergents(big, 13));
}

TEST_CASE("convergent table CSV") {
  auto cf = ContinuedFraction::golden();
  std::string csv = csv_convergents(convergents(cf, 4));
  CHECK(csv == "k,a_k,p_k,q_k\n0,,0,1\n1,1,1,1\n2,1,1,2\n3,1,2,3\n4,1,3,5\n");
}
