#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dioph/io.hpp"
#include "dioph/lattice.hpp"
#include "oracle_helpers.hpp"

using namespace dioph;

TEST_CASE("shell enumeration counts and order") {
  CHECK(shell_points(1, 3) == std::vector<Point>{{-3}, {3}});
  CHECK(shell_points(2, 1).size() == 8);    // 9 - 1
  CHECK(shell_points(3, 2).size() == 98);   // 125 - 27
  // lexicographic and duplicate-free
  auto pts = shell_points(2, 2);
  std::set<Point> seen(pts.begin(), pts.end());
  CHECK(seen.size() == pts.size());
  CHECK(std::is_sorted(pts.begin(), pts.end()));
  for (const auto& q : pts) CHECK(std::max(std::labs(q[0]), std::labs(q[1])) == 2);
}

TEST_CASE("shell counts sum to the cube") {
  for (unsigned n = 1; n <= 3; ++n) {
    long T = n == 3 ? 6 : 12;
    Integer total(0);
    for (long t = 1; t <= T; ++t) total += Integer(shell_points(n, t).size());
    CHECK(total == ipow(Integer(2 * T + 1), n) - 1);
  }
}

TEST_CASE("min table, alpha = 1/3 homogeneous") {
  AffineSystem sys = AffineSystem::scalar(ExactReal(Rational(1, 3)), ExactReal(Rational(0)));
  MinTable t = min_table(sys, 1, 6);
  CHECK(t.at(1).value.lo == Rational(1, 3));
  CHECK(t.at(2).value.lo == Rational(1, 3));
  CHECK(t.at(3).value.lo == Rational(0));  // q = 3 hits an integer
  CHECK(t.at(6).value.hi == Rational(0));
  CHECK(t.at(3).argmin == Point{3});
}

TEST_CASE("golden argmin tracks Fibonacci") {
  AffineSystem sys = AffineSystem::scalar(ExactReal(ContinuedFraction::golden()),
                                          ExactReal(Rational(0)));
  MinTable t = min_table(sys, 1, 100);
  std::vector<long> fib{1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  for (std::size_t i = 0; i + 1 < fib.size(); ++i) {
    // between consecutive Fibonacci numbers the argmin stays put
    for (long u = fib[i]; u < fib[i + 1]; ++u) CHECK(t.at(u).argmin == Point{fib[i]});
  }
}

TEST_CASE("incremental equals naive full enumeration") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 12; ++trial) {
    AffineSystem sys = oracle::random_system(rng, 2, 30);
    long l = 1 + (trial % 3);
    MinTable inc = min_table(sys, l, 12);
    auto naive = oracle::naive_min_rows(sys, l, 12);
    REQUIRE(inc.rows.size() == naive.size());
    for (std::size_t i = 0; i < naive.size(); ++i) {
      CHECK(inc.rows[i].value.lo == naive[i].value);
      CHECK(inc.rows[i].value.hi == naive[i].value);
      CHECK(inc.rows[i].argmin == naive[i].argmin);
    }
  }
}

TEST_CASE("M is monotone: non-increasing in t, non-decreasing in l") {
  std::mt19937 rng(77);
  AffineSystem sys = oracle::random_system(rng, 2, 20);
  MinTable t1 = min_table(sys, 1, 15);
  MinTable t3 = min_table(sys, 3, 15);
  for (std::size_t i = 1; i < t1.rows.size(); ++i)
    CHECK(t1.rows[i].value.lo <= t1.rows[i - 1].value.lo);
  for (long t = 3; t <= 15; ++t) CHECK(t1.at(t).value.lo <= t3.at(t).value.lo);
}

TEST_CASE("parallel reduction is deterministic") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 4; ++trial) {
    AffineSystem sys = oracle::random_system(rng, 3, 50);
    MinTable w1 = min_table(sys, 1, 9, 256, 1);
    MinTable w2 = min_table(sys, 1, 9, 256, 2);
    MinTable w8 = min_table(sys, 1, 9, 256, 8);
    std::string c1 = csv_min_table(w1, sys.n);
    CHECK(c1 == csv_min_table(w2, sys.n));
    CHECK(c1 == csv_min_table(w8, sys.n));
  }
}

TEST_CASE("record minima: golden gives Fibonacci records") {
  AffineSystem sys = AffineSystem::scalar(ExactReal(ContinuedFraction::golden()),
                                          ExactReal(Rational(0)));
  RecordSequence rec = record_minima(sys, 100);
  std::vector<long> fib{1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  REQUIRE(rec.entries.size() == fib.size());
  for (std::size_t i = 0; i < fib.size(); ++i) {
    CHECK(rec.entries[i].t == fib[i]);
    CHECK(rec.entries[i].q == Point{fib[i]});
  }
  for (std::size_t i = 1; i < rec.entries.size(); ++i)
    CHECK(rec.entries[i].value.hi < rec.entries[i - 1].value.lo);
}

TEST_CASE("records terminate at exact zero") {
  AffineSystem sys = AffineSystem::scalar(ExactReal(Rational(1, 3)), ExactReal(Rational(0)));
  RecordSequence rec = record_minima(sys, 50);
  REQUIRE(rec.entries.size() == 2);  // t=1 (1/3), t=3 (0)
  CHECK(rec.entries[0].t == 1);
  CHECK(rec.entries[1].t == 3);
  CHECK(rec.entries[1].value.hi == 0);
}

TEST_CASE("records equal the distinct values of M_1") {
  std::mt19937 rng(404);
  for (int trial = 0; trial < 8; ++trial) {
    AffineSystem sys = oracle::random_system(rng, 2, 25);
    MinTable table = min_table(sys, 1, 20);
    RecordSequence rec = record_minima(sys, 20);
    std::vector<Rational> distinct;
    for (const auto& row : table.rows)
      if (distinct.empty() || row.value.lo < distinct.back()) distinct.push_back(row.value.lo);
    REQUIRE(rec.entries.size() == distinct.size());
    for (std::size_t i = 0; i < distinct.size(); ++i)
      CHECK(rec.entries[i].value.lo == distinct[i]);
  }
}

TEST_CASE("badness profile basics") {
  // alpha = 1/2: B hits zero at t = 2
  AffineSystem half = AffineSystem::scalar(ExactReal(Rational(1, 2)), ExactReal(Rational(0)));
  BadnessProfile p = badness_profile(half, 10);
  CHECK(p.rows[0].value.lo == Rational(1, 2));
  CHECK(p.rows[1].value.lo == Rational(0));
  CHECK(p.uniform_c == 0);

  // B is non-increasing
  std::mt19937 rng(55);
  AffineSystem sys = oracle::random_system(rng, 2, 20);
  BadnessProfile bp = badness_profile(sys, 12);
  for (std::size_t i = 1; i < bp.rows.size(); ++i)
    CHECK(bp.rows[i].value.lo <= bp.rows[i - 1].value.lo);
}

TEST_CASE("golden badness certificate at small horizon") {
  AffineSystem sys = AffineSystem::scalar(ExactReal(ContinuedFraction::golden()),
                                          ExactReal(Rational(0)));
  BadnessProfile p = badness_profile(sys, 100);
  // uniform bound is q=1's value 1 - alpha ~ 0.382
  CHECK(p.uniform_c > Rational(38, 100));
  CHECK(p.uniform_c < Rational(39, 100));
  // tail window (t > 10) stays above 0.44
  CHECK(p.certificate_c > Rational(44, 100));
}

TEST_CASE("orbit-shifted golden system reaches zero") {
  AffineSystem sys;
  sys.m = sys.n = 1;
  sys.A = {ExactReal(ContinuedFraction::golden())};
  sys.gamma = {ExactReal(Rational(0))};
  sys.gamma_orbit = std::vector<long>{4};  // gamma = frac(4 alpha)
  BadnessProfile p = badness_profile(sys, 10);
  CHECK(p.rows.back().value.hi == 0);  // exact zero at q = 4
  MinTable t = min_table(sys, 1, 10);
  CHECK(t.at(4).value.hi == 0);
  CHECK(t.at(4).argmin == Point{4});
}

TEST_CASE("trivial member construction") {
  // gamma = (1/2), n = 2: A = [1/2 0], zero at (1, k)
  auto sys = build_trivial_member({ExactReal(Rational(1, 2))}, 2);
  DistanceOracle oracle(sys);
  CHECK(oracle.dist(Point{1, 5}).enc.hi == 0);
  CHECK(oracle.dist(Point{1, -3}).enc.hi == 0);
  MinTable t = min_table(sys, 1, 5);
  for (const auto& row : t.rows) CHECK(row.value.hi == 0);

  // gamma = (1/3, 2/3), n = 3: zero at (1, 7, 0)
  auto sys2 = build_trivial_member({ExactReal(Rational(1, 3)), ExactReal(Rational(2, 3))}, 3);
  DistanceOracle o2(sys2);
  CHECK(o2.dist(Point{1, 7, 0}).enc.hi == 0);

  // gamma = (0,0): distance 0 at (1,0)
  auto sys3 = build_trivial_member({ExactReal(Rational(0)), ExactReal(Rational(0))}, 2);
  DistanceOracle o3(sys3);
  CHECK(o3.dist(Point{1, 0}).enc.hi == 0);

  CHECK_THROWS_AS(build_trivial_member({ExactReal(Rational(1, 2))}, 1), std::invalid_argument);
}

TEST_CASE("dirichlet tests") {
  // trivial member: true for every psi > 0 and every T
  auto triv = build_trivial_member({ExactReal(Rational(2, 5))}, 2);
  auto res = dirichlet_test(triv, ApproxFunction::power(Rational(1, 100), 3),
                            {Integer(1), Integer(5), Integer(50)});
  for (auto r : res) CHECK(r == CheckResult::True);

  // psi(T) = 1: always true (distances are <= 1/2 < 1)
  AffineSystem golden = AffineSystem::scalar(ExactReal(ContinuedFraction::golden()),
                                             ExactReal(Rational(0)));
  auto ones = dirichlet_test(golden, ApproxFunction::power(1, 0),
                             {Integer(1), Integer(7), Integer(100)});
  for (auto r : ones) CHECK(r == CheckResult::True);

  // psi(T) = (1/10) T^-1 against golden: never satisfiable (q<qa> >= 0.38)
  auto never = dirichlet_test(golden, ApproxFunction::power(Rational(1, 10), 1),
                              {Integer(1), Integer(10), Integer(100), Integer(1000)});
  for (auto r : never) CHECK(r == CheckResult::False);
}

TEST_CASE("singularity scan") {
  auto triv = build_trivial_member({ExactReal(Rational(1, 3))}, 2);
  SingularityScan s = singularity_scan(triv, Rational(1), {Rational(1), Rational(1, 10)},
                                       Integer(30));
  for (const auto& pe : s.per_eps) {
    CHECK(pe.fraction_true() == 1);
    CHECK(pe.failures.empty());
  }

  // kappa = 0, eps = 1: psi = 1, all true for any system
  AffineSystem golden = AffineSystem::scalar(ExactReal(ContinuedFraction::golden()),
                                             ExactReal(Rational(0)));
  SingularityScan s0 = singularity_scan(golden, Rational(0), {Rational(1)}, Integer(20));
  CHECK(s0.per_eps[0].fraction_true() == 1);

  // golden, kappa = 1, eps = 1/10: failures everywhere
  SingularityScan s1 = singularity_scan(golden, Rational(1), {Rational(1, 10)}, Integer(50));
  CHECK(s1.per_eps[0].true_count == 0);
  CHECK(s1.per_eps[0].false_count == 50);
}

TEST_CASE("system spec files") {
  AffineSystem sys = parse_system("m = 1\nn = 1\nA = golden\ngamma = 0/1\n");
  CHECK(sys.m == 1);
  CHECK_FALSE(sys.A[0].is_rational());
  CHECK(sys.homogeneous());

  AffineSystem orb = parse_system("# comment\nm = 1\nn = 1\nA = 2/5\ngamma = orbit:3\n");
  REQUIRE(orb.gamma_orbit.has_value());
  CHECK(orb.gamma_orbit->at(0) == 3);

  CHECK_THROWS_AS(parse_system("m = 1\nn = 1\nA = 1/0\ngamma = 0/1\n"), ParseError);
  CHECK_THROWS_AS(parse_system("m = 1\nn = 1\nA = 3/2\ngamma = 0/1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_system("m = 1\nA = 1/2\ngamma = 0/1\n"), ParseError);
}
