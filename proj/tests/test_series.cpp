#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dioph/io.hpp"
#include "dioph/series.hpp"
#include "oracle_helpers.hpp"

using namespace dioph;

namespace {
AffineSystem golden_sys() {
  return AffineSystem::scalar(ExactReal(ContinuedFraction::golden()), ExactReal(Rational(0)));
}
AffineSystem third_sys() {
  return AffineSystem::scalar(ExactReal(Rational(1, 3)), ExactReal(Rational(0)));
}
}  // namespace

TEST_CASE("series partial: alpha = 1/3 sums to 2/3 and stops") {
  SeriesLedger led = series_partial(third_sys(), 1, 40);
  CHECK(led.partial.lo == Rational(2, 3));
  CHECK(led.partial.hi == Rational(2, 3));
  // single-term case l = T
  SeriesLedger one = series_partial(third_sys(), 2, 2);
  CHECK(one.partial.lo == Rational(1, 3));  // 2^0 * M_2(2) = <2/3>
}

TEST_CASE("series partial diverges blockwise for the golden ratio") {
  // every record block [q_k, q_{k+1}) contributes at least
  // (q_{k+1}-q_k)/(q_{k+1}+q_k) > 1/5, so P_1 grows past any bound with the
  // record count (log-speed in T)
  SeriesLedger t250 = series_partial(golden_sys(), 1, 250);
  SeriesLedger t500 = series_partial(golden_sys(), 1, 500);
  CHECK(t500.partial.lo > Rational(3));
  CHECK(t500.partial.lo > t250.partial.hi + Rational(1, 10));
}

TEST_CASE("regrouped sum equals the direct sum exactly") {
  std::mt19937 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    AffineSystem sys = oracle::random_system(rng, 2, 25);
    long T = 30 + (trial % 3) * 10;
    SeriesLedger direct = series_partial(sys, 1, T);
    RecordSequence rec = record_minima(sys, T);
    SeriesLedger regrouped = series_regrouped(rec, T, sys.m, sys.n);
    CHECK(direct.partial.lo == regrouped.partial.lo);
    CHECK(direct.partial.hi == regrouped.partial.hi);
  }
  // single-record sequence: one block
  AffineSystem triv = build_trivial_member({ExactReal(Rational(1, 4))}, 2);
  RecordSequence rec = record_minima(triv, 10);
  REQUIRE(rec.entries.size() == 1);
  SeriesLedger lg = series_regrouped(rec, 10, triv.m, triv.n);
  CHECK(lg.partial.hi == 0);
}

TEST_CASE("golden regrouped blocks sit above the sandwich floor") {
  AffineSystem sys = golden_sys();
  RecordSequence rec = record_minima(sys, 100);
  // per-record block ~ <q_k a>(q_{k+1} - q_k) >= (q_{k+1}-q_k)/(2 q_{k+1}) > 1/6
  SeriesLedger lg = series_regrouped(rec, 100, 1, 1);
  for (std::size_t i = 0; i + 1 < lg.terms.size(); ++i)
    CHECK(lg.terms[i].second.lo > Rational(1, 6));
}

TEST_CASE("prefix inequality") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    AffineSystem sys = oracle::random_system(rng, 2, 30);
    CHECK(prefix_inequality_check(sys, 1, 3, 30));
  }
  // l = l0 reduces to P <= P
  AffineSystem sys = third_sys();
  CHECK(prefix_inequality_check(sys, 2, 2, 20));
  CHECK(prefix_inequality_check(sys, 1, 3, 30));
}

TEST_CASE("olivier diagnostic") {
  // a_t = t^-2, n = 1: hypothesis holds, trend decays
  OlivierReport r1 = olivier_check(SequenceSpec{Rational(1), 2, 0}, 1, Integer(1000),
                                   Rational(1, 100));
  CHECK(r1.hypothesis_convergent);
  CHECK_FALSE(r1.violation);
  CHECK(r1.trend_max.hi < Rational(1, 100));

  // a_t = 1/(t^2 log^2(t+1)), n = 2: borderline hypothesis, trend 1/log^2 -> 0
  OlivierReport r2 = olivier_check(SequenceSpec{Rational(1), 2, 2}, 2, Integer(100000),
                                   Rational(1, 100));
  CHECK(r2.hypothesis_convergent);
  CHECK_FALSE(r2.violation);
  CHECK(r2.trend_max.hi < Rational(1, 100));

  // a_t = 1/(t log(t+1)), n = 1: out of hypothesis, no claim
  OlivierReport r3 = olivier_check(SequenceSpec{Rational(1), 1, 1}, 1, Integer(1000),
                                   Rational(1, 100));
  CHECK_FALSE(r3.hypothesis_convergent);
  CHECK_FALSE(r3.violation);
}

TEST_CASE("sing trend") {
  AffineSystem triv = build_trivial_member({ExactReal(Rational(1, 5))}, 2);
  SingTrend t1 = sing_trend(triv, 16);
  for (const auto& [t, v] : t1.rows) CHECK(v.hi == 0);

  // golden: bounded away from zero
  SingTrend t2 = sing_trend(golden_sys(), 64);
  for (const auto& [w, v] : t2.window_max) CHECK(v.lo > Rational(1, 3));

  // alpha = 1/3: zero from t = 3
  SingTrend t3 = sing_trend(third_sys(), 16);
  CHECK(t3.rows[0].second.lo > 0);
  for (const auto& [t, v] : t3.rows)
    if (t >= 3) CHECK(v.hi == 0);
}

TEST_CASE("classify: exact zero path") {
  ConvergenceVerdict v = classify(third_sys(), 20);
  CHECK(v.verdict == Verdict::ConvergedWithBound);
  REQUIRE(v.bound.has_value());
  CHECK(v.bound->hi == Rational(2, 3));
  // re-check at a doubled horizon: the bound still dominates
  SeriesLedger led = series_partial(third_sys(), 1, 40);
  CHECK(led.partial.hi <= v.bound->hi);
}

TEST_CASE("classify: rational system without zeros diverges past the residue period") {
  // alpha = 1/3, gamma = 1/7: 7q = 3 mod 21 has no solution, D = 21
  AffineSystem sys = AffineSystem::scalar(ExactReal(Rational(1, 3)), ExactReal(Rational(1, 7)));
  ConvergenceVerdict v = classify(sys, 25);  // 25 >= D = 21
  CHECK(v.verdict == Verdict::DivergedWithWitness);
  // below the residue period the verdict stays honest
  ConvergenceVerdict u = classify(sys, 10);
  CHECK(u.verdict == Verdict::Undecided);
}

TEST_CASE("classify: orbit-shifted golden diverges via the shifted comparison") {
  AffineSystem sys;
  sys.m = sys.n = 1;
  sys.A = {ExactReal(ContinuedFraction::golden())};
  sys.gamma = {ExactReal(Rational(0))};
  sys.gamma_orbit = std::vector<long>{5};
  ConvergenceVerdict v = classify(sys, 200);
  CHECK(v.verdict == Verdict::DivergedWithWitness);
  CHECK(v.assumes_bad_persists);  // the badness constant is horizon-certified only
}

TEST_CASE("classify: homogeneous golden diverges by block bounds") {
  ConvergenceVerdict v = classify(golden_sys(), 100);
  CHECK(v.verdict == Verdict::DivergedWithWitness);
  CHECK_FALSE(v.assumes_bad_persists);
}

TEST_CASE("classify: CF gamma stays undecided") {
  AffineSystem sys;
  sys.m = sys.n = 1;
  sys.A = {ExactReal(ContinuedFraction::golden())};
  sys.gamma = {ExactReal(ContinuedFraction::constant(3))};  // some irrational target
  ConvergenceVerdict v = classify(sys, 100);
  CHECK(v.verdict == Verdict::Undecided);
  CHECK(v.assumes_positivity);
}

TEST_CASE("classify: declared tail models") {
  ConvergenceVerdict v = classify(third_sys(), 20, TailModel{TailModel::Kind::ExactZero, 0});
  CHECK(v.verdict == Verdict::ConvergedWithBound);

  AffineSystem golden = golden_sys();
  TailModel pt{TailModel::Kind::PowerTail, Rational(2)};
  ConvergenceVerdict vp = classify(golden, 50, pt);
  CHECK(vp.verdict == Verdict::ConvergedWithBound);  // conditional on the declared model
  CHECK(vp.justification.find("caller-supplied") != std::string::npos);

  CHECK_THROWS_AS(classify(golden, 50, TailModel{TailModel::Kind::PowerTail, Rational(1, 2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify(golden, 50, TailModel{TailModel::Kind::ExactZero, 0}),
                  std::invalid_argument);
}

TEST_CASE("ledger CSV shape") {
  SeriesLedger led = series_partial(third_sys(), 1, 4);
  std::string csv = csv_ledger(led);
  CHECK(csv.rfind("t,term_lo,term_hi,partial_lo,partial_hi\n", 0) == 0);
  CHECK(csv.find("3,0/1,0/1,2/3,2/3") != std::string::npos);
}
