#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "dioph/interval.hpp"
#include "dioph/numeric.hpp"

namespace dioph {

enum class CheckResult { True, False, Undecided };

// A number in [0,1) given by its continued fraction [0; a_1, a_2, ...].
//
// Quotient sources:
//   Finite       - a fixed list (a rational value; mostly for table work)
//   ConstantTail - a prefix followed by a_k = c forever (golden = all ones)
//   GrowthQk     - a prefix, then a_{k+1} = q_k
//   Liouville    - sum_{j>=1} b^{-j!}.  This source has no usable quotient
//                  stream; its convergent rows are the truncation convergents
//                  (P_k, b^{k!}), k >= 1, and enclosures come from exact tail
//                  brackets of the defining series.
//
// The quotient/convergent cache grows append-only under a mutex; readers see
// a consistent prefix.  Convergent denominators are capped at `max_bits` bits
// and generation beyond that throws GenerationOverflow.
class ContinuedFraction {
 public:
  enum class Source { Finite, ConstantTail, GrowthQk, Liouville };

  static ContinuedFraction finite(std::vector<Integer> quotients, std::size_t max_bits = 4096) {
    return ContinuedFraction(Source::Finite, std::move(quotients), 0, 0, max_bits);
  }
  static ContinuedFraction constant(Integer c, std::size_t max_bits = 4096) {
    return ContinuedFraction(Source::ConstantTail, {}, std::move(c), 0, max_bits);
  }
  static ContinuedFraction constant_tail(std::vector<Integer> prefix, Integer c,
                                         std::size_t max_bits = 4096) {
    return ContinuedFraction(Source::ConstantTail, std::move(prefix), std::move(c), 0, max_bits);
  }
  static ContinuedFraction growth_qk(std::vector<Integer> seed, std::size_t max_bits = 4096) {
    if (seed.empty()) throw std::invalid_argument("growth_qk: empty seed");
    return ContinuedFraction(Source::GrowthQk, std::move(seed), 0, 0, max_bits);
  }
  static ContinuedFraction golden() { return constant(1); }
  static ContinuedFraction liouville(unsigned base, std::size_t max_bits = 1 << 20) {
    if (base < 2) throw std::invalid_argument("liouville: base must be >= 2");
    return ContinuedFraction(Source::Liouville, {}, 0, base, max_bits);
  }

  Source source() const { return impl_->source; }
  bool is_liouville() const { return impl_->source == Source::Liouville; }
  bool is_finite() const { return impl_->source == Source::Finite; }
  unsigned liouville_base() const { return impl_->base; }
  std::size_t max_bits() const { return impl_->max_bits; }

  // number of quotients a finite source can still produce; infinite otherwise
  std::size_t finite_length() const { return impl_->prefix.size(); }

  // a_k, k >= 1 (quotient sources only)
  Integer quotient(std::size_t k) const {
    if (is_liouville())
      throw std::logic_error("liouville source has no quotient stream");
    std::lock_guard<std::mutex> g(impl_->mu);
    ensure_quotients_locked(k);
    return impl_->a[k - 1];
  }

  struct Row {
    std::size_t k;
    Integer a;  // a_k; 0 for k = 0 and for liouville truncation rows
    Integer p, q;
  };

  // convergent row: quotient sources have k >= 0 (row 0 is 0/1); the
  // liouville source has truncation rows k >= 1 with q_k = b^{k!}.
  Row row(std::size_t k) const {
    std::lock_guard<std::mutex> g(impl_->mu);
    if (is_liouville()) {
      ensure_liouville_rows_locked(k);
      return Row{k, Integer(0), impl_->p[k - 1], impl_->q[k - 1]};
    }
    ensure_quotients_locked(k);
    return Row{k, k == 0 ? Integer(0) : impl_->a[k - 1], impl_->p[k], impl_->q[k]};
  }

  // Nested rational enclosure of the value with width <= 2^-precision_bits.
  Interval enclosure(unsigned precision_bits) const {
    std::lock_guard<std::mutex> g(impl_->mu);
    if (is_liouville()) return liouville_enclosure_locked(precision_bits);
    return quotient_enclosure_locked(precision_bits);
  }

 private:
  struct Impl {
    Source source;
    std::vector<Integer> prefix;  // quotient seed (quotient sources)
    Integer constant_c;
    unsigned base = 0;
    std::size_t max_bits;
    mutable std::mutex mu;
    // caches (guarded by mu)
    mutable std::vector<Integer> a;     // quotients a_1..; quotient sources
    mutable std::vector<Integer> p, q;  // quotient sources: k = 0..; liouville: rows 1..
    mutable std::vector<Integer> lfact; // liouville: k! for generated rows
  };

  ContinuedFraction(Source s, std::vector<Integer> prefix, Integer c, unsigned base,
                    std::size_t max_bits) {
    impl_ = std::make_shared<Impl>();
    impl_->source = s;
    impl_->prefix = std::move(prefix);
    impl_->constant_c = std::move(c);
    impl_->base = base;
    impl_->max_bits = max_bits;
    if (s != Source::Liouville) {
      impl_->p = {Integer(0)};
      impl_->q = {Integer(1)};
      for (const Integer& ai : impl_->prefix)
        if (ai < 1) throw std::invalid_argument("continued fraction quotients must be >= 1");
      if (s == Source::ConstantTail && impl_->constant_c < 1)
        throw std::invalid_argument("constant tail quotient must be >= 1");
    }
  }

  // --- quotient sources ---

  void ensure_quotients_locked(std::size_t k) const {
    while (impl_->a.size() < k) {
      std::size_t i = impl_->a.size();  // generating a_{i+1}
      Integer next;
      switch (impl_->source) {
        case Source::Finite:
          if (i >= impl_->prefix.size())
            throw std::out_of_range("finite continued fraction exhausted at a_" +
                                    std::to_string(i + 1));
          next = impl_->prefix[i];
          break;
        case Source::ConstantTail:
          next = i < impl_->prefix.size() ? impl_->prefix[i] : impl_->constant_c;
          break;
        case Source::GrowthQk:
          next = i < impl_->prefix.size() ? impl_->prefix[i] : impl_->q[i];
          break;
        case Source::Liouville:
          throw std::logic_error("unreachable");
      }
      Integer pk = next * impl_->p[i] + (i >= 1 ? impl_->p[i - 1] : Integer(1));
      Integer qk = next * impl_->q[i] + (i >= 1 ? impl_->q[i - 1] : Integer(0));
      if (bit_length(qk) > impl_->max_bits)
        throw GenerationOverflow(i + 1, bit_length(qk), impl_->max_bits);
      impl_->a.push_back(std::move(next));
      impl_->p.push_back(std::move(pk));
      impl_->q.push_back(std::move(qk));
    }
  }

  Interval quotient_enclosure_locked(unsigned precision_bits) const {
    // consecutive convergents bracket the value; width 1/(q_j q_{j+1})
    std::size_t j = 1;
    for (;;) {
      if (impl_->source == Source::Finite && j + 1 > impl_->prefix.size()) {
        ensure_quotients_locked(impl_->prefix.size());
        std::size_t L = impl_->prefix.size();
        Rational v(impl_->p[L], impl_->q[L]);
        return Interval(v);  // rational value, exact
      }
      ensure_quotients_locked(j + 1);
      const Integer& qj = impl_->q[j];
      const Integer& qj1 = impl_->q[j + 1];
      if (bit_length(qj) + bit_length(qj1) >= precision_bits + 2) {
        Rational cj(impl_->p[j], qj), cj1(impl_->p[j + 1], qj1);
        Interval enc = cj <= cj1 ? Interval(cj, cj1) : Interval(cj1, cj);
        if (enc.width() * rpow(Rational(2), precision_bits) <= 1) return enc;
      }
      ++j;
    }
  }

  // --- liouville source ---

  void ensure_liouville_rows_locked(std::size_t k) const {
    if (k < 1) throw std::out_of_range("liouville rows start at k = 1");
    while (impl_->q.size() < k) {
      std::size_t i = impl_->q.size() + 1;  // generating row i
      Integer fact = i == 1 ? Integer(1) : impl_->lfact.back() * Integer(i);
      // bits(b^{i!}) >= i!  (b >= 2), so this catches the cap cheaply
      if (fact > Integer(impl_->max_bits))
        throw GenerationOverflow(i, static_cast<std::size_t>(fact), impl_->max_bits);
      // q_i = b^{i!}; p_i = q_i * sum_{j<=i} b^{-j!}
      Integer qi = ipow(Integer(impl_->base), static_cast<unsigned>(fact));
      if (bit_length(qi) > impl_->max_bits)
        throw GenerationOverflow(i, bit_length(qi), impl_->max_bits);
      Integer pi = 0;
      Integer fj(1);
      for (std::size_t j = 1; j <= i; ++j) {
        if (j > 1) fj *= Integer(j);
        pi += ipow(Integer(impl_->base), static_cast<unsigned>(fact - fj));
      }
      impl_->lfact.push_back(fact);
      impl_->p.push_back(std::move(pi));
      impl_->q.push_back(std::move(qi));
    }
  }

  // exact series tail bracket: sum_{j>K} b^{-j!} in (lo, hi) with
  // lo = b^{-(K+1)!} + b^{-(K+2)!} and hi = b^{-(K+1)!} + 2 b^{-(K+2)!}
  Interval liouville_tail_locked(std::size_t K) const {
    ensure_liouville_rows_locked(K);
    Integer f1 = impl_->lfact[K - 1] * Integer(K + 1);
    Integer f2 = f1 * Integer(K + 2);
    if (f2 > Integer(1u << 26))
      throw GenerationOverflow(K + 2, static_cast<std::size_t>(f2), 1u << 26);
    Rational t1(Integer(1), ipow(Integer(impl_->base), static_cast<unsigned>(f1)));
    Rational t2(Integer(1), ipow(Integer(impl_->base), static_cast<unsigned>(f2)));
    return Interval(t1 + t2, t1 + 2 * t2);
  }

  Interval liouville_enclosure_locked(unsigned precision_bits) const {
    // choose K with 2 b^{-(K+1)!} <= 2^-precision: value in L_K + tail
    std::size_t K = 1;
    Integer fact(2);  // (K+1)! for K = 1
    double log2b = static_cast<double>(bit_length(Integer(impl_->base)));
    while (static_cast<double>(fact) * (log2b - 1) < precision_bits + 1 && K < 12) {
      ++K;
      fact *= Integer(K + 1);
    }
    ensure_liouville_rows_locked(K);
    Rational LK(impl_->p[K - 1], impl_->q[K - 1]);
    Interval tail = liouville_tail_locked(K);
    Interval enc(LK + tail.lo, LK + tail.hi);
    // guard: deepen if the crude log2 estimate fell short
    while (enc.width() * rpow(Rational(2), precision_bits) > 1) {
      ++K;
      ensure_liouville_rows_locked(K);
      LK = Rational(impl_->p[K - 1], impl_->q[K - 1]);
      tail = liouville_tail_locked(K);
      enc = Interval(LK + tail.lo, LK + tail.hi);
    }
    return enc;
  }

  friend Interval qk_dist(const ContinuedFraction&, std::size_t);

  std::shared_ptr<Impl> impl_;
};

struct ConvergentTable {
  std::size_t k_first = 0;
  std::vector<ContinuedFraction::Row> rows;
};

// Quotient sources: rows k = 0..K (K quotients consumed).
// Liouville source: truncation rows k = 1..K.
inline ConvergentTable convergents(const ContinuedFraction& cf, std::size_t K) {
  ConvergentTable t;
  t.k_first = cf.is_liouville() ? 1 : 0;
  for (std::size_t k = t.k_first; k <= K; ++k) t.rows.push_back(cf.row(k));
  return t;
}

// Exact rational enclosure of <q_k alpha>.
//
// Quotient sources: derived from the convergent sandwich and refined until it
// sits strictly inside (1/(q_{k+1}+q_k), 1/q_{k+1}).
// Liouville source: direct series-tail arithmetic on the truncation rows (the
// sandwich above concerns consecutive convergents and does not apply).
inline Interval qk_dist(const ContinuedFraction& cf, std::size_t k) {
  if (cf.is_liouville()) {
    auto r = cf.row(k);
    Interval tail = [&] {
      std::lock_guard<std::mutex> g(cf.impl_->mu);
      return cf.liouville_tail_locked(k);
    }();
    return nearest_int_dist(tail * Rational(r.q));
  }
  if (k < 1) throw std::out_of_range("qk_dist: k >= 1");
  auto rk = cf.row(k);
  auto rk1 = cf.row(k + 1);
  Rational lo_bound(Integer(1), rk1.q + rk.q);
  Rational hi_bound(Integer(1), rk1.q);
  unsigned prec = static_cast<unsigned>(bit_length(rk1.q) + bit_length(rk.q)) + 8;
  for (int iter = 0; iter < 64; ++iter) {
    Interval alpha = cf.enclosure(prec);
    Interval y = alpha * Rational(rk.q) - Rational(rk.p);
    if (y.lo > 0 || y.hi < 0) {
      Interval d = y.lo > 0 ? y : -y;
      if (d.lo > lo_bound && d.hi < hi_bound) return d;
    }
    prec *= 2;
  }
  throw std::runtime_error("qk_dist: failed to certify sandwich (non-terminating source?)");
}

// Property-2 style check: <q_k a> <= <n a> for all 1 <= n <= N, decided by
// interval refinement.  N must stay below q_{k+1} for the claim to be a
// theorem; the scan itself is honest either way.
inline CheckResult best_approx_check(const ContinuedFraction& cf, std::size_t k, const Integer& N,
                                     unsigned budget_bits = 256) {
  Interval dk = qk_dist(cf, k);
  Integer qk = cf.row(k).q;
  for (Integer n = 1; n <= N; ++n) {
    if (n == qk) continue;
    bool decided = false;
    for (unsigned prec = 64; prec <= budget_bits; prec *= 2) {
      Interval alpha = cf.enclosure(prec);
      Interval dn = nearest_int_dist(alpha * Rational(n));
      if (dk.hi <= dn.lo) { decided = true; break; }
      if (dn.hi < dk.lo) return CheckResult::False;
    }
    if (!decided) return CheckResult::Undecided;
  }
  return CheckResult::True;
}

// Window statistics for w(alpha) = limsup_k log q_{k+1} / log q_k, computed
// over the trailing quarter of the table with certified log brackets.  Finite
// windows only bound the limsup; the report says so by carrying the window.
struct ExponentEstimate {
  RatPair window_limsup;
  RatPair window_liminf;
  std::size_t K, k_lo, k_hi;
};

inline ExponentEstimate irrationality_exponent_estimate(const ContinuedFraction& cf, std::size_t K,
                                                        unsigned denom = 256) {
  if (K < 3) throw std::invalid_argument("irrationality_exponent_estimate: K >= 3");
  std::size_t k_hi = K - 1;
  std::size_t k_lo = std::max<std::size_t>(2, K - std::max<std::size_t>(2, (K + 3) / 4));
  ExponentEstimate est;
  est.K = K;
  est.k_lo = k_lo;
  est.k_hi = k_hi;
  bool first = true;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    RatPair r = log_ratio_bracket(cf.row(k + 1).q, cf.row(k).q, denom);
    if (first) {
      est.window_limsup = r;
      est.window_liminf = r;
      first = false;
    } else {
      est.window_limsup.lo = std::max(est.window_limsup.lo, r.lo);
      est.window_limsup.hi = std::max(est.window_limsup.hi, r.hi);
      est.window_liminf.lo = std::min(est.window_liminf.lo, r.lo);
      est.window_liminf.hi = std::min(est.window_liminf.hi, r.hi);
    }
  }
  return est;
}

}  // namespace dioph
