#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dioph/interval.hpp"
#include "dioph/numeric.hpp"

namespace dioph {

// sum_{q=a+1}^{b} q^e, e >= 0, closed forms for small e
inline Rational sum_powers(const Integer& a, const Integer& b, unsigned e) {
  if (b <= a) return Rational(0);
  auto S = [&](const Integer& x) -> Rational {
    switch (e) {
      case 0: return Rational(x);
      case 1: return Rational(x * (x + 1), 2);
      case 2: return Rational(x * (x + 1) * (2 * x + 1), 6);
      case 3: return Rational(x * x * (x + 1) * (x + 1), 4);
      default: {
        Rational s(0);
        for (Integer q = 1; q <= x; ++q) s += Rational(ipow(q, e));
        return s;
      }
    }
  };
  return S(b) - S(a);
}

// Decreasing psi: N -> R>=0 in a closed representation.  Step heights are
// stored as m-th powers (the m of the construction that produced them); the
// paper-side inequalities all compare m-th powers, so roots never appear.
//
//   Power        psi(q)   = c q^-a
//   PowerCut     psi(q)   = c q^-a for q < N, 0 beyond
//   Step         psi(q)^m = h_i on (b_{i-1}, b_i], 0 beyond b_last
//   StepTail     psi(q)^m = h_i on blocks, then (c q^-a)^m for q > b_last
//   PowerPlusStep psi(q)^m = (c q^-a)^m + add_i on blocks, plain law beyond
class ApproxFunction {
 public:
  struct PowerLaw {
    Rational c;  // >= 0
    Rational a;
  };
  struct Block {
    Integer b;
    Rational h;  // stored m-th power
  };

  struct Power { PowerLaw law; };
  struct PowerCut { PowerLaw law; Integer N; };
  struct Step { std::vector<Block> blocks; };
  struct StepTail { std::vector<Block> blocks; PowerLaw tail; };
  struct PowerPlusStep { PowerLaw base; std::vector<Block> adds; };

  using Rep = std::variant<Power, PowerCut, Step, StepTail, PowerPlusStep>;

  ApproxFunction() : rep_(Step{}) {}
  explicit ApproxFunction(Rep r) : rep_(std::move(r)) { validate(); }

  static ApproxFunction power(Rational c, Rational a) {
    return ApproxFunction(Power{PowerLaw{std::move(c), std::move(a)}});
  }
  static ApproxFunction power_cut(Rational c, Rational a, Integer N) {
    return ApproxFunction(PowerCut{PowerLaw{std::move(c), std::move(a)}, std::move(N)});
  }
  static ApproxFunction step(std::vector<Block> blocks) {
    return ApproxFunction(Step{std::move(blocks)});
  }
  static ApproxFunction step_tail(std::vector<Block> blocks, Rational c, Rational a) {
    return ApproxFunction(StepTail{std::move(blocks), PowerLaw{std::move(c), std::move(a)}});
  }
  static ApproxFunction power_plus_step(Rational c, Rational a, std::vector<Block> adds) {
    return ApproxFunction(PowerPlusStep{PowerLaw{std::move(c), std::move(a)}, std::move(adds)});
  }

  const Rep& rep() const { return rep_; }

  template <class T>
  const T* as() const { return std::get_if<T>(&rep_); }

  // (c q^-a)^m as an exact rational; requires a*m integral
  static Rational law_pow_m(const PowerLaw& law, const Integer& q, unsigned m) {
    if (law.c == 0) return Rational(0);
    Rational am = law.a * Rational(m);
    if (den(am) != 1)
      throw std::domain_error("power-law evaluation needs an integral exponent a*m");
    long e = static_cast<long>(num(am));
    return rpow(law.c, static_cast<long>(m)) * rpow(Rational(q), -e);
  }

  // psi(q)^m, exact
  Rational value_pow_m(const Integer& q, unsigned m) const {
    if (q < 1) throw std::domain_error("psi is defined on q >= 1");
    if (auto* p = as<Power>()) return law_pow_m(p->law, q, m);
    if (auto* p = as<PowerCut>()) return q < p->N ? law_pow_m(p->law, q, m) : Rational(0);
    if (auto* p = as<Step>()) {
      for (const Block& blk : p->blocks)
        if (q <= blk.b) return blk.h;
      return Rational(0);
    }
    if (auto* p = as<StepTail>()) {
      for (const Block& blk : p->blocks)
        if (q <= blk.b) return blk.h;
      return law_pow_m(p->tail, q, m);
    }
    auto* p = as<PowerPlusStep>();
    Rational base = law_pow_m(p->base, q, m);
    for (const Block& blk : p->adds)
      if (q <= blk.b) return base + blk.h;
    return base;
  }

  // exact monotonicity check of psi^m over the whole domain
  bool nonincreasing_pow_m(unsigned m) const {
    if (auto* p = as<Power>()) return p->law.a >= 0 || p->law.c == 0;
    if (auto* p = as<PowerCut>()) return p->law.a >= 0 || p->law.c == 0;
    if (auto* p = as<Step>()) return blocks_nonincreasing(p->blocks);
    if (auto* p = as<StepTail>()) {
      if (!blocks_nonincreasing(p->blocks) || p->tail.a < 0) return false;
      if (p->blocks.empty()) return true;
      const Block& last = p->blocks.back();
      return law_pow_m(p->tail, Integer(last.b + 1), m) <= last.h;
    }
    auto* p = as<PowerPlusStep>();
    return (p->base.a >= 0 || p->base.c == 0) && blocks_nonincreasing(p->adds);
  }

  Integer last_breakpoint() const {
    if (auto* p = as<PowerCut>()) return p->N - 1;
    if (auto* p = as<Step>()) return p->blocks.empty() ? Integer(0) : p->blocks.back().b;
    if (auto* p = as<StepTail>()) return p->blocks.empty() ? Integer(0) : p->blocks.back().b;
    if (auto* p = as<PowerPlusStep>()) return p->adds.empty() ? Integer(0) : p->adds.back().b;
    return Integer(0);
  }

 private:
  static bool blocks_nonincreasing(const std::vector<Block>& blocks) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].h < 0) return false;
      if (i && blocks[i].h > blocks[i - 1].h) return false;
    }
    return true;
  }

  void validate() const {
    auto check_blocks = [](const std::vector<Block>& blocks) {
      Integer prev(0);
      for (const Block& b : blocks) {
        if (b.b <= prev) throw std::invalid_argument("breakpoints must increase strictly");
        if (b.h < 0) throw std::invalid_argument("step heights must be nonnegative");
        prev = b.b;
      }
    };
    if (auto* p = as<Step>()) check_blocks(p->blocks);
    if (auto* p = as<StepTail>()) check_blocks(p->blocks);
    if (auto* p = as<PowerPlusStep>()) check_blocks(p->adds);
    if (auto* p = as<PowerCut>())
      if (p->N < 1) throw std::invalid_argument("PowerCut: N >= 1");
  }

  Rep rep_;
};

// ---------------------------------------------------------------------------
// classification into C (convergent) / D (divergent)

enum class CDClass { InC, InD, NotMonotone };

struct ClassificationResult {
  CDClass tag;
  std::string note;
  // for InC: certified enclosure of the full series sum_q q^{n-1} psi(q)^m
  std::optional<Interval> total;
};

// tail bracket of c_pow * sum_{q > X} q^{e}, exact rational endpoints;
// e < -1 required.  Uses sum_{q>X} f <= f(X+1) + integral_{X+1} f.
inline Interval power_tail_bracket(const Rational& c_pow, const Integer& X, long e) {
  if (e >= -1) throw DivergentTail("power tail with exponent >= -1 is not summable");
  // integral_{X+1}^inf x^e dx = (X+1)^{e+1} / (-e-1)
  Rational integral = rpow(Rational(X + 1), e + 1) / Rational(-e - 1);
  Rational first = rpow(Rational(X + 1), e);
  return Interval(integral, first + integral) * c_pow;
}

struct SeriesValue {
  Rational partial;          // exact sum over q = 1..T
  Interval tail;             // enclosure of the sum over q > T
  bool tail_exact = false;   // true when the tail is exactly zero / finite
  Interval total() const { return tail + partial; }
};

// exact partial sum q = a+1..b of q^{n-1} * (c q^-a_law)^m; negative combined
// exponents fall back to a loop (desk scale)
inline Rational power_block_sum(const ApproxFunction::PowerLaw& law, unsigned m, unsigned n,
                                const Integer& a, const Integer& b) {
  if (law.c == 0 || b <= a) return Rational(0);
  Rational am = law.a * Rational(m);
  if (den(am) != 1) throw std::domain_error("power-law sums need an integral exponent a*m");
  long e = static_cast<long>(num(am));
  long ex = static_cast<long>(n) - 1 - e;
  Rational cm = rpow(law.c, static_cast<long>(m));
  if (ex >= 0) return cm * sum_powers(a, b, static_cast<unsigned>(ex));
  if (b - a > Integer(2'000'000))
    throw std::domain_error("power_block_sum: block too long for direct summation");
  Rational s(0);
  for (Integer q = a + 1; q <= b; ++q) s += rpow(Rational(q), ex);
  return cm * s;
}

inline SeriesValue series_value(const ApproxFunction& psi, unsigned m, unsigned n,
                                const Integer& T) {
  using AF = ApproxFunction;
  SeriesValue out;
  out.partial = 0;
  auto step_partial = [&](const std::vector<AF::Block>& blocks, const Integer& upto) {
    Rational s(0);
    Integer prev(0);
    for (const AF::Block& blk : blocks) {
      if (prev >= upto) break;
      Integer hi = std::min(blk.b, upto);
      s += blk.h * sum_powers(prev, hi, n - 1);
      prev = blk.b;
    }
    return s;
  };
  auto step_beyond = [&](const std::vector<AF::Block>& blocks, const Integer& from) {
    Rational s(0);
    Integer prev(0);
    for (const AF::Block& blk : blocks) {
      Integer lo = std::max(prev, from);
      if (blk.b > lo) s += blk.h * sum_powers(lo, blk.b, n - 1);
      prev = blk.b;
    }
    return s;
  };

  if (auto* p = psi.as<AF::Power>()) {
    out.partial = power_block_sum(p->law, m, n, Integer(0), T);
    if (p->law.c == 0) {
      out.tail = Interval(Rational(0));
      out.tail_exact = true;
      return out;
    }
    Rational am = p->law.a * Rational(m);
    long e = static_cast<long>(n) - 1 - static_cast<long>(num(am));
    out.tail = power_tail_bracket(rpow(p->law.c, static_cast<long>(m)), T, e);
    return out;
  }
  if (auto* p = psi.as<AF::PowerCut>()) {
    Integer upto = std::min(T, Integer(p->N - 1));
    out.partial = power_block_sum(p->law, m, n, Integer(0), upto);
    if (T >= p->N - 1) {
      out.tail = Interval(Rational(0));
      out.tail_exact = true;
    } else {
      out.tail = Interval(power_block_sum(p->law, m, n, T, p->N - 1));
      out.tail_exact = true;
    }
    return out;
  }
  if (auto* p = psi.as<AF::Step>()) {
    out.partial = step_partial(p->blocks, T);
    out.tail = Interval(step_beyond(p->blocks, T));
    out.tail_exact = true;
    return out;
  }
  if (auto* p = psi.as<AF::StepTail>()) {
    out.partial = step_partial(p->blocks, T);
    Integer cut = p->blocks.empty() ? Integer(0) : p->blocks.back().b;
    if (T < cut) {
      out.partial += power_block_sum(p->tail, m, n, cut, cut);  // zero; step part covers
      Rational inside = step_beyond(p->blocks, T);
      Rational am = p->tail.a * Rational(m);
      long e = static_cast<long>(n) - 1 - static_cast<long>(num(am));
      out.tail = power_tail_bracket(rpow(p->tail.c, static_cast<long>(m)), cut, e) + inside;
    } else {
      out.partial += power_block_sum(p->tail, m, n, cut, T);
      Rational am = p->tail.a * Rational(m);
      long e = static_cast<long>(n) - 1 - static_cast<long>(num(am));
      out.tail = power_tail_bracket(rpow(p->tail.c, static_cast<long>(m)), T, e);
    }
    return out;
  }
  auto* p = psi.as<AF::PowerPlusStep>();
  out.partial = power_block_sum(p->base, m, n, Integer(0), T) + step_partial(p->adds, T);
  Rational inside = step_beyond(p->adds, T);
  if (p->base.c == 0) {
    out.tail = Interval(inside);
    out.tail_exact = true;
    return out;
  }
  Rational am = p->base.a * Rational(m);
  long e = static_cast<long>(n) - 1 - static_cast<long>(num(am));
  out.tail = power_tail_bracket(rpow(p->base.c, static_cast<long>(m)), T, e) + inside;
  return out;
}

inline ClassificationResult classify_CD(const ApproxFunction& psi, unsigned m, unsigned n) {
  using AF = ApproxFunction;
  if (!psi.nonincreasing_pow_m(m)) return {CDClass::NotMonotone, "psi is not non-increasing", {}};

  auto power_exponent_m = [&](const AF::PowerLaw& law) -> Rational {
    return law.a * Rational(m);  // series term ~ q^{n-1-am}
  };
  auto convergent_tail = [&](const AF::PowerLaw& law) {
    return law.c == 0 || power_exponent_m(law) > Rational(n);
  };

  const AF::PowerLaw* tail_law = nullptr;
  if (auto* p = psi.as<AF::Power>()) tail_law = &p->law;
  if (auto* p = psi.as<AF::StepTail>()) tail_law = &p->tail;
  if (auto* p = psi.as<AF::PowerPlusStep>()) tail_law = &p->base;

  if (tail_law && !convergent_tail(*tail_law)) {
    // per-term lower bound: q^{n-1} psi^m >= c^m q^{n-1-am} with n-1-am >= -1
    return {CDClass::InD,
            "divergent power tail: series terms are bounded below by a multiple of q^(n-1-a*m) "
            "with exponent >= -1",
            {}};
  }
  // summable tail (or finite support): certify the full value
  Integer T = psi.last_breakpoint();
  if (T < 8) T = 8;
  ClassificationResult res{CDClass::InC, "finite support or integral-comparison tail", {}};
  SeriesValue sv = series_value(psi, m, n, T);
  res.total = sv.total();
  return res;
}

// ---------------------------------------------------------------------------
// the metric d(psi1, psi2) = sum_q q^{n-1} |psi1(q)^m - psi2(q)^m|

namespace detail {

// merged piecewise-constant comparison over blocks with closed-form sums
inline Rational step_abs_diff_sum(const std::vector<ApproxFunction::Block>& x,
                                  const std::vector<ApproxFunction::Block>& y, unsigned n) {
  Rational s(0);
  std::size_t i = 0, j = 0;
  Integer prev(0);
  auto height = [](const std::vector<ApproxFunction::Block>& v, std::size_t idx) {
    return idx < v.size() ? v[idx].h : Rational(0);
  };
  while (i < x.size() || j < y.size()) {
    Integer next_x = i < x.size() ? x[i].b : Integer(-1);
    Integer next_y = j < y.size() ? y[j].b : Integer(-1);
    Integer next;
    if (next_x < 0) next = next_y;
    else if (next_y < 0) next = next_x;
    else next = std::min(next_x, next_y);
    Rational d = height(x, i) - height(y, j);
    if (d < 0) d = -d;
    s += d * sum_powers(prev, next, n - 1);
    prev = next;
    if (next_x == next) ++i;
    if (next_y == next) ++j;
  }
  return s;
}

inline bool same_law(const ApproxFunction::PowerLaw& a, const ApproxFunction::PowerLaw& b) {
  return a.c == b.c && a.a == b.a;
}

}  // namespace detail

// Enclosure of d(psi1, psi2).  Exact (point interval) whenever the two
// representations differ only on finitely many q; power-law tails are
// bracketed by the integral sandwich.
inline Interval metric_d(const ApproxFunction& f, const ApproxFunction& g, unsigned m, unsigned n) {
  using AF = ApproxFunction;
  if (&f == &g) return Interval(Rational(0));

  // symmetric dispatch helper
  auto tail_exponent = [&](const AF::PowerLaw& law) -> long {
    Rational am = law.a * Rational(m);
    if (den(am) != 1) throw std::domain_error("metric_d: power law needs integral a*m");
    return static_cast<long>(n) - 1 - static_cast<long>(num(am));
  };

  // Step vs Step: exact merged comparison
  if (f.as<AF::Step>() && g.as<AF::Step>())
    return Interval(detail::step_abs_diff_sum(f.as<AF::Step>()->blocks, g.as<AF::Step>()->blocks, n));

  // PowerPlusStep vs its base power law (either order): the difference is the adds
  auto pps_vs_power = [&](const AF::PowerPlusStep& a, const AF::Power& b) -> std::optional<Interval> {
    if (!detail::same_law(a.base, b.law)) return std::nullopt;
    Rational s(0);
    Integer prev(0);
    for (const AF::Block& blk : a.adds) {
      s += blk.h * sum_powers(prev, blk.b, n - 1);
      prev = blk.b;
    }
    return Interval(s);
  };
  if (f.as<AF::PowerPlusStep>() && g.as<AF::Power>())
    if (auto r = pps_vs_power(*f.as<AF::PowerPlusStep>(), *g.as<AF::Power>())) return *r;
  if (g.as<AF::PowerPlusStep>() && f.as<AF::Power>())
    if (auto r = pps_vs_power(*g.as<AF::PowerPlusStep>(), *f.as<AF::Power>())) return *r;

  // PowerPlusStep pair over the same base: difference of the adds
  if (f.as<AF::PowerPlusStep>() && g.as<AF::PowerPlusStep>()) {
    const auto& a = *f.as<AF::PowerPlusStep>();
    const auto& b = *g.as<AF::PowerPlusStep>();
    if (detail::same_law(a.base, b.base))
      return Interval(detail::step_abs_diff_sum(a.adds, b.adds, n));
  }

  // PowerCut vs the same power law: difference is the cut-off tail
  auto cut_vs_power = [&](const AF::PowerCut& a, const AF::Power& b) -> std::optional<Interval> {
    if (!detail::same_law(a.law, b.law)) return std::nullopt;
    if (b.law.c == 0) return Interval(Rational(0));
    return power_tail_bracket(rpow(b.law.c, static_cast<long>(m)), a.N - 1, tail_exponent(b.law));
  };
  if (f.as<AF::PowerCut>() && g.as<AF::Power>())
    if (auto r = cut_vs_power(*f.as<AF::PowerCut>(), *g.as<AF::Power>())) return *r;
  if (g.as<AF::PowerCut>() && f.as<AF::Power>())
    if (auto r = cut_vs_power(*g.as<AF::PowerCut>(), *f.as<AF::Power>())) return *r;

  // Power vs Power
  if (f.as<AF::Power>() && g.as<AF::Power>()) {
    const auto& a = f.as<AF::Power>()->law;
    const auto& b = g.as<AF::Power>()->law;
    if (detail::same_law(a, b)) return Interval(Rational(0));
    long ea = tail_exponent(a), eb = tail_exponent(b);
    Rational ca = a.c == 0 ? Rational(0) : rpow(a.c, static_cast<long>(m));
    Rational cb = b.c == 0 ? Rational(0) : rpow(b.c, static_cast<long>(m));
    if (ea >= -1 && ca != 0) throw DivergentTail("metric_d: first argument not in C");
    if (eb >= -1 && cb != 0) throw DivergentTail("metric_d: second argument not in C");
    // beyond some F the sign of the difference is constant; find one
    Integer F(1);
    auto fa = [&](const Integer& q) { return ApproxFunction::law_pow_m(a, q, m); };
    auto fb = [&](const Integer& q) { return ApproxFunction::law_pow_m(b, q, m); };
    int guard = 0;
    while (guard++ < 64) {
      // difference c_a q^{ea'} - c_b q^{eb'} keeps its sign for q >= F once
      // the dominance is settled; double F until the order at F and 4F agree
      Rational dF = fa(F) - fb(F);
      Rational dF4 = fa(4 * F) - fb(4 * F);
      if ((dF >= 0) == (dF4 >= 0) && F > 16) break;
      F *= 4;
    }
    Rational exact(0);
    for (Integer q = 1; q <= F; ++q) {
      Rational d = fa(q) - fb(q);
      if (d < 0) d = -d;
      exact += Rational(ipow(q, n - 1)) * d;
    }
    Interval ta = ca == 0 ? Interval(Rational(0)) : power_tail_bracket(ca, F, ea);
    Interval tb = cb == 0 ? Interval(Rational(0)) : power_tail_bracket(cb, F, eb);
    // |tailA - tailB| <= hull of the difference, clamped at 0
    Interval diff = ta - tb;
    Rational lo = diff.lo, hi = diff.hi;
    if (lo < 0) lo = -lo;
    if (hi < 0) hi = -hi;
    Rational dlo = diff.contains(Rational(0)) ? Rational(0) : std::min(lo, hi);
    return Interval(exact + dlo, exact + std::max(lo, hi));
  }

  throw std::invalid_argument("metric_d: unsupported representation pair");
}

}  // namespace dioph
