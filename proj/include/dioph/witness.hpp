#pragma once

#include <string>

#include "dioph/lattice.hpp"
#include "dioph/series.hpp"

namespace dioph {

// rational r with r^m >= x, within 2^-precision of the true root
inline Rational rational_nth_root_upper(const Rational& x, unsigned m, unsigned precision = 64) {
  if (x < 0) throw std::domain_error("rational_nth_root_upper: x >= 0");
  if (x == 0) return Rational(0);
  if (m == 1) return x;
  Integer scale = Integer(1) << precision;
  Rational y = x * Rational(ipow(scale, m));
  Integer z = rat_floor(y);
  Integer t = int_nth_root_floor(z, m) + 1;
  return Rational(t, scale);
}

// ---------------------------------------------------------------------------
// psi_0 in D: the step function psi_0(t) = M_{l0}(t), the witness that a
// system with a divergent S_{l0} fails psi_0-approximability beyond l0.

struct PsiDResult {
  ApproxFunction psi;      // step, heights stored as m-th powers
  bool degenerate = false; // minimum hit an exact zero: psi_0 tails off to 0
};

// Heights are the lower enclosure endpoints (equal to the exact minima on the
// rational path), which is the side that keeps the defining inequality
// psi_0(||q||) <= <A q - gamma> certifiable.
inline PsiDResult construct_psi_D(const AffineSystem& sys, long l0, long T,
                                  unsigned budget_bits = kDefaultBudgetBits) {
  MinTable table = min_table(sys, l0, T, budget_bits);
  PsiDResult out;
  std::vector<ApproxFunction::Block> blocks;
  // the first block (0, l0] extends M_{l0}(l0) constantly below l0
  for (const auto& row : table.rows) {
    Rational h = rpow(row.value.lo, sys.m);
    if (row.value.hi == 0) out.degenerate = true;
    if (!blocks.empty() && blocks.back().h == h) {
      blocks.back().b = Integer(row.t);
    } else {
      blocks.push_back({Integer(row.t), h});
    }
  }
  out.psi = ApproxFunction::step(std::move(blocks));
  return out;
}

// ---------------------------------------------------------------------------
// witness sequences

struct WitnessEntry {
  Point q;
  long norm = 0;
  Interval dist;     // <A q - gamma>
  Interval product;  // ||q||^n <A q - gamma>^m
};

struct WitnessSequence {
  enum class Mode { CWitness, GammaGreedy };
  Mode mode = Mode::CWitness;
  unsigned m = 1, n = 1;
  std::vector<WitnessEntry> entries;
};

namespace detail {

// lexicographically first point on shell t whose product certificate
// ||q||^n <.>^m < threshold holds; also folds the shell minimum product into
// `obstruction_min` for the failure report
inline std::optional<WitnessEntry> first_certified_on_shell(
    const DistanceOracle& oracle, unsigned n, unsigned m, long t, bool half,
    const Rational& threshold, std::optional<Rational>& obstruction_min) {
  Rational tn(ipow(Integer(t), n));
  std::optional<WitnessEntry> hit;
  for_each_shell_point(n, t, [&](const Point& q) {
    if (hit) return;
    if (half && !canonical_rep(q)) return;
    DistVal dv = oracle.dist(q);
    Interval prod = dv.enc.pow_nonneg(m) * tn;
    if (!obstruction_min || prod.lo < *obstruction_min) obstruction_min = prod.lo;
    if (prod.hi < threshold) hit = WitnessEntry{q, t, dv.enc, prod};
  });
  return hit;
}

}  // namespace detail

// Sequence q_1, q_2, ... with strictly increasing norms and certified
// ||q_i||^n <A q_i - gamma>^m < 2^-i, found by scanning shells up to `cap`.
// Same-norm candidates resolve lexicographically.
inline WitnessSequence find_C_witness_sequence(const AffineSystem& sys, unsigned count, long cap,
                                               unsigned budget_bits = kDefaultBudgetBits) {
  if (count < 1) throw std::invalid_argument("find_C_witness_sequence: count >= 1");
  DistanceOracle oracle(sys, budget_bits);
  bool half = sys.homogeneous();
  WitnessSequence ws;
  ws.mode = WitnessSequence::Mode::CWitness;
  ws.m = sys.m;
  ws.n = sys.n;
  std::optional<Rational> seen_min;
  unsigned i = 1;
  for (long t = 1; t <= cap && ws.entries.size() < count; ++t) {
    Rational threshold = rpow(Rational(1, 2), i);
    auto hit = detail::first_certified_on_shell(oracle, sys.n, sys.m, t, half, threshold, seen_min);
    if (hit) {
      ws.entries.push_back(std::move(*hit));
      ++i;
    }
  }
  if (ws.entries.size() < count) {
    std::string ob = "no q with ||q||^n<Aq-gamma>^m < 2^-" + std::to_string(i) + " up to cap " +
                     std::to_string(cap);
    if (seen_min)
      ob += "; smallest certified product bound in range is " + rat_str(*seen_min);
    throw NotFoundWithinCap(ws.entries.size(), ob);
  }
  return ws;
}

// ---------------------------------------------------------------------------
// psi in C built from a C-witness sequence:
//   psi(q)^m = 1/(2^{i+1} ||q_{i+1}||^n) on (||q_i||, ||q_{i+1}||], zero tail.

struct PsiCResult {
  ApproxFunction psi;
  Rational finite_sum;        // sum_{q=1}^{||q_last||} q^{n-1} psi(q)^m, exact
  Rational finite_sum_bound;  // 1 - 2^-len
};

inline PsiCResult construct_psi_C(const WitnessSequence& ws, unsigned m, unsigned n) {
  if (ws.mode != WitnessSequence::Mode::CWitness)
    throw std::invalid_argument("construct_psi_C: needs a C-witness sequence");
  if (ws.entries.size() < 2) throw std::invalid_argument("construct_psi_C: needs >= 2 witnesses");
  // re-verify the witness invariant before building anything on top of it
  long prev_norm = 0;
  for (std::size_t i = 0; i < ws.entries.size(); ++i) {
    if (ws.entries[i].norm <= prev_norm)
      throw std::invalid_argument("construct_psi_C: norms must increase strictly");
    prev_norm = ws.entries[i].norm;
    if (!(ws.entries[i].product.hi < rpow(Rational(1, 2), static_cast<long>(i + 1))))
      throw std::invalid_argument("construct_psi_C: witness inequality not certified");
  }
  std::vector<ApproxFunction::Block> blocks;
  for (std::size_t i = 0; i < ws.entries.size(); ++i) {
    Rational h(Integer(1),
               (Integer(1) << (i + 1)) * ipow(Integer(ws.entries[i].norm), n));
    blocks.push_back({Integer(ws.entries[i].norm), h});
  }
  PsiCResult out;
  out.psi = ApproxFunction::step(std::move(blocks));
  SeriesValue sv = series_value(out.psi, m, n, Integer(ws.entries.back().norm));
  out.finite_sum = sv.partial;
  out.finite_sum_bound = 1 - rpow(Rational(1, 2), static_cast<long>(ws.entries.size()));
  if (!(out.finite_sum <= out.finite_sum_bound))
    throw std::logic_error("construct_psi_C: finite-part bound failed");
  if (!out.psi.nonincreasing_pow_m(m))
    throw std::logic_error("construct_psi_C: step heights not decreasing");
  // strict witness inequalities against the built function
  for (std::size_t i = 0; i < ws.entries.size(); ++i) {
    Rational lhs = rpow(ws.entries[i].dist.hi, m);
    Rational rhs = out.psi.value_pow_m(Integer(ws.entries[i].norm), m);
    if (!(lhs < rhs)) throw std::logic_error("construct_psi_C: witness inequality failed");
  }
  return out;
}

// ---------------------------------------------------------------------------
// greedy homogeneous sequence behind the gamma construction:
//   ||q_{k+1}|| >= (k+1)(||q_1||+...+||q_k||) + 1
//   ||q_{k+1}||^n <A q_{k+1}>^m < 2^-m ||q_k||^n <A q_k>^m

inline WitnessSequence build_greedy_gamma_sequence(const AffineSystem& sys, unsigned K, long cap,
                                                   unsigned budget_bits = kDefaultBudgetBits) {
  if (!sys.homogeneous())
    throw std::invalid_argument("build_greedy_gamma_sequence: system must have gamma = 0");
  if (K < 1) throw std::invalid_argument("build_greedy_gamma_sequence: K >= 1");
  DistanceOracle oracle(sys, budget_bits);
  WitnessSequence ws;
  ws.mode = WitnessSequence::Mode::GammaGreedy;
  ws.m = sys.m;
  ws.n = sys.n;
  // q_1: shell-1 minimum (deterministic lex tie-break)
  MinReduceState first = detail::reduce_shell([&](const Point& q) { return oracle.dist(q); },
                                              sys.n, 1, true, 1);
  WitnessEntry e1;
  e1.q = first.report_argmin();
  e1.norm = 1;
  e1.dist = first.report_value();
  e1.product = e1.dist.pow_nonneg(sys.m);
  ws.entries.push_back(std::move(e1));

  std::optional<Rational> seen_min;
  long norm_sum = 1;
  while (ws.entries.size() < K) {
    unsigned idx = static_cast<unsigned>(ws.entries.size()) + 1;  // building q_idx
    long t_min = static_cast<long>(idx) * norm_sum + 1;
    Rational threshold = rpow(Rational(1, 2), sys.m) * ws.entries.back().product.lo;
    if (threshold <= 0)
      throw NotFoundWithinCap(ws.entries.size(),
                              "previous product has zero lower enclosure; ratio chain cannot "
                              "be certified");
    std::optional<WitnessEntry> hit;
    seen_min.reset();
    for (long t = t_min; t <= cap && !hit; ++t)
      hit = detail::first_certified_on_shell(oracle, sys.n, sys.m, t, true, threshold, seen_min);
    if (!hit) {
      std::string ob = "no q with ||q|| >= " + std::to_string(t_min) +
                       " and product < " + rat_str(threshold) + " up to cap " + std::to_string(cap);
      if (seen_min) ob += "; smallest certified product bound in range is " + rat_str(*seen_min);
      throw NotFoundWithinCap(ws.entries.size(), ob);
    }
    norm_sum += hit->norm;
    ws.entries.push_back(std::move(*hit));
  }
  return ws;
}

// ---------------------------------------------------------------------------
// gamma = frac(sum_k (A q_k - p_k)) with a rigorous tail bound

struct GammaWitness {
  unsigned K = 0;
  std::vector<Interval> value;  // per coordinate, inside [0,1)
  Rational tail_bound;          // >= sum_{k>K} <A q_k>
  long N_K = 0;                 // ||q_1|| + ... + ||q_K||
  bool wrapped = false;         // a coordinate straddled an integer under frac
};

inline GammaWitness construct_gamma(const WitnessSequence& ws, const AffineSystem& sys,
                                    unsigned K, unsigned budget_bits = kDefaultBudgetBits) {
  if (ws.mode != WitnessSequence::Mode::GammaGreedy)
    throw std::invalid_argument("construct_gamma: needs a greedy sequence");
  if (K < 1 || K > ws.entries.size()) throw std::invalid_argument("construct_gamma: K <= length");
  DistanceOracle oracle(sys, budget_bits);
  GammaWitness gw;
  gw.K = K;
  for (unsigned k = 0; k < K; ++k) gw.N_K += ws.entries[k].norm;

  // tail bound: the ratio condition halves <A q_k> each step, and the growth
  // condition puts ||q_{K+1}|| >= (K+1) N_K + 1 even when q_{K+1} was never
  // found, giving sum_{k>K} <A q_k> <= 2 (2^-m prod_K / ((K+1)N_K+1)^n)^(1/m).
  if (K < ws.entries.size()) {
    Rational next_hi = ws.entries[K].dist.hi;
    gw.tail_bound = 2 * next_hi;
  } else {
    Rational prod_hi = ws.entries[K - 1].product.hi;
    Rational bound_pow = rpow(Rational(1, 2), sys.m) * prod_hi /
                         Rational(ipow(Integer(static_cast<long>(K + 1) * gw.N_K + 1), sys.n));
    gw.tail_bound = 2 * rational_nth_root_upper(bound_pow, sys.m, 96);
  }
  gw.tail_bound = std::min(gw.tail_bound, ws.entries[K - 1].dist.hi);

  for (unsigned i = 0; i < sys.m; ++i) {
    Interval sum(Rational(0));
    for (unsigned k = 0; k < K; ++k) {
      Interval img = oracle.image(ws.entries[k].q, i);
      Integer p = round_nearest_even(img.mid());
      sum = sum + (img - Rational(p));
    }
    sum = sum + Interval(-gw.tail_bound, gw.tail_bound);
    Integer shift = rat_floor(sum.mid());
    Interval frac = sum - Rational(shift);
    if (frac.lo < 0 || frac.hi >= 1) {
      gw.wrapped = true;
      frac = Interval(Rational(0), Rational(1));
    }
    gw.value.push_back(frac);
  }
  return gw;
}

// ---------------------------------------------------------------------------
// dense approximant phi in B(psi, eps) with witnesses of the eps-scaled
// inequality ||q_i||^n <.>^m < eps 2^-i:
//   phi(q)^m = psi(q)^m + eps/(2^{i+1} ||q_{i+1}||^n) on (||q_i||, ||q_{i+1}||]

struct PhiDenseResult {
  ApproxFunction phi;
  Interval d;  // certified d(phi, psi), exact here
  WitnessSequence witnesses;
};

inline PhiDenseResult construct_phi_dense(const ApproxFunction& psi, const AffineSystem& sys,
                                          const Rational& eps, long cap, unsigned max_witnesses = 8,
                                          unsigned budget_bits = kDefaultBudgetBits) {
  if (eps <= 0) throw std::invalid_argument("construct_phi_dense: eps > 0");
  auto* pw = psi.as<ApproxFunction::Power>();
  if (!pw) throw std::invalid_argument("construct_phi_dense: psi must be a power law");
  DistanceOracle oracle(sys, budget_bits);
  bool half = sys.homogeneous();
  WitnessSequence ws;
  ws.mode = WitnessSequence::Mode::CWitness;
  ws.m = sys.m;
  ws.n = sys.n;
  std::optional<Rational> seen_min;
  unsigned i = 1;
  for (long t = 1; t <= cap && ws.entries.size() < max_witnesses; ++t) {
    Rational threshold = eps * rpow(Rational(1, 2), i);
    auto hit = detail::first_certified_on_shell(oracle, sys.n, sys.m, t, half, threshold, seen_min);
    if (hit) {
      ws.entries.push_back(std::move(*hit));
      ++i;
    }
  }
  if (ws.entries.empty()) {
    std::string ob = "no q with ||q||^n<Aq-gamma>^m < eps/2 = " +
                     rat_str(eps / 2) + " up to cap " + std::to_string(cap);
    if (seen_min) ob += "; smallest certified product bound in range is " + rat_str(*seen_min);
    throw NotFoundWithinCap(0, ob);
  }

  std::vector<ApproxFunction::Block> adds;
  for (std::size_t j = 0; j < ws.entries.size(); ++j) {
    Rational add = eps / ((Integer(1) << (j + 1)) * ipow(Integer(ws.entries[j].norm), sys.n));
    adds.push_back({Integer(ws.entries[j].norm), add});
  }
  PhiDenseResult out;
  out.phi = ApproxFunction::power_plus_step(pw->law.c, pw->law.a, adds);
  out.witnesses = ws;
  out.d = metric_d(out.phi, psi, sys.m, sys.n);
  if (!(out.d.hi < eps)) throw std::logic_error("construct_phi_dense: distance bound failed");
  if (!out.phi.nonincreasing_pow_m(sys.m))
    throw std::logic_error("construct_phi_dense: phi not decreasing");
  // each witness satisfies <A q_i - gamma> < phi(||q_i||)
  for (std::size_t j = 0; j < ws.entries.size(); ++j) {
    Rational lhs = rpow(ws.entries[j].dist.hi, sys.m);
    Rational rhs = out.phi.value_pow_m(Integer(ws.entries[j].norm), sys.m);
    if (!(lhs < rhs)) throw std::logic_error("construct_phi_dense: witness inequality failed");
  }
  return out;
}

// ---------------------------------------------------------------------------
// exterior truncation: phi = psi on q < N, 0 beyond, with d(phi, psi) < eps

struct TruncateResult {
  ApproxFunction phi;
  Integer N;
  Interval d;  // certified distance enclosure
};

inline TruncateResult truncate_to_exterior(const ApproxFunction& psi, const Rational& eps,
                                           unsigned m, unsigned n) {
  if (eps <= 0) throw std::invalid_argument("truncate_to_exterior: eps > 0");
  using AF = ApproxFunction;
  if (psi.as<AF::Step>()) {
    TruncateResult out;
    out.phi = psi;
    out.N = psi.last_breakpoint() + 1;
    out.d = Interval(Rational(0));
    return out;
  }
  if (auto* pc = psi.as<AF::PowerCut>()) {
    TruncateResult out;
    out.phi = psi;
    out.N = pc->N;
    out.d = Interval(Rational(0));
    return out;
  }
  auto* pw = psi.as<AF::Power>();
  if (!pw) throw std::invalid_argument("truncate_to_exterior: unsupported representation");
  if (pw->law.c == 0) return {ApproxFunction::power_cut(pw->law.c, pw->law.a, Integer(2)),
                              Integer(2), Interval(Rational(0))};
  Rational am = pw->law.a * Rational(m);
  if (den(am) != 1) throw std::invalid_argument("truncate_to_exterior: needs integral a*m");
  long e = static_cast<long>(n) - 1 - static_cast<long>(num(am));
  if (e >= -1)
    throw NoSuchN("psi is not in C (tail not summable); no truncation point exists");
  Rational cm = rpow(pw->law.c, static_cast<long>(m));
  // smallest N >= 2 with certified tail bound < eps (bound decreasing in N)
  Integer lo = 2, hi = 2;
  while (power_tail_bracket(cm, hi - 1, e).hi >= eps) {
    hi *= 2;
    if (hi > (Integer(1) << 62)) throw NoSuchN("no feasible truncation point below 2^62");
  }
  while (lo < hi) {
    Integer mid = (lo + hi) / 2;
    if (power_tail_bracket(cm, mid - 1, e).hi < eps) hi = mid;
    else lo = mid + 1;
  }
  TruncateResult out;
  out.N = lo;
  out.phi = ApproxFunction::power_cut(pw->law.c, pw->law.a, lo);
  out.d = power_tail_bracket(cm, lo - 1, e);
  return out;
}

// ---------------------------------------------------------------------------
// openness radius for C_k(A, gamma):
//   delta = min_i ||q_i||^{n-1} (psi(||q_i||)^m - <A q_i - gamma>^m)
// guarantees every phi with d(phi, psi) < delta keeps q_1..q_k as solutions.

struct BallRadiusResult {
  Rational delta;
  std::vector<WitnessEntry> solutions;
};

inline BallRadiusResult ball_radius_Ck(const ApproxFunction& psi, const AffineSystem& sys,
                                       unsigned k, long cap,
                                       unsigned budget_bits = kDefaultBudgetBits) {
  if (k < 1) throw std::invalid_argument("ball_radius_Ck: k >= 1");
  DistanceOracle oracle(sys, budget_bits);
  bool half = sys.homogeneous();
  BallRadiusResult out;
  for (long t = 1; t <= cap && out.solutions.size() < k; ++t) {
    Rational psi_m = psi.value_pow_m(Integer(t), sys.m);
    if (psi_m == 0) continue;
    for_each_shell_point(sys.n, t, [&](const Point& q) {
      if (out.solutions.size() >= k) return;
      if (half && !canonical_rep(q)) return;
      DistVal dv = oracle.dist(q);
      if (rpow(dv.enc.hi, sys.m) < psi_m) {
        WitnessEntry e;
        e.q = q;
        e.norm = t;
        e.dist = dv.enc;
        e.product = dv.enc.pow_nonneg(sys.m) * Rational(ipow(Integer(t), sys.n));
        out.solutions.push_back(std::move(e));
      }
    });
  }
  if (out.solutions.size() < k)
    throw NotFoundWithinCap(out.solutions.size(),
                            "fewer than k certified solutions within the cap");
  bool first = true;
  for (const auto& s : out.solutions) {
    Rational margin = psi.value_pow_m(Integer(s.norm), sys.m) - rpow(s.dist.hi, sys.m);
    Rational d = Rational(ipow(Integer(s.norm), sys.n - 1)) * margin;
    if (first || d < out.delta) out.delta = d;
    first = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// finite common-psi merge: the pointwise maximum, stored by m-th powers

struct MergeResult {
  ApproxFunction psi;
  Interval total;             // series value of the merged function
  Interval sum_of_totals;     // sum of the constituents' series values
};

inline MergeResult merge_common_psi(const std::vector<ApproxFunction>& list, unsigned m,
                                    unsigned n) {
  if (list.empty()) throw std::invalid_argument("merge_common_psi: empty list");
  using AF = ApproxFunction;
  if (list.size() == 1) {
    MergeResult out;
    out.psi = list[0];
    Integer T = std::max<Integer>(Integer(8), list[0].last_breakpoint());
    out.total = series_value(list[0], m, n, T).total();
    out.sum_of_totals = out.total;
    return out;
  }
  struct Tail {
    Rational c_pow;  // coefficient of q^{-e}, already m-powered
    long e;          // exponent
  };
  std::vector<std::optional<Tail>> tails;
  Integer F(1);
  for (const auto& f : list) {
    if (auto* p = f.as<AF::Power>()) {
      Rational am = p->law.a * Rational(m);
      if (den(am) != 1) throw std::invalid_argument("merge_common_psi: needs integral a*m");
      if (p->law.c == 0) tails.push_back(std::nullopt);
      else tails.push_back(Tail{rpow(p->law.c, static_cast<long>(m)),
                                static_cast<long>(num(am))});
    } else if (f.as<AF::Step>() || f.as<AF::PowerCut>()) {
      tails.push_back(std::nullopt);
    } else if (auto* p = f.as<AF::StepTail>()) {
      Rational am = p->tail.a * Rational(m);
      if (den(am) != 1) throw std::invalid_argument("merge_common_psi: needs integral a*m");
      tails.push_back(Tail{rpow(p->tail.c, static_cast<long>(m)), static_cast<long>(num(am))});
    } else {
      throw std::invalid_argument("merge_common_psi: unsupported representation");
    }
    F = std::max(F, f.last_breakpoint());
  }
  // dominant tail: smallest exponent, then largest coefficient
  std::optional<std::size_t> win;
  for (std::size_t i = 0; i < tails.size(); ++i) {
    if (!tails[i]) continue;
    if (!win || tails[i]->e < tails[*win]->e ||
        (tails[i]->e == tails[*win]->e && tails[i]->c_pow > tails[*win]->c_pow))
      win = i;
  }
  // push F until the winner dominates every other tail for all q > F:
  // c_w q^{-e_w} >= c_i q^{-e_i} for q > F iff c_w F'^{e_i - e_w} >= c_i at
  // F' = F+1 (monotone since e_i >= e_w)
  if (win) {
    for (std::size_t i = 0; i < tails.size(); ++i) {
      if (!tails[i] || i == *win) continue;
      while (tails[*win]->c_pow * rpow(Rational(F + 1), tails[i]->e - tails[*win]->e) <
             tails[i]->c_pow) {
        F *= 2;
        if (F > Integer(1) << 20)
          throw std::invalid_argument("merge_common_psi: tail crossover beyond supported range");
      }
    }
  }
  // merged heights on 1..F (unit blocks, coalesced)
  std::vector<AF::Block> blocks;
  for (Integer q = 1; q <= F; ++q) {
    Rational h(0);
    for (const auto& f : list) h = std::max(h, f.value_pow_m(q, m));
    if (!blocks.empty() && blocks.back().h == h) blocks.back().b = q;
    else blocks.push_back({q, h});
    if (blocks.size() > (1u << 17))
      throw std::invalid_argument("merge_common_psi: too many blocks");
  }
  MergeResult out;
  if (win) {
    const Tail& w = *tails[*win];
    // recover the unpowered law: c = c_pow^{1/m} exactly when possible, else
    // keep the powered form with exponent scaled back through a*m = e
    Rational c = m == 1 ? w.c_pow : rational_nth_root_upper(w.c_pow, m, 96);
    out.psi = ApproxFunction::step_tail(std::move(blocks), c, Rational(w.e) / Rational(m));
  } else {
    out.psi = ApproxFunction::step(std::move(blocks));
  }
  Integer T = std::max(F, Integer(8));
  out.total = series_value(out.psi, m, n, T).total();
  Interval sum(Rational(0));
  for (const auto& f : list) sum = sum + series_value(f, m, n, T).total();
  out.sum_of_totals = sum;
  return out;
}

}  // namespace dioph
