#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dioph/contfrac.hpp"

namespace dioph {

struct DimensionReport {
  std::string formula;
  std::optional<Rational> exact;
  std::optional<RatPair> bounds;  // window-numeric bracket
  std::vector<std::string> hypotheses;
};

// dim of the homogeneous singular set (and of the homogeneous fiber of the
// all-rates set): mn(1 - 1/(m+n)), for mn > 1
inline Rational dim_sing_homog(unsigned m, unsigned n) {
  if (m * n <= 1)
    throw std::invalid_argument("dim_sing_homog: mn > 1 (the 1x1 case is countable)");
  return Rational(m) * Rational(n) * (1 - Rational(1, m + n));
}

// lower bound for the inhomogeneous fiber, m > n:
// m(n-1) + m((m-n)/(m+n))^2
inline Rational dim_omega_gamma_lower(unsigned m, unsigned n) {
  if (m <= n) throw std::invalid_argument("dim_omega_gamma_lower: m > n required");
  Rational r(Integer(m) - Integer(n), Integer(m) + Integer(n));
  return Rational(m) * Rational(Integer(n) - 1) + Rational(m) * r * r;
}

// lower bound for the inhomogeneous singular set at exponent kappa in [0, m/n):
// m(n-1) + m((m - n kappa)/(m + n kappa))^2
inline Rational dim_sing_inhomog_lower(unsigned m, unsigned n, const Rational& kappa) {
  if (kappa < 0 || kappa >= Rational(m) / Rational(n))
    throw std::invalid_argument("dim_sing_inhomog_lower: 0 <= kappa < m/n");
  Rational r = (Rational(m) - Rational(n) * kappa) / (Rational(m) + Rational(n) * kappa);
  return Rational(m) * Rational(Integer(n) - 1) + Rational(m) * r * r;
}

// 1-D fiber over alpha: (upper bound, exact value under super-exponential
// growth) = (2/(w+1), 1/(w+1)); w = +infinity gives (0, 0)
inline std::pair<Rational, Rational> dim_omega_alpha_bounds(const std::optional<Rational>& w) {
  if (!w) return {Rational(0), Rational(0)};
  if (*w < 1) throw std::invalid_argument("dim_omega_alpha_bounds: w >= 1");
  return {Rational(2) / (*w + 1), Rational(1) / (*w + 1)};
}

// ---------------------------------------------------------------------------
// the maximal subsequence (n_k) of (q_k) entering the uniform-approximation
// dimension formula:
//   tau < 1:  n_k <n_k a>^tau < 1
//   tau > 1:  n_k^tau <n_k a> < 2
// memberships decided by exact rational comparison against the sandwich
// enclosure of <q_k a>; undecided indices are flagged, never guessed.

struct SubsequenceSelection {
  Rational tau;
  bool below_one = false;
  std::vector<std::size_t> selected;
  std::vector<std::size_t> undecided;
  std::size_t K = 0;
};

inline SubsequenceSelection select_subsequence(const ContinuedFraction& cf, const Rational& tau,
                                               std::size_t K) {
  if (tau == 1) throw std::invalid_argument("select_subsequence: tau != 1");
  if (tau <= 0) throw std::invalid_argument("select_subsequence: tau > 0");
  SubsequenceSelection sel;
  sel.tau = tau;
  sel.below_one = tau < 1;
  sel.K = K;
  Integer u = num(tau);
  unsigned v = static_cast<unsigned>(den(tau));
  for (std::size_t k = 1; k <= K; ++k) {
    Integer qk = cf.row(k).q;
    Interval x = qk_dist(cf, k);
    bool in = false, out = false;
    long ue = static_cast<long>(u);
    if (sel.below_one) {
      // q x^tau < 1  <=>  q^v x^u < 1
      Rational lhs_hi = Rational(ipow(qk, v)) * rpow(x.hi, ue);
      Rational lhs_lo = Rational(ipow(qk, v)) * rpow(x.lo, ue);
      in = lhs_hi < 1;
      out = lhs_lo >= 1;
    } else {
      // q^tau x < 2  <=>  q^u x^v < 2^v
      Rational bound = rpow(Rational(2), static_cast<long>(v));
      Rational lhs_hi = Rational(ipow(qk, static_cast<unsigned>(ue))) * rpow(x.hi, static_cast<long>(v));
      Rational lhs_lo = Rational(ipow(qk, static_cast<unsigned>(ue))) * rpow(x.lo, static_cast<long>(v));
      in = lhs_hi < bound;
      out = lhs_lo >= bound;
    }
    if (in) sel.selected.push_back(k);
    else if (!out) sel.undecided.push_back(k);
  }
  return sel;
}

namespace detail {

// bracket division by a positive-bracket denominator
inline RatPair div_pos(const RatPair& a, const RatPair& b) {
  if (b.lo <= 0) throw std::domain_error("div_pos: denominator bracket must be positive");
  Rational lo = a.lo >= 0 ? a.lo / b.hi : a.lo / b.lo;
  Rational hi = a.hi >= 0 ? a.hi / b.lo : a.hi / b.hi;
  return {lo, hi};
}

inline RatPair add(const RatPair& a, const RatPair& b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline RatPair sub(const RatPair& a, const RatPair& b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline RatPair scale(const RatPair& a, const Rational& c) {
  return c >= 0 ? RatPair{a.lo * c, a.hi * c} : RatPair{a.hi * c, a.lo * c};
}

}  // namespace detail

// Window evaluation of the uniform-approximation dimension expression (the
// tau-branch formulas), cross-checked against the closed-form bracket
// (w/tau - 1)/(w^2 - 1) <= dim <= (1/tau + 1)/(w + 1).
inline DimensionReport dim_U_tau_estimate(const ContinuedFraction& cf, const Rational& tau,
                                          std::size_t K, unsigned denom = 256) {
  DimensionReport rep;
  rep.formula = "U_tau[alpha] window liminf";
  ExponentEstimate west = irrationality_exponent_estimate(cf, K, denom);
  // branch selection against the window (finite windows only bound w(alpha);
  // the report says which window was used)
  rep.hypotheses.push_back("w-window limsup in [" + rat_str(west.window_limsup.lo) + ", " +
                           rat_str(west.window_limsup.hi) + "] over k in [" +
                           std::to_string(west.k_lo) + ", " + std::to_string(west.k_hi) + "]");
  if (tau > west.window_limsup.hi) {
    rep.exact = Rational(0);
    rep.hypotheses.push_back("tau above the w-window: lemma branch value 0 (window evidence)");
    return rep;
  }
  if (tau < 1 / west.window_limsup.hi) {
    rep.exact = Rational(1);
    rep.hypotheses.push_back("tau below the 1/w-window: lemma branch value 1 (window evidence)");
    return rep;
  }
  if (tau == 1)
    throw std::invalid_argument("dim_U_tau_estimate: tau = 1 is outside the lemma's range");

  SubsequenceSelection sel = select_subsequence(cf, tau, K);
  if (!sel.undecided.empty())
    rep.hypotheses.push_back(std::to_string(sel.undecided.size()) +
                             " undecided membership(s) excluded from the window");
  if (sel.selected.size() < 3) {
    rep.hypotheses.push_back("selection too short for a window estimate");
    return rep;
  }
  // log2 brackets of n_j and <n_j alpha>
  std::vector<RatPair> Ln, Ld;
  for (std::size_t idx : sel.selected) {
    Ln.push_back(log2_bracket(cf.row(idx).q, denom));
    Ld.push_back(log2_bracket(Rational(qk_dist(cf, idx).lo), denom));
    RatPair hiB = log2_bracket(Rational(qk_dist(cf, idx).hi), denom);
    Ld.back() = {Ld.back().lo, hiB.hi};
  }
  Rational inv_tau = 1 / tau;
  std::optional<RatPair> liminf;
  std::size_t lo_k = std::max<std::size_t>(1, sel.selected.size() / 2);
  for (std::size_t k = lo_k; k < sel.selected.size(); ++k) {
    RatPair num{Rational(0), Rational(0)};
    if (tau < 1) {
      num = detail::scale(Ln[k], 1 + inv_tau);
      for (std::size_t j = 0; j < k; ++j)
        num = detail::add(num, detail::add(detail::scale(Ln[j], inv_tau), Ld[j]));
    } else {
      for (std::size_t j = 0; j < k; ++j)
        num = detail::sub(num, detail::add(Ln[j], detail::scale(Ld[j], inv_tau)));
    }
    RatPair den = detail::sub(Ln[k], Ld[k]);
    RatPair val = detail::div_pos(num, den);
    if (!liminf) liminf = val;
    else liminf = RatPair{std::min(liminf->lo, val.lo), std::min(liminf->hi, val.hi)};
  }
  rep.bounds = liminf;
  // closed-form cross-check from the bounds lemma
  RatPair w = west.window_limsup;
  if (w.lo > 1) {
    RatPair lower = detail::div_pos(RatPair{w.lo / tau - 1, w.hi / tau - 1},
                                    RatPair{w.hi * w.hi - 1, w.lo * w.lo - 1});
    Rational upper_hi = (inv_tau + 1) / (w.lo + 1);
    rep.hypotheses.push_back("bounds-lemma bracket: [" + rat_str(lower.lo) + ", " +
                             rat_str(upper_hi) + "] (window w)");
  }
  return rep;
}

// Window evaluation of the simplified expression valid under
// liminf log q_{k+1} / log q_k > 1:
//   ((1/tau) log q_k + (1/tau - 1) sum_{j=2}^{k-1} log q_j)
//   / (log q_k + log q_{k+1}),  minimized over 2 <= k <= K.
inline DimensionReport simplified_dim_expr(const ContinuedFraction& cf, const Rational& tau,
                                           std::size_t K, unsigned denom = 256) {
  if (K < 3) throw std::invalid_argument("simplified_dim_expr: K >= 3");
  DimensionReport rep;
  rep.formula = "super-exponential simplified window expression";
  ExponentEstimate west = irrationality_exponent_estimate(cf, K, denom);
  if (!(west.window_liminf.lo > 1))
    rep.hypotheses.push_back(
        "HypothesisUnverified: window liminf of log q_{k+1}/log q_k is not certified > 1; the "
        "simplification is unjustified for this alpha");
  Rational inv_tau = 1 / tau;
  std::vector<RatPair> L;  // log2 q_k brackets, index k
  L.push_back({Rational(0), Rational(0)});  // k = 0 placeholder (q_0 = 1)
  for (std::size_t k = 1; k <= K + 1; ++k) L.push_back(log2_bracket(cf.row(k).q, denom));
  RatPair sum{Rational(0), Rational(0)};  // sum_{j=2}^{k-1} log q_j
  std::optional<RatPair> liminf;
  for (std::size_t k = 2; k <= K; ++k) {
    RatPair num = detail::add(detail::scale(L[k], inv_tau), detail::scale(sum, inv_tau - 1));
    RatPair den = detail::add(L[k], L[k + 1]);
    RatPair val = detail::div_pos(num, den);
    if (!liminf) liminf = val;
    else liminf = RatPair{std::min(liminf->lo, val.lo), std::min(liminf->hi, val.hi)};
    sum = detail::add(sum, L[k]);  // include log q_k for the next iteration
  }
  rep.bounds = liminf;
  return rep;
}

// ---------------------------------------------------------------------------
// series classifiers

enum class SeriesClass { Converges, Diverges };

// Hausdorff-measure classifier for the complement of the Dirichlet set: the
// series sum 1/(psi(T) T^2) (T^{1/n}/psi(T)^{1/m})^{mn-s} with psi = c T^-a
// has terms ~ T^e, e = a - 2 + (mn - s)(1/n + a/m).  Converges iff e < -1;
// e = -1 diverges with the harmonic series.
inline SeriesClass kimkim_classifier(const Rational& a, unsigned m, unsigned n,
                                     const Rational& s) {
  if (s < 0 || s > Rational(m) * Rational(n))
    throw std::invalid_argument("kimkim_classifier: 0 <= s <= mn");
  Rational e = a - 2 + (Rational(m) * Rational(n) - s) * (Rational(1, n) + a / Rational(m));
  return e < -1 ? SeriesClass::Converges : SeriesClass::Diverges;
}

enum class KGSide { ZeroMeasureSide, FullMeasureSide };

// Khintchine-Groshev dichotomy for power laws psi = c q^-a (decreasing):
// zero measure iff sum q^{n-1} psi^m converges iff a m > n
inline KGSide kg_classifier(const Rational& a, unsigned m, unsigned n) {
  return a * Rational(m) > Rational(n) ? KGSide::ZeroMeasureSide : KGSide::FullMeasureSide;
}

}  // namespace dioph
