#pragma once

#include <algorithm>
#include <future>
#include <optional>
#include <span>
#include <vector>

#include "dioph/approx_function.hpp"
#include "dioph/exact_real.hpp"

namespace dioph {

using Point = std::vector<long>;

// The pair (A, gamma), all entries in [0,1).  gamma is given either as exact
// values, as an orbit shift (gamma = frac(A q0), which keeps distances exact
// even for irrational entries), or as an interval enclosure (the form the
// gamma-witness construction emits).
struct AffineSystem {
  unsigned m = 1, n = 1;
  std::vector<ExactReal> A;                         // row-major m x n
  std::vector<ExactReal> gamma;                     // m entries
  std::optional<std::vector<long>> gamma_orbit;     // gamma = frac(A q0)
  std::optional<std::vector<Interval>> gamma_enc;   // interval gamma

  static AffineSystem scalar(ExactReal alpha, ExactReal g) {
    AffineSystem s;
    s.m = s.n = 1;
    s.A = {std::move(alpha)};
    s.gamma = {std::move(g)};
    return s;
  }

  void validate() const {
    if (m < 1 || n < 1) throw std::invalid_argument("system: m, n >= 1");
    if (A.size() != static_cast<std::size_t>(m) * n)
      throw std::invalid_argument("system: A must have m*n entries");
    auto in_unit = [](const ExactReal& x) {
      if (x.is_rational()) return x.rational() >= 0 && x.rational() < 1;
      return true;  // continued fractions here are in [0,1) by construction
    };
    for (const auto& e : A)
      if (!in_unit(e)) throw std::invalid_argument("system: entries must lie in [0,1)");
    if (gamma_orbit) {
      if (gamma_orbit->size() != n) throw std::invalid_argument("system: orbit shift has n entries");
    } else if (gamma_enc) {
      if (gamma_enc->size() != m) throw std::invalid_argument("system: gamma enclosure has m entries");
    } else {
      if (gamma.size() != m) throw std::invalid_argument("system: gamma must have m entries");
      for (const auto& g : gamma)
        if (!in_unit(g)) throw std::invalid_argument("system: gamma must lie in [0,1)");
    }
  }

  // gamma identically zero (exact), enabling the sign-symmetry half scan
  bool homogeneous() const {
    if (gamma_enc) return false;
    if (gamma_orbit)
      return std::all_of(gamma_orbit->begin(), gamma_orbit->end(), [](long v) { return v == 0; });
    return std::all_of(gamma.begin(), gamma.end(), [](const ExactReal& g) {
      return g.is_rational() && g.rational() == 0;
    });
  }
};

// A(1,q,0,...,0)^T = gamma: first column gamma, all other columns zero.
// Stored with the orbit shift q0 = e_1 so the zero family is exact for any
// entry kind.
inline AffineSystem build_trivial_member(std::vector<ExactReal> gamma, unsigned n) {
  if (n < 2) throw std::invalid_argument("trivial member needs n >= 2");
  AffineSystem s;
  s.m = static_cast<unsigned>(gamma.size());
  s.n = n;
  if (s.m < 1) throw std::invalid_argument("trivial member: m >= 1");
  s.A.reserve(static_cast<std::size_t>(s.m) * n);
  for (unsigned i = 0; i < s.m; ++i) {
    s.A.push_back(gamma[i]);
    for (unsigned j = 1; j < n; ++j) s.A.push_back(ExactReal(Rational(0)));
  }
  s.gamma = std::move(gamma);
  std::vector<long> q0(n, 0);
  q0[0] = 1;
  s.gamma_orbit = q0;
  return s;
}

// ---------------------------------------------------------------------------
// shell enumeration: all q with ||q||_inf = t, lexicographic order

namespace detail {
template <class F>
void shell_rec(unsigned n, long t, unsigned depth, bool has_extreme, Point& buf, F&& fn) {
  if (depth == n - 1) {
    if (has_extreme) {
      for (long c = -t; c <= t; ++c) {
        buf[depth] = c;
        fn(const_cast<const Point&>(buf));
      }
    } else {
      buf[depth] = -t;
      fn(const_cast<const Point&>(buf));
      buf[depth] = t;
      fn(const_cast<const Point&>(buf));
    }
    return;
  }
  for (long c = -t; c <= t; ++c) {
    buf[depth] = c;
    shell_rec(n, t, depth + 1, has_extreme || c == -t || c == t, buf, fn);
  }
}
}  // namespace detail

template <class F>
void for_each_shell_point(unsigned n, long t, F&& fn) {
  if (t < 1) throw std::invalid_argument("shell: t >= 1");
  Point buf(n);
  detail::shell_rec(n, t, 0, false, buf, std::forward<F>(fn));
}

inline std::vector<Point> shell_points(unsigned n, long t) {
  std::vector<Point> out;
  for_each_shell_point(n, t, [&](const Point& q) { out.push_back(q); });
  return out;
}

inline bool canonical_rep(const Point& q) {
  for (long c : q) {
    if (c > 0) return true;
    if (c < 0) return false;
  }
  return false;  // origin never appears on a shell
}

// ---------------------------------------------------------------------------
// distance evaluation

struct DistVal {
  Interval enc;
  bool flag = false;  // precision budget could not settle a needed decision
};

// Precompiled evaluator for <A q - gamma>.  Rational systems run entirely on
// integer residues against a common denominator; systems with continued
// fraction entries are refined once to the precision budget and evaluated in
// interval arithmetic afterwards (shareable across threads, no mutation).
class DistanceOracle {
 public:
  DistanceOracle(const AffineSystem& sys, unsigned budget_bits = kDefaultBudgetBits)
      : m_(sys.m), n_(sys.n) {
    sys.validate();
    shift_.assign(n_, 0);
    if (sys.gamma_orbit) shift_ = *sys.gamma_orbit;
    bool all_rat = std::all_of(sys.A.begin(), sys.A.end(),
                               [](const ExactReal& e) { return e.is_rational(); });
    bool gamma_rat = sys.gamma_orbit ||
                     (!sys.gamma_enc && std::all_of(sys.gamma.begin(), sys.gamma.end(),
                                                    [](const ExactReal& g) { return g.is_rational(); }));
    rational_ = all_rat && gamma_rat;
    if (rational_) {
      D_ = 1;
      for (const auto& e : sys.A) D_ = boost::multiprecision::lcm(D_, den(e.rational()));
      if (!sys.gamma_orbit)
        for (const auto& g : sys.gamma) D_ = boost::multiprecision::lcm(D_, den(g.rational()));
      for (const auto& e : sys.A) Aint_.push_back(num(e.rational()) * (D_ / den(e.rational())));
      if (sys.gamma_orbit) {
        gint_.assign(m_, Integer(0));
      } else {
        for (const auto& g : sys.gamma)
          gint_.push_back(num(g.rational()) * (D_ / den(g.rational())));
      }
    } else {
      for (const auto& e : sys.A) Aiv_.push_back(e.refine(budget_bits));
      if (sys.gamma_enc) {
        giv_ = *sys.gamma_enc;
      } else if (sys.gamma_orbit) {
        giv_.assign(m_, Interval(Rational(0)));
      } else {
        for (const auto& g : sys.gamma) giv_.push_back(g.refine(budget_bits));
      }
    }
  }

  bool rational_path() const { return rational_; }
  unsigned m() const { return m_; }
  unsigned n() const { return n_; }
  // common denominator of all entries (rational path only)
  const Integer& common_denominator() const { return D_; }

  // enclosure of the raw coordinate (A q)_i, no gamma, no orbit shift
  Interval image(std::span<const long> q, unsigned i) const {
    if (rational_) {
      Integer s(0);
      for (unsigned j = 0; j < n_; ++j)
        s += Aint_[static_cast<std::size_t>(i) * n_ + j] * Integer(q[j]);
      return Interval(Rational(s, D_));
    }
    Interval y(Rational(0));
    for (unsigned j = 0; j < n_; ++j)
      y = y + Aiv_[static_cast<std::size_t>(i) * n_ + j] * Rational(q[j]);
    return y;
  }

  DistVal dist(std::span<const long> q) const {
    if (rational_) {
      Integer dmax(0);
      for (unsigned i = 0; i < m_; ++i) {
        Integer s = -gint_[i];
        for (unsigned j = 0; j < n_; ++j)
          s += Aint_[static_cast<std::size_t>(i) * n_ + j] * Integer(q[j] - shift_[j]);
        Integer r = s % D_;
        if (r < 0) r += D_;
        Integer d2 = D_ - r;
        Integer d = std::min(r, d2);
        if (d > dmax) dmax = d;
      }
      return {Interval(Rational(dmax, D_)), false};
    }
    DistVal out;
    bool first = true;
    for (unsigned i = 0; i < m_; ++i) {
      Interval y(Rational(0));
      for (unsigned j = 0; j < n_; ++j)
        y = y + Aiv_[static_cast<std::size_t>(i) * n_ + j] * Rational(q[j] - shift_[j]);
      y = y - giv_[i];
      Interval d = nearest_int_dist(y);
      out.flag = out.flag || contains_half_integer(y);
      out.enc = first ? d : max_enclosure(out.enc, d);
      first = false;
    }
    return out;
  }

 private:
  unsigned m_, n_;
  bool rational_ = false;
  std::vector<long> shift_;
  Integer D_;
  std::vector<Integer> Aint_, gint_;
  std::vector<Interval> Aiv_, giv_;
};

// ---------------------------------------------------------------------------
// deterministic min reduction
//
// State tracks the exact min-fold enclosure plus every candidate that is not
// decidably above it.  Exact ties collapse to the lexicographically smallest
// q; budget-undecidable near-ties stay and widen the reported row (flagged).
// The merge is a function of the candidate multiset, so any partition of the
// work reduces to the same result.

struct MinCandidate {
  Interval val;
  Point q;
  bool flag = false;
};

struct MinReduceState {
  std::optional<Interval> fold;
  std::vector<MinCandidate> possible;
  bool eval_flag = false;

  void add(Interval val, const Point& q, bool flag) {
    eval_flag = eval_flag || flag;
    fold = fold ? min_enclosure(*fold, val) : val;
    if (val.lo > fold->hi) {
      prune();
      return;
    }
    for (auto& c : possible) {
      if (c.val == val && c.val.is_point()) {  // exact tie
        if (std::lexicographical_compare(q.begin(), q.end(), c.q.begin(), c.q.end())) c.q = q;
        prune();
        return;
      }
    }
    possible.push_back(MinCandidate{std::move(val), q, flag});
    prune();
  }

  void merge(const MinReduceState& o) {
    if (!o.fold) return;
    eval_flag = eval_flag || o.eval_flag;
    fold = fold ? min_enclosure(*fold, *o.fold) : *o.fold;
    for (const auto& c : o.possible) {
      bool tied = false;
      for (auto& mine : possible) {
        if (mine.val == c.val && mine.val.is_point()) {
          if (std::lexicographical_compare(c.q.begin(), c.q.end(), mine.q.begin(), mine.q.end()))
            mine.q = c.q;
          tied = true;
          break;
        }
      }
      if (!tied) possible.push_back(c);
    }
    prune();
  }

  void prune() {
    if (!fold) return;
    std::erase_if(possible, [&](const MinCandidate& c) { return c.val.lo > fold->hi; });
  }

  bool empty() const { return !fold.has_value(); }

  // reported enclosure: the min-fold, widened to cover every live candidate
  // when the argmin is ambiguous
  Interval report_value() const {
    Interval v = *fold;
    if (possible.size() > 1)
      for (const auto& c : possible) v = hull(v, c.val);
    return v;
  }

  const Point& report_argmin() const {
    const Point* best = nullptr;
    for (const auto& c : possible)
      if (!best || std::lexicographical_compare(c.q.begin(), c.q.end(), best->begin(), best->end()))
        best = &c.q;
    if (!best) throw std::logic_error("empty reduction");
    return *best;
  }

  bool ambiguous() const { return possible.size() > 1; }
};

namespace detail {

// evaluate fn over one shell, possibly split across workers; deterministic
template <class Eval>
MinReduceState reduce_shell(const Eval& eval, unsigned n, long t, bool half, unsigned workers) {
  std::vector<Point> pts;
  for_each_shell_point(n, t, [&](const Point& q) {
    if (!half || canonical_rep(q)) pts.push_back(q);
  });
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    MinReduceState st;
    for (std::size_t i = lo; i < hi; ++i) {
      auto dv = eval(pts[i]);
      st.add(std::move(dv.enc), pts[i], dv.flag);
    }
    return st;
  };
  if (workers <= 1 || pts.size() < 2048) return run_range(0, pts.size());
  std::size_t chunk = (pts.size() + workers - 1) / workers;
  std::vector<std::future<MinReduceState>> futs;
  for (std::size_t lo = 0; lo < pts.size(); lo += chunk)
    futs.push_back(std::async(std::launch::async, run_range, lo, std::min(lo + chunk, pts.size())));
  MinReduceState st;
  for (auto& f : futs) st.merge(f.get());
  return st;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// M_l(t) tables

struct MinTableRow {
  long t;
  Interval value;
  Point argmin;
  bool flag = false;
};

struct MinTable {
  long l = 1;
  std::vector<MinTableRow> rows;  // t = l..T
  bool any_flag = false;

  const MinTableRow& at(long t) const { return rows.at(static_cast<std::size_t>(t - l)); }
};

// Incremental min over l <= ||q|| <= t for t = l..T.
inline MinTable min_table(const AffineSystem& sys, long l, long T,
                          unsigned budget_bits = kDefaultBudgetBits, unsigned workers = 1) {
  if (l < 1 || T < l) throw std::invalid_argument("min_table: 1 <= l <= T");
  DistanceOracle oracle(sys, budget_bits);
  bool half = sys.homogeneous();
  MinTable table;
  table.l = l;
  MinReduceState running;
  for (long t = l; t <= T; ++t) {
    MinReduceState shell = detail::reduce_shell(
        [&](const Point& q) { return oracle.dist(q); }, sys.n, t, half, workers);
    running.merge(shell);
    MinTableRow row;
    row.t = t;
    row.value = running.report_value();
    row.argmin = running.report_argmin();
    row.flag = running.ambiguous() || running.eval_flag;
    table.any_flag = table.any_flag || row.flag;
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ---------------------------------------------------------------------------
// record minima of M_1

struct RecordEntry {
  long t;
  Point q;
  Interval value;
  bool flag = false;
};

struct RecordSequence {
  std::vector<RecordEntry> entries;
  bool any_flag = false;
};

// Strict-improvement times of M_1 up to T: t_1 = 1, and t_{k+1} is the least
// t with M_1(t) < M_1(t_k).  Improvements must be certified by the interval
// comparison; an undecidable step is recorded as a flag and skipped.
inline RecordSequence record_minima(const AffineSystem& sys, long T,
                                    unsigned budget_bits = kDefaultBudgetBits,
                                    unsigned workers = 1) {
  MinTable table = min_table(sys, 1, T, budget_bits, workers);
  RecordSequence rec;
  const Interval* prev = nullptr;
  for (const auto& row : table.rows) {
    bool improved;
    if (!prev) {
      improved = true;
    } else if (row.value.hi < prev->lo) {
      improved = true;  // certified strict improvement
    } else if (row.value == *prev) {
      improved = false;  // min unchanged, certified no improvement
    } else {
      rec.any_flag = true;  // undecidable at budget
      improved = false;
    }
    if (improved) {
      rec.entries.push_back(RecordEntry{row.t, row.argmin, row.value, row.flag});
      prev = &rec.entries.back().value;
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// badness profile B(t) = min_{1 <= ||q|| <= t} ||q||^n <A q - gamma>^m

struct BadnessRow {
  long t;
  Interval value;
  Point argmin;
  bool flag = false;
};

struct BadnessProfile {
  std::vector<BadnessRow> rows;
  // liminf-consistent certificate: infimum over the tail window
  // { q : tail_start < ||q|| <= T }; the initial segment is excluded exactly
  // as it is in the liminf itself.
  long tail_start = 0;
  Rational certificate_c;      // lower bound of the tail-window infimum
  Rational uniform_c;          // lower bound over all 1 <= ||q|| <= T
  bool any_flag = false;
};

inline BadnessProfile badness_profile(const AffineSystem& sys, long T,
                                      unsigned budget_bits = kDefaultBudgetBits,
                                      unsigned workers = 1) {
  if (T < 1) throw std::invalid_argument("badness_profile: T >= 1");
  DistanceOracle oracle(sys, budget_bits);
  bool half = sys.homogeneous();
  BadnessProfile prof;
  prof.tail_start = static_cast<long>(int_nth_root_floor(Integer(T), 2));
  MinReduceState running, tail_running;
  for (long t = 1; t <= T; ++t) {
    Rational tn(ipow(Integer(t), sys.n));
    MinReduceState shell = detail::reduce_shell(
        [&](const Point& q) {
          DistVal dv = oracle.dist(q);
          return DistVal{dv.enc.pow_nonneg(sys.m) * tn, dv.flag};
        },
        sys.n, t, half, workers);
    running.merge(shell);
    if (t > prof.tail_start) tail_running.merge(shell);
    BadnessRow row;
    row.t = t;
    row.value = running.report_value();
    row.argmin = running.report_argmin();
    row.flag = running.ambiguous() || running.eval_flag;
    prof.any_flag = prof.any_flag || row.flag;
    prof.rows.push_back(std::move(row));
  }
  prof.uniform_c = running.report_value().lo;
  prof.certificate_c = tail_running.empty() ? Rational(0) : tail_running.report_value().lo;
  return prof;
}

// ---------------------------------------------------------------------------
// psi-Dirichlet tests

// x < c * T^-a for nonnegative rational x, exact
inline bool less_than_power_value(const Rational& x, const Rational& c, const Rational& a,
                                  const Integer& T) {
  // x < c T^{-u/v}  <=>  x^v T^u < c^v (u >= 0), x^v < c^v T^{|u|} otherwise
  Integer u = num(a);
  unsigned v = static_cast<unsigned>(den(a));
  Rational xv = rpow(x, static_cast<long>(v));
  Rational cv = rpow(c, static_cast<long>(v));
  if (u >= 0) return xv * Rational(ipow(T, static_cast<unsigned>(u))) < cv;
  return xv < cv * Rational(ipow(T, static_cast<unsigned>(-u)));
}

// (A,gamma) is psi-Dirichlet at T iff there is q with 1 <= ||q||^n <= T and
// <A q - gamma>^m < psi(T).  psi must be a power law (the form every use in
// the contracts takes).
inline std::vector<CheckResult> dirichlet_test(const AffineSystem& sys, const ApproxFunction& psi,
                                               const std::vector<Integer>& T_list,
                                               unsigned budget_bits = kDefaultBudgetBits) {
  auto* pw = psi.as<ApproxFunction::Power>();
  if (!pw) throw std::invalid_argument("dirichlet_test: psi must be a power law");
  Integer Rmax(0);
  for (const Integer& T : T_list) Rmax = std::max(Rmax, int_nth_root_floor(T, sys.n));
  if (Rmax < 1) return std::vector<CheckResult>(T_list.size(), CheckResult::False);
  MinTable table = min_table(sys, 1, static_cast<long>(Rmax), budget_bits);
  std::vector<CheckResult> out;
  for (const Integer& T : T_list) {
    Integer R = int_nth_root_floor(T, sys.n);
    if (R < 1) {
      out.push_back(CheckResult::False);
      continue;
    }
    const Interval& M = table.at(static_cast<long>(R)).value;
    Rational hi_m = rpow(M.hi, sys.m);
    Rational lo_m = rpow(M.lo, sys.m);
    if (less_than_power_value(hi_m, pw->law.c, pw->law.a, T)) out.push_back(CheckResult::True);
    else if (!less_than_power_value(lo_m, pw->law.c, pw->law.a, T)) out.push_back(CheckResult::False);
    else out.push_back(CheckResult::Undecided);
  }
  return out;
}

// Window evidence for membership in Sing^gamma(kappa): for each epsilon, the
// (eps * T^-kappa)-Dirichlet condition across all thresholds T' <= T.
struct SingularityScan {
  struct PerEps {
    Rational eps;
    std::size_t true_count = 0, false_count = 0, undecided = 0;
    std::vector<Integer> failures;  // thresholds with a certified 'false'
    Rational fraction_true() const {
      std::size_t n = true_count + false_count + undecided;
      return n ? Rational(Integer(true_count), Integer(n)) : Rational(0);
    }
  };
  std::vector<PerEps> per_eps;
};

inline SingularityScan singularity_scan(const AffineSystem& sys, const Rational& kappa,
                                        const std::vector<Rational>& eps_list, const Integer& T,
                                        unsigned budget_bits = kDefaultBudgetBits) {
  if (kappa < 0) throw std::invalid_argument("singularity_scan: kappa >= 0");
  SingularityScan scan;
  Integer Rmax = int_nth_root_floor(T, sys.n);
  MinTable table = min_table(sys, 1, std::max<long>(1, static_cast<long>(Rmax)), budget_bits);
  for (const Rational& eps : eps_list) {
    SingularityScan::PerEps pe;
    pe.eps = eps;
    for (Integer Tp = 1; Tp <= T; ++Tp) {
      Integer R = int_nth_root_floor(Tp, sys.n);
      if (R < 1) {
        ++pe.false_count;
        pe.failures.push_back(Tp);
        continue;
      }
      const Interval& M = table.at(static_cast<long>(R)).value;
      Rational hi_m = rpow(M.hi, sys.m);
      Rational lo_m = rpow(M.lo, sys.m);
      if (less_than_power_value(hi_m, eps, kappa, Tp)) ++pe.true_count;
      else if (!less_than_power_value(lo_m, eps, kappa, Tp)) {
        ++pe.false_count;
        pe.failures.push_back(Tp);
      } else ++pe.undecided;
    }
    scan.per_eps.push_back(std::move(pe));
  }
  return scan;
}

// ---------------------------------------------------------------------------
// solution counting for W_{m,n}(psi) probes

struct SolutionCount {
  Integer lo, hi;  // certified-strict count and certified + undecided
};

inline SolutionCount count_solutions(const AffineSystem& sys, const ApproxFunction& psi, long Q,
                                     unsigned budget_bits = kDefaultBudgetBits) {
  if (Q < 1) throw std::invalid_argument("count_solutions: Q >= 1");
  DistanceOracle oracle(sys, budget_bits);
  bool half = sys.homogeneous();
  Integer lo(0), hi(0);
  for (long t = 1; t <= Q; ++t) {
    Rational psi_m = psi.value_pow_m(Integer(t), sys.m);
    for_each_shell_point(sys.n, t, [&](const Point& q) {
      if (half && !canonical_rep(q)) return;
      DistVal dv = oracle.dist(q);
      Integer w = half ? 2 : 1;
      if (rpow(dv.enc.hi, sys.m) < psi_m) {
        lo += w;
        hi += w;
      } else if (rpow(dv.enc.lo, sys.m) < psi_m) {
        hi += w;  // undecided at budget
      }
    });
  }
  return SolutionCount{std::move(lo), std::move(hi)};
}

}  // namespace dioph
