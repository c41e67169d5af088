#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dioph/lattice.hpp"
#include "dioph/series.hpp"
#include "dioph/witness.hpp"

namespace dioph {

// ---------------------------------------------------------------------------
// literals
//
//   rationals:   "p/q", "p", "0.25"
//   CF reals:    "golden" | "liouville:B" | "cf:const:C" | "cf:growth:a1[,a2...]"
//   finite "cf:[a1,...]" is rational and rejected as an ExactReal (use p/q);
//   the cf subcommand still accepts it for table work.

inline std::vector<Integer> parse_int_list(std::string_view s) {
  std::vector<Integer> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(Integer(cur));
      cur.clear();
    }
  };
  for (char c : s) {
    if (c == ',' || c == ' ') flush();
    else if (c == '[' || c == ']') continue;
    else cur += c;
  }
  flush();
  return out;
}

inline ContinuedFraction parse_cf(std::string_view s, std::size_t max_bits = 4096) {
  if (s == "golden") return ContinuedFraction::golden();
  if (s.rfind("liouville:", 0) == 0) {
    int base = std::stoi(std::string(s.substr(10)));
    if (base < 2) throw ParseError("liouville base must be >= 2");
    return ContinuedFraction::liouville(static_cast<unsigned>(base));
  }
  if (s.rfind("cf:const:", 0) == 0) {
    Integer c(std::string(s.substr(9)));
    if (c < 1) throw ParseError("cf:const quotient must be >= 1");
    return ContinuedFraction::constant(c, max_bits);
  }
  if (s.rfind("cf:growth:", 0) == 0) {
    auto seed = parse_int_list(s.substr(10));
    if (seed.empty()) throw ParseError("cf:growth needs a seed quotient list");
    return ContinuedFraction::growth_qk(seed, max_bits);
  }
  if (s.rfind("cf:[", 0) == 0) {
    auto qs = parse_int_list(s.substr(3));
    if (qs.empty()) throw ParseError("cf:[...] needs quotients");
    return ContinuedFraction::finite(qs, max_bits);
  }
  throw ParseError("bad continued-fraction literal: '" + std::string(s) + "'");
}

inline ExactReal parse_exact_real(std::string_view s, std::size_t max_bits = 4096) {
  if (s == "golden" || s.rfind("liouville:", 0) == 0 || s.rfind("cf:", 0) == 0) {
    ContinuedFraction cf = parse_cf(s, max_bits);
    if (cf.is_finite())
      throw ParseError("finite continued fractions are rational; write the value as p/q");
    return ExactReal(std::move(cf));
  }
  return ExactReal(parse_rational(s));
}

// psi specs:  "pow:c,a" | "step:[(b,h),...]" | "steptail:[(b,h),...]|pow:c,a"
// step heights are the stored m-th powers
inline ApproxFunction parse_psi(std::string_view s) {
  auto parse_blocks = [](std::string_view body) {
    std::vector<ApproxFunction::Block> blocks;
    std::string cur;
    std::vector<std::string> parts;
    int depth = 0;
    for (char c : body) {
      if (c == '(') { depth++; cur.clear(); }
      else if (c == ')') {
        depth--;
        parts.push_back(cur);
      } else if (depth == 1) cur += c;
    }
    for (const auto& p : parts) {
      auto comma = p.find(',');
      if (comma == std::string::npos) throw ParseError("step block needs (b,h)");
      blocks.push_back({Integer(p.substr(0, comma)), parse_rational(p.substr(comma + 1))});
    }
    return blocks;
  };
  if (s.rfind("pow:", 0) == 0) {
    auto body = s.substr(4);
    auto comma = body.find(',');
    if (comma == std::string_view::npos) throw ParseError("pow spec needs c,a");
    return ApproxFunction::power(parse_rational(body.substr(0, comma)),
                                 parse_rational(body.substr(comma + 1)));
  }
  if (s.rfind("step:", 0) == 0) return ApproxFunction::step(parse_blocks(s.substr(5)));
  if (s.rfind("steptail:", 0) == 0) {
    auto body = s.substr(9);
    auto bar = body.find('|');
    if (bar == std::string_view::npos || body.substr(bar + 1, 4) != "pow:")
      throw ParseError("steptail spec needs ...|pow:c,a");
    auto blocks = parse_blocks(body.substr(0, bar));
    auto pw = body.substr(bar + 5);
    auto comma = pw.find(',');
    if (comma == std::string_view::npos) throw ParseError("pow spec needs c,a");
    return ApproxFunction::step_tail(std::move(blocks), parse_rational(pw.substr(0, comma)),
                                     parse_rational(pw.substr(comma + 1)));
  }
  throw ParseError("bad psi spec: '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// system spec files: flat key = value lines, '#' comments
//
//   m = 1
//   n = 1
//   A = golden            (row-major entries, comma/space separated)
//   gamma = 0/1           (or "orbit:q1,q2,..." for gamma = frac(A q0))

inline std::vector<std::string> split_entries(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline AffineSystem parse_system(const std::string& text, std::size_t cf_max_bits = 4096) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (!blank)
        throw ParseError("system spec line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string v) {
      auto b = v.find_first_not_of(" \t\r");
      auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw ParseError("system spec misses key '" + k + "'");
    return it->second;
  };
  AffineSystem sys;
  sys.m = static_cast<unsigned>(std::stoul(need("m")));
  sys.n = static_cast<unsigned>(std::stoul(need("n")));
  for (const auto& e : split_entries(need("A"))) sys.A.push_back(parse_exact_real(e, cf_max_bits));
  std::string g = need("gamma");
  if (g.rfind("orbit:", 0) == 0) {
    std::vector<long> q0;
    for (const auto& e : split_entries(g.substr(6))) q0.push_back(std::stol(e));
    sys.gamma_orbit = std::move(q0);
    sys.gamma.assign(sys.m, ExactReal(Rational(0)));
  } else {
    for (const auto& e : split_entries(g)) sys.gamma.push_back(parse_exact_real(e, cf_max_bits));
  }
  sys.validate();
  return sys;
}

// ---------------------------------------------------------------------------
// deterministic CSV writers (canonical "p/q" rationals only)

inline std::string csv_min_table(const MinTable& table, unsigned n) {
  std::ostringstream os;
  os << "t,m_lo,m_hi,flag";
  for (unsigned j = 1; j <= n; ++j) os << ",q" << j;
  os << "\n";
  for (const auto& row : table.rows) {
    os << row.t << "," << rat_str(row.value.lo) << "," << rat_str(row.value.hi) << ","
       << (row.flag ? 1 : 0);
    for (long c : row.argmin) os << "," << c;
    os << "\n";
  }
  return os.str();
}

inline std::string csv_badness(const BadnessProfile& prof, unsigned n) {
  std::ostringstream os;
  os << "t,b_lo,b_hi,flag";
  for (unsigned j = 1; j <= n; ++j) os << ",q" << j;
  os << "\n";
  for (const auto& row : prof.rows) {
    os << row.t << "," << rat_str(row.value.lo) << "," << rat_str(row.value.hi) << ","
       << (row.flag ? 1 : 0);
    for (long c : row.argmin) os << "," << c;
    os << "\n";
  }
  return os.str();
}

inline std::string csv_ledger(const SeriesLedger& led) {
  std::ostringstream os;
  os << "t,term_lo,term_hi,partial_lo,partial_hi\n";
  for (std::size_t i = 0; i < led.terms.size(); ++i) {
    os << led.terms[i].first << "," << rat_str(led.terms[i].second.lo) << ","
       << rat_str(led.terms[i].second.hi) << "," << rat_str(led.partials[i].lo) << ","
       << rat_str(led.partials[i].hi) << "\n";
  }
  return os.str();
}

inline std::string csv_convergents(const ConvergentTable& table) {
  std::ostringstream os;
  os << "k,a_k,p_k,q_k\n";
  for (const auto& row : table.rows) {
    os << row.k << ",";
    if (row.a != 0) os << row.a.str();
    os << "," << row.p.str() << "," << row.q.str() << "\n";
  }
  return os.str();
}

inline std::string psi_to_spec(const ApproxFunction& psi) {
  using AF = ApproxFunction;
  std::ostringstream os;
  if (auto* p = psi.as<AF::Power>()) {
    os << "pow:" << rat_str(p->law.c) << "," << rat_str(p->law.a);
    return os.str();
  }
  auto blocks_out = [&](const std::vector<AF::Block>& blocks) {
    os << "[";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (i) os << ",";
      os << "(" << blocks[i].b.str() << "," << rat_str(blocks[i].h) << ")";
    }
    os << "]";
  };
  if (auto* p = psi.as<AF::Step>()) {
    os << "step:";
    blocks_out(p->blocks);
    return os.str();
  }
  if (auto* p = psi.as<AF::StepTail>()) {
    os << "steptail:";
    blocks_out(p->blocks);
    os << "|pow:" << rat_str(p->tail.c) << "," << rat_str(p->tail.a);
    return os.str();
  }
  if (auto* p = psi.as<AF::PowerCut>()) {
    os << "powcut:" << rat_str(p->law.c) << "," << rat_str(p->law.a) << "," << p->N.str();
    return os.str();
  }
  auto* p = psi.as<AF::PowerPlusStep>();
  os << "powstep:" << rat_str(p->base.c) << "," << rat_str(p->base.a) << "|";
  blocks_out(p->adds);
  return os.str();
}

}  // namespace dioph
