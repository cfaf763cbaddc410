// test support :: brute-force oracle for Presburger sentences
//
// Bounded nested search. The per-quantifier bound is derived from Cooper's
// periodicity: lcm of moduli and coefficient magnitudes plus the constant
// and coefficient extremes, and it cascades - the range of an inner variable
// grows with the values of the outer ones (witnesses live within a period of
// the boundary terms, which are linear in the outer variables).
//
// For a single quantifier over a quantifier-free matrix this bound is exact
// Cooper theory. For nested prefixes coefficient growth during elimination
// can in principle exceed it, so every sampled sentence is re-evaluated at
// twice the bound and skipped as "bound-unstable" when the verdicts differ;
// skipping is decided before Cooper is consulted, so it cannot bias the
// comparison.
#ifndef MTP_TESTS_PRESBURGER_ORACLE_HPP
#define MTP_TESTS_PRESBURGER_ORACLE_HPP

#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mtp/presburger.hpp"
#include "gen.hpp"

namespace pb_oracle {

using mtp::Int;
using mtp::presburger::AtomKind;
using mtp::presburger::LinTerm;
using mtp::presburger::PFormula;

inline long eval_lin(const LinTerm& t, const std::map<std::string, long>& env) {
  long v = (long)t.k;
  for (const auto& [var, c] : t.coef) v += (long)c * env.at(var);
  return v;
}

struct BoundParams {
  long lcm_all = 1;   // lcm of coefficient magnitudes and moduli
  long dl = 1;        // lcm_all * lcm(moduli), the divisibility period slack
};

inline void scan(const PFormula& f, Int& l, Int& d) {
  if (f.kind == PFormula::f_atom) {
    for (const auto& [v, c] : f.t.coef) l = mtp::lcm_int(l, c);
    if (f.akind == AtomKind::divides || f.akind == AtomKind::ndivides) {
      l = mtp::lcm_int(l, f.d);
      d = mtp::lcm_int(d, f.d);
    }
  }
  for (const auto& k : f.kids) scan(k, l, d);
}

inline BoundParams bound_params(const PFormula& sentence) {
  Int l = 1, d = 1;
  scan(sentence, l, d);
  BoundParams p;
  p.lcm_all = (long)l;
  p.dl = (long)l * (long)d;
  return p;
}

// sum over atoms of |k| + sum_{v bound in env} |c_v| * |env(v)|
inline void boundary_mass(const PFormula& f, const std::map<std::string, long>& env, long& acc) {
  if (f.kind == PFormula::f_atom) {
    acc += std::abs((long)f.t.k);
    for (const auto& [v, c] : f.t.coef) {
      auto it = env.find(v);
      if (it != env.end()) acc += std::abs((long)c) * std::abs(it->second);
    }
  }
  for (const auto& k : f.kids) boundary_mass(k, env, acc);
}

inline long level_bound(const PFormula& sentence, const BoundParams& p,
                        const std::map<std::string, long>& env, long scale) {
  long mass = 0;
  boundary_mass(sentence, env, mass);
  return scale * (mass + p.dl + p.lcm_all + 8);
}

inline bool eval_sentence(const PFormula& sentence, const PFormula& node,
                          std::map<std::string, long>& env, const BoundParams& p, long scale) {
  switch (node.kind) {
    case PFormula::f_true: return true;
    case PFormula::f_false: return false;
    case PFormula::f_atom: {
      long v = eval_lin(node.t, env);
      long d = (long)node.d;
      switch (node.akind) {
        case AtomKind::le0: return v <= 0;
        case AtomKind::eq0: return v == 0;
        case AtomKind::ne0: return v != 0;
        case AtomKind::divides: return ((v % d) + d) % d == 0;
        case AtomKind::ndivides: return ((v % d) + d) % d != 0;
      }
      return false;
    }
    case PFormula::f_and:
      for (const auto& k : node.kids)
        if (!eval_sentence(sentence, k, env, p, scale)) return false;
      return true;
    case PFormula::f_or:
      for (const auto& k : node.kids)
        if (eval_sentence(sentence, k, env, p, scale)) return true;
      return false;
    default: {
      bool exists = node.kind == PFormula::f_exists;
      long b = level_bound(sentence, p, env, scale);
      for (long v = -b; v <= b; ++v) {
        env[node.var] = v;
        bool r = eval_sentence(sentence, node.kids[0], env, p, scale);
        if (exists && r) { env.erase(node.var); return true; }
        if (!exists && !r) { env.erase(node.var); return false; }
      }
      env.erase(node.var);
      return !exists;
    }
  }
}

// worst-case number of matrix evaluations for the nested search
inline double search_volume(const PFormula& sentence, const BoundParams& p, int quantifiers,
                            long scale) {
  std::map<std::string, long> env;
  double volume = 1;
  const PFormula* node = &sentence;
  for (int i = 0; i < quantifiers; ++i) {
    if (node->kind != PFormula::f_exists && node->kind != PFormula::f_forall) break;
    long b = level_bound(sentence, p, env, scale);
    volume *= 2.0 * b + 1;
    env[node->var] = b;  // worst case for the next level
    node = &node->kids[0];
  }
  return volume;
}

struct OracleVerdict {
  bool usable = false;  // false: volume too large or bound-unstable
  bool truth = false;
};

inline OracleVerdict decide(const PFormula& sentence, int quantifiers) {
  OracleVerdict out;
  BoundParams p = bound_params(sentence);
  if (search_volume(sentence, p, quantifiers, 1) > 2500000.0) return out;
  if (search_volume(sentence, p, quantifiers, 2) > 40000000.0) return out;
  std::map<std::string, long> env;
  bool narrow = eval_sentence(sentence, sentence, env, p, 1);
  std::map<std::string, long> env2;
  bool wide = eval_sentence(sentence, sentence, env2, p, 2);
  if (narrow != wide) return out;  // bound-unstable: not a usable oracle point
  out.usable = true;
  out.truth = narrow;
  return out;
}

// random sentence generator; deeper prefixes draw tighter coefficients so the
// cascading search stays affordable
inline PFormula random_sentence(gen::Rng& rng, int quantifiers) {
  std::vector<std::string> vars;
  for (int i = 0; i < quantifiers; ++i) vars.push_back("x" + std::to_string(i));
  long crange = quantifiers == 1 ? 5 : quantifiers == 2 ? 3 : 2;
  long krange = quantifiers == 3 ? 4 : 8;
  long dmax = quantifiers == 3 ? 3 : 5;
  int natoms = 2 + (int)(rng() % (quantifiers == 3 ? 2 : 3));
  std::vector<PFormula> atoms;
  for (int a = 0; a < natoms; ++a) {
    LinTerm t;
    bool nonzero = false;
    for (const auto& v : vars) {
      long c = (long)(rng() % (2 * crange + 1)) - crange;
      if (c != 0 && (rng() % 3 != 0)) {
        t.coef[v] = c;
        nonzero = true;
      }
    }
    if (!nonzero) t.coef[vars[rng() % vars.size()]] = 1 + (long)(rng() % crange);
    t.k = (long)(rng() % (2 * krange + 1)) - krange;
    switch (rng() % 6) {
      case 0: atoms.push_back(PFormula::atom(AtomKind::eq0, t)); break;
      case 1: atoms.push_back(PFormula::atom(AtomKind::ne0, t)); break;
      case 2: atoms.push_back(PFormula::atom(AtomKind::divides, t, 2 + (long)(rng() % (dmax - 1)))); break;
      case 3: atoms.push_back(PFormula::atom(AtomKind::ndivides, t, 2 + (long)(rng() % (dmax - 1)))); break;
      default: atoms.push_back(PFormula::atom(AtomKind::le0, t)); break;
    }
  }
  std::function<PFormula(size_t, size_t)> tree = [&](size_t lo, size_t hi) -> PFormula {
    if (hi - lo == 1) return atoms[lo];
    size_t mid = lo + 1 + rng() % (hi - lo - 1);
    std::vector<PFormula> kids;
    kids.push_back(tree(lo, mid));
    kids.push_back(tree(mid, hi));
    return rng() % 2 ? PFormula::conj(std::move(kids)) : PFormula::disj(std::move(kids));
  };
  PFormula body = tree(0, atoms.size());
  for (int i = quantifiers; i-- > 0;)
    body = PFormula::quant(rng() % 2 ? PFormula::f_exists : PFormula::f_forall, vars[i],
                           std::move(body));
  return body;
}

}  // namespace pb_oracle

#endif
