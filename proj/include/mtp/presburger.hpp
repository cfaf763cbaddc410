// mtp :: Presburger decision procedure (Cooper's algorithm)
//
// Validity over the integers by negation-satisfiability: the obligation is
// translated into linear integer arithmetic with conservative injection of
// foreign terms, universally closed, negated, quantifier-eliminated and
// ground-evaluated.
//
// Conservative translation discipline (documented fragment boundary):
//   - untranslatable subformulas become TRUE in hypothesis positions
//     (omission) and FALSE in goal positions; goal-side replacements can
//     only downgrade the verdict to not-applicable, never flip it to valid;
//   - nonlinear products, real literals, \div und % with non-literal
//     divisors poison their atom rather than being injected;
//   - x \in Nat reads as x >= 0, x \in Int as TRUE.
#ifndef MTP_PRESBURGER_HPP
#define MTP_PRESBURGER_HPP

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtp/obligation.hpp"
#include "mtp/printer.hpp"

namespace mtp {

enum class PVerdict : unsigned char { valid, invalid, not_applicable, resource_failure };

inline const char* to_string(PVerdict v) {
  switch (v) {
    case PVerdict::valid: return "valid";
    case PVerdict::invalid: return "invalid";
    case PVerdict::not_applicable: return "not-applicable";
    default: return "resource-failure";
  }
}

namespace presburger {

struct ResourceCap {};

// linear term: sum of coef * var + constant; vars are canonical prints of
// the injected foreign terms
struct LinTerm {
  std::map<std::string, Int> coef;
  Int k;

  void add(const LinTerm& o, const Int& scale = 1) {
    for (const auto& [v, c] : o.coef) {
      Int& slot = coef[v];
      slot += c * scale;
      if (slot == 0) coef.erase(v);
    }
    k += o.k * scale;
  }
  void scale(const Int& s) {
    if (s == 0) {
      coef.clear();
      k = 0;
      return;
    }
    for (auto& [v, c] : coef) c *= s;
    k *= s;
  }
  bool ground() const { return coef.empty(); }
  Int coef_of(const std::string& v) const {
    auto it = coef.find(v);
    return it == coef.end() ? Int(0) : it->second;
  }
};

enum class AtomKind : unsigned char { le0 /*t<=0*/, eq0, ne0, divides, ndivides };

struct PFormula {
  enum Kind : unsigned char { f_true, f_false, f_atom, f_and, f_or, f_exists, f_forall } kind;
  // atom
  AtomKind akind = AtomKind::le0;
  LinTerm t;
  Int d;  // divisibility modulus
  // connectives / quantifier
  std::vector<PFormula> kids;
  std::string var;

  static PFormula mk(Kind k) {
    PFormula f;
    f.kind = k;
    return f;
  }
  static PFormula tru() { return mk(f_true); }
  static PFormula fls() { return mk(f_false); }
  static PFormula atom(AtomKind a, LinTerm term, Int dd = 1) {
    PFormula f = mk(f_atom);
    f.akind = a;
    f.t = std::move(term);
    f.d = std::move(dd);
    return f;
  }
  static PFormula conj(std::vector<PFormula> ks) {
    std::vector<PFormula> out;
    for (auto& k : ks) {
      if (k.kind == f_false) return fls();
      if (k.kind == f_true) continue;
      if (k.kind == f_and) {
        for (auto& g : k.kids) out.push_back(std::move(g));
      } else {
        out.push_back(std::move(k));
      }
    }
    if (out.empty()) return tru();
    if (out.size() == 1) return out[0];
    PFormula f = mk(f_and);
    f.kids = std::move(out);
    return f;
  }
  static PFormula disj(std::vector<PFormula> ks) {
    std::vector<PFormula> out;
    for (auto& k : ks) {
      if (k.kind == f_true) return tru();
      if (k.kind == f_false) continue;
      if (k.kind == f_or) {
        for (auto& g : k.kids) out.push_back(std::move(g));
      } else {
        out.push_back(std::move(k));
      }
    }
    if (out.empty()) return fls();
    if (out.size() == 1) return out[0];
    PFormula f = mk(f_or);
    f.kids = std::move(out);
    return f;
  }
  static PFormula quant(Kind k, std::string v, PFormula body) {
    if (body.kind == f_true || body.kind == f_false) return body;
    PFormula f = mk(k);
    f.var = std::move(v);
    f.kids.push_back(std::move(body));
    return f;
  }
};

// simplify ground atoms immediately
inline PFormula simp_atom(AtomKind a, LinTerm t, Int d = 1) {
  if (t.ground()) {
    switch (a) {
      case AtomKind::le0: return t.k <= 0 ? PFormula::tru() : PFormula::fls();
      case AtomKind::eq0: return t.k == 0 ? PFormula::tru() : PFormula::fls();
      case AtomKind::ne0: return t.k != 0 ? PFormula::tru() : PFormula::fls();
      case AtomKind::divides: return t.k % d == 0 ? PFormula::tru() : PFormula::fls();
      case AtomKind::ndivides: return t.k % d != 0 ? PFormula::tru() : PFormula::fls();
    }
  }
  // normalize by the gcd of the coefficients
  Int g = 0;
  for (const auto& [v, c] : t.coef) g = gcd_int(g, c);
  if (g > 1) {
    switch (a) {
      case AtomKind::le0: {
        // g*s + k <= 0  <=>  s <= floor(-k/g)  <=>  s - floor(-k/g) <= 0
        Int fl = floor_div(-t.k, g);
        for (auto& [v, c] : t.coef) c /= g;
        t.k = -fl;
        break;
      }
      case AtomKind::eq0:
        if (t.k % g != 0) return PFormula::fls();
        for (auto& [v, c] : t.coef) c /= g;
        t.k /= g;
        break;
      case AtomKind::ne0:
        if (t.k % g != 0) return PFormula::tru();
        for (auto& [v, c] : t.coef) c /= g;
        t.k /= g;
        break;
      case AtomKind::divides:
      case AtomKind::ndivides: {
        Int gg = gcd_int(g, d);
        if (gg > 1 && t.k % gg == 0) {
          for (auto& [v, c] : t.coef) c /= gg;
          t.k /= gg;
          d /= gg;
        }
        break;
      }
    }
  }
  if (a == AtomKind::divides && d == 1) return PFormula::tru();
  if (a == AtomKind::ndivides && d == 1) return PFormula::fls();
  return PFormula::atom(a, std::move(t), std::move(d));
}

inline PFormula pneg(const PFormula& f) {
  switch (f.kind) {
    case PFormula::f_true: return PFormula::fls();
    case PFormula::f_false: return PFormula::tru();
    case PFormula::f_atom: {
      LinTerm t = f.t;
      switch (f.akind) {
        case AtomKind::le0: {
          // ~(t<=0)  <=>  t>=1  <=>  -t+1<=0
          t.scale(-1);
          t.k += 1;
          return simp_atom(AtomKind::le0, std::move(t));
        }
        case AtomKind::eq0: return simp_atom(AtomKind::ne0, std::move(t));
        case AtomKind::ne0: return simp_atom(AtomKind::eq0, std::move(t));
        case AtomKind::divides: return simp_atom(AtomKind::ndivides, std::move(t), f.d);
        case AtomKind::ndivides: return simp_atom(AtomKind::divides, std::move(t), f.d);
      }
      return PFormula::fls();
    }
    case PFormula::f_and: {
      std::vector<PFormula> ks;
      for (const auto& k : f.kids) ks.push_back(pneg(k));
      return PFormula::disj(std::move(ks));
    }
    case PFormula::f_or: {
      std::vector<PFormula> ks;
      for (const auto& k : f.kids) ks.push_back(pneg(k));
      return PFormula::conj(std::move(ks));
    }
    case PFormula::f_exists:
      return PFormula::quant(PFormula::f_forall, f.var, pneg(f.kids[0]));
    case PFormula::f_forall:
      return PFormula::quant(PFormula::f_exists, f.var, pneg(f.kids[0]));
  }
  return PFormula::fls();
}

inline void free_vars(const PFormula& f, std::set<std::string>& out) {
  if (f.kind == PFormula::f_atom) {
    for (const auto& [v, c] : f.t.coef) out.insert(v);
    return;
  }
  for (const auto& k : f.kids) free_vars(k, out);
  if (f.kind == PFormula::f_exists || f.kind == PFormula::f_forall) out.erase(f.var);
}

inline size_t formula_size(const PFormula& f) {
  size_t n = 1;
  for (const auto& k : f.kids) n += formula_size(k);
  return n;
}

// substitute var := term (term over other variables)
inline PFormula substitute(const PFormula& f, const std::string& var, const LinTerm& repl) {
  switch (f.kind) {
    case PFormula::f_atom: {
      Int c = f.t.coef_of(var);
      if (c == 0) return f;
      LinTerm t = f.t;
      t.coef.erase(var);
      t.add(repl, c);
      return simp_atom(f.akind, std::move(t), f.d);
    }
    case PFormula::f_and:
    case PFormula::f_or: {
      std::vector<PFormula> ks;
      for (const auto& k : f.kids) ks.push_back(substitute(k, var, repl));
      return f.kind == PFormula::f_and ? PFormula::conj(std::move(ks))
                                       : PFormula::disj(std::move(ks));
    }
    case PFormula::f_exists:
    case PFormula::f_forall: {
      if (f.var == var) return f;
      return PFormula::quant(f.kind, f.var, substitute(f.kids[0], var, repl));
    }
    default:
      return f;
  }
}

struct CooperConfig {
  Int coefficient_bound = 1000000;  // resource cap on delta/lcm growth
  size_t size_bound = 400000;       // cap on formula nodes during elimination
};

// multiply every atom containing x so x's coefficient is ±delta, then treat
// delta*x as a fresh unit variable (adds delta | x)
inline PFormula unitize(const PFormula& f, const std::string& x, const Int& delta) {
  switch (f.kind) {
    case PFormula::f_atom: {
      Int c = f.t.coef_of(x);
      if (c == 0) return f;
      Int m = delta / abs_int(c);
      LinTerm t = f.t;
      Int d = f.d;
      t.scale(m);
      d *= m;
      // now coefficient of x is ±delta; rename to unit
      Int sign = c > 0 ? 1 : -1;
      t.coef.erase(x);
      t.coef[x] = sign;
      if (f.akind == AtomKind::le0 || f.akind == AtomKind::eq0 || f.akind == AtomKind::ne0)
        return PFormula::atom(f.akind, std::move(t));
      return PFormula::atom(f.akind, std::move(t), std::move(d));
    }
    case PFormula::f_and:
    case PFormula::f_or: {
      std::vector<PFormula> ks;
      for (const auto& k : f.kids) ks.push_back(unitize(k, x, delta));
      return f.kind == PFormula::f_and ? PFormula::conj(std::move(ks))
                                       : PFormula::disj(std::move(ks));
    }
    default:
      return f;
  }
}

// minus-infinity limit: drop x-bounded atoms
inline PFormula minus_inf(const PFormula& f, const std::string& x) {
  switch (f.kind) {
    case PFormula::f_atom: {
      Int c = f.t.coef_of(x);
      if (c == 0) return f;
      switch (f.akind) {
        case AtomKind::le0: return c > 0 ? PFormula::tru() : PFormula::fls();
        case AtomKind::eq0: return PFormula::fls();
        case AtomKind::ne0: return PFormula::tru();
        default: return f;  // divisibility: periodic, keep
      }
    }
    case PFormula::f_and:
    case PFormula::f_or: {
      std::vector<PFormula> ks;
      for (const auto& k : f.kids) ks.push_back(minus_inf(k, x));
      return f.kind == PFormula::f_and ? PFormula::conj(std::move(ks))
                                       : PFormula::disj(std::move(ks));
    }
    default:
      return f;
  }
}

inline void collect_x_atoms(const PFormula& f, const std::string& x, std::vector<const PFormula*>& out) {
  if (f.kind == PFormula::f_atom) {
    if (f.t.coef_of(x) != 0) out.push_back(&f);
    return;
  }
  for (const auto& k : f.kids) collect_x_atoms(k, x, out);
}

// Eliminates one existential quantifier over a quantifier-free body.
inline PFormula cooper_step(const std::string& x, const PFormula& body, const CooperConfig& cfg) {
  std::vector<const PFormula*> atoms;
  collect_x_atoms(body, x, atoms);
  if (atoms.empty()) return body;

  Int delta = 1;
  for (const auto* a : atoms) delta = lcm_int(delta, a->t.coef_of(x));
  if (delta > cfg.coefficient_bound) throw ResourceCap{};

  PFormula unit = unitize(body, x, delta);
  // delta | x constraint for the unit variable
  LinTerm xt;
  xt.coef[x] = 1;
  PFormula divx = PFormula::atom(AtomKind::divides, xt, delta);
  PFormula g = PFormula::conj({std::move(unit), std::move(divx)});

  // period: lcm of divisibility moduli on x
  Int period = delta;
  std::vector<const PFormula*> unit_atoms;
  collect_x_atoms(g, x, unit_atoms);
  std::vector<LinTerm> boundary;  // candidate base terms b; witnesses are b + j
  for (const auto* a : unit_atoms) {
    if (a->akind == AtomKind::divides || a->akind == AtomKind::ndivides)
      period = lcm_int(period, a->d);
    else {
      // sign*x + s ◊ 0: boundary points near -sign*s
      LinTerm base = a->t;
      Int sign = base.coef_of(x);
      base.coef.erase(x);
      base.scale(-sign);
      LinTerm b1 = base;
      b1.k -= 1;
      boundary.push_back(std::move(b1));
      boundary.push_back(std::move(base));
    }
  }
  if (period > cfg.coefficient_bound) throw ResourceCap{};

  std::vector<PFormula> disjuncts;
  PFormula finf = minus_inf(g, x);
  size_t acc = 0;
  auto push = [&](PFormula d) {
    acc += formula_size(d);
    if (acc > cfg.size_bound) throw ResourceCap{};
    disjuncts.push_back(std::move(d));
  };
  for (Int j = 1; j <= period; ++j) {
    LinTerm jt;
    jt.k = j;
    push(substitute(finf, x, jt));
  }
  for (const auto& b : boundary) {
    for (Int j = 1; j <= period; ++j) {
      LinTerm repl = b;
      repl.k += j;
      push(substitute(g, x, repl));
    }
  }
  return PFormula::disj(std::move(disjuncts));
}

// Full quantifier elimination: equivalent quantifier-free formula.
inline PFormula eliminate(const PFormula& f, const CooperConfig& cfg) {
  switch (f.kind) {
    case PFormula::f_exists: {
      PFormula inner = eliminate(f.kids[0], cfg);
      return cooper_step(f.var, inner, cfg);
    }
    case PFormula::f_forall: {
      PFormula inner = eliminate(pneg(f.kids[0]), cfg);
      return pneg(cooper_step(f.var, inner, cfg));
    }
    case PFormula::f_and:
    case PFormula::f_or: {
      std::vector<PFormula> ks;
      for (const auto& k : f.kids) ks.push_back(eliminate(k, cfg));
      return f.kind == PFormula::f_and ? PFormula::conj(std::move(ks))
                                       : PFormula::disj(std::move(ks));
    }
    default:
      return f;
  }
}

inline bool eval_ground(const PFormula& f) {
  switch (f.kind) {
    case PFormula::f_true: return true;
    case PFormula::f_false: return false;
    case PFormula::f_atom:
      switch (f.akind) {
        case AtomKind::le0: return f.t.k <= 0;
        case AtomKind::eq0: return f.t.k == 0;
        case AtomKind::ne0: return f.t.k != 0;
        case AtomKind::divides: return f.t.k % f.d == 0;
        case AtomKind::ndivides: return f.t.k % f.d != 0;
      }
      return false;
    case PFormula::f_and:
      for (const auto& k : f.kids)
        if (!eval_ground(k)) return false;
      return true;
    case PFormula::f_or:
      for (const auto& k : f.kids)
        if (eval_ground(k)) return true;
      return false;
    default:
      return false;  // quantifier left: caller bug
  }
}

inline std::string render(const PFormula& f) {
  std::ostringstream os;
  struct W {
    std::ostringstream& os;
    void run(const PFormula& f) {
      switch (f.kind) {
        case PFormula::f_true: os << "true"; return;
        case PFormula::f_false: os << "false"; return;
        case PFormula::f_atom: {
          if (f.akind == AtomKind::divides || f.akind == AtomKind::ndivides)
            os << (f.akind == AtomKind::divides ? "(div " : "(ndiv ") << f.d.str() << ' ';
          else
            os << (f.akind == AtomKind::le0 ? "(<=0 " : f.akind == AtomKind::eq0 ? "(=0 " : "(!=0 ");
          bool first = true;
          for (const auto& [v, c] : f.t.coef) {
            if (!first) os << " + ";
            first = false;
            os << c.str() << "*[" << v << ']';
          }
          if (!first) os << " + ";
          os << f.t.k.str() << ')';
          return;
        }
        case PFormula::f_and:
        case PFormula::f_or:
          os << (f.kind == PFormula::f_and ? "(and" : "(or");
          for (const auto& k : f.kids) {
            os << ' ';
            run(k);
          }
          os << ')';
          return;
        case PFormula::f_exists:
        case PFormula::f_forall:
          os << (f.kind == PFormula::f_exists ? "(exists [" : "(forall [") << f.var << "] ";
          run(f.kids[0]);
          os << ')';
          return;
      }
    }
  } w{os};
  w.run(f);
  return os.str();
}

// ---------------------------------------------------------------------------
// translation from Expr

struct Translation {
  PFormula formula = PFormula::tru();
  std::map<std::string, std::string> injections;  // canonical print -> variable
  bool goal_weakened = false;   // an untranslatable piece was replaced in goal position
  std::vector<std::string> omitted;  // hypothesis-side replacements, for reports
};

class Translator {
 public:
  Translation result;
  int aux_counter = 0;

  // polarity: true = goal side (replacement by FALSE weakens the claim)
  PFormula tr(const ExprPtr& e, bool pos) {
    switch (e->kind) {
      case ExprKind::bool_lit: return e->bval ? PFormula::tru() : PFormula::fls();
      case ExprKind::and_:
        return PFormula::conj({tr(e->kids[0], pos), tr(e->kids[1], pos)});
      case ExprKind::or_:
        return PFormula::disj({tr(e->kids[0], pos), tr(e->kids[1], pos)});
      case ExprKind::not_: return pneg(tr(e->kids[0], !pos));
      case ExprKind::implies:
        return PFormula::disj({pneg(tr(e->kids[0], !pos)), tr(e->kids[1], pos)});
      case ExprKind::if_: {
        PFormula c_neg = tr(e->kids[0], !pos);
        PFormula c_pos = tr(e->kids[0], pos);
        PFormula a = tr(e->kids[1], pos), b = tr(e->kids[2], pos);
        return PFormula::conj({PFormula::disj({pneg(c_neg), std::move(a)}),
                               PFormula::disj({std::move(c_pos), std::move(b)})});
      }
      case ExprKind::eq:
      case ExprKind::le:
      case ExprKind::lt:
        return atom(e, pos);
      case ExprKind::in_set: {
        if (e->kids[1]->kind == ExprKind::ident) {
          if (e->kids[1]->name == "Int") return PFormula::tru();
          if (e->kids[1]->name == "Nat") {
            // t >= 0, i.e. -t <= 0
            std::vector<PFormula> aux;
            if (auto t = linearize(e->kids[0], aux)) {
              t->scale(-1);
              return with_aux(simp_atom(AtomKind::le0, std::move(*t)), std::move(aux));
            }
          }
        }
        return replaced(e, pos);
      }
      case ExprKind::forall:
      case ExprKind::exists: {
        bool is_forall = e->kind == ExprKind::forall;
        PFormula::Kind q = is_forall ? PFormula::f_forall : PFormula::f_exists;
        std::string var = "bound:" + e->name + ":" + std::to_string(aux_counter++);
        // integer quantification is exact under a Nat/Int bound, a sound
        // weakening for hypothesis-side unbounded \A and goal-side \E
        ExprPtr bound = e->binder_bounded() ? e->binder_bound() : nullptr;
        bool nat = bound && bound->kind == ExprKind::ident && bound->name == "Nat";
        bool intb = bound && bound->kind == ExprKind::ident && bound->name == "Int";
        if (bound && !nat && !intb) return replaced(e, pos);
        if (!bound && is_forall == pos) return replaced(e, pos);
        ExprPtr marker = mk_ident("$q" + std::to_string(aux_counter), IdentKind::opaque);
        std::map<std::string, ExprPtr> sub{{e->name, marker}};
        ExprPtr body = detail::substitute(e->binder_body(), sub);
        quant_vars_.emplace_back(print_expr(marker), var);
        PFormula pbody = tr(body, pos);
        quant_vars_.pop_back();
        if (nat) {
          LinTerm t;
          t.coef[var] = -1;  // var >= 0
          PFormula guard = PFormula::atom(AtomKind::le0, std::move(t));
          pbody = is_forall ? PFormula::disj({pneg(guard), std::move(pbody)})
                            : PFormula::conj({std::move(guard), std::move(pbody)});
        }
        return PFormula::quant(q, var, std::move(pbody));
      }
      default:
        return replaced(e, pos);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> quant_vars_;  // marker print -> var

  PFormula replaced(const ExprPtr& e, bool pos) {
    aux_vars_.clear();
    if (pos) {
      result.goal_weakened = true;
      return PFormula::fls();
    }
    result.omitted.push_back(print_expr(e));
    return PFormula::tru();
  }

  PFormula with_aux(PFormula f, std::vector<PFormula> aux) {
    // aux constraints define fresh variables uniquely, so existential
    // wrapping is exact in either polarity
    if (aux.empty()) return f;
    aux.push_back(std::move(f));
    PFormula body = PFormula::conj(std::move(aux));
    for (size_t i = aux_vars_.size(); i-- > 0;) body = PFormula::quant(PFormula::f_exists, aux_vars_[i], std::move(body));
    aux_vars_.clear();
    return body;
  }

  std::vector<std::string> aux_vars_;

  bool mentions_marker(const ExprPtr& e) const {
    if (e->kind == ExprKind::ident) {
      for (const auto& [mk, var] : quant_vars_)
        if (mk == e->name) return true;
      return false;
    }
    for (const auto& k : e->kids)
      if (mentions_marker(k)) return true;
    return false;
  }

  PFormula atom(const ExprPtr& e, bool pos) {
    std::vector<PFormula> aux;
    auto l = linearize(e->kids[0], aux);
    auto r = linearize(e->kids[1], aux);
    if (!l || !r) {
      aux_vars_.clear();
      return replaced(e, pos);
    }
    LinTerm t = *l;
    t.add(*r, -1);
    AtomKind k = e->kind == ExprKind::eq   ? AtomKind::eq0
                 : e->kind == ExprKind::le ? AtomKind::le0
                                           : AtomKind::le0;
    if (e->kind == ExprKind::lt) t.k += 1;  // a < b  <=>  a - b + 1 <= 0
    return with_aux(simp_atom(k, std::move(t)), std::move(aux));
  }

  // returns the linear form of an integer term, or nullopt when the term is
  // arithmetic-shaped but outside the fragment (nonlinear, real, bad divisor)
  std::optional<LinTerm> linearize(const ExprPtr& e, std::vector<PFormula>& aux) {
    switch (e->kind) {
      case ExprKind::int_lit: {
        LinTerm t;
        t.k = e->num;
        return t;
      }
      case ExprKind::real_lit: return std::nullopt;
      case ExprKind::add:
      case ExprKind::sub: {
        auto a = linearize(e->kids[0], aux), b = linearize(e->kids[1], aux);
        if (!a || !b) return std::nullopt;
        a->add(*b, e->kind == ExprKind::add ? 1 : -1);
        return a;
      }
      case ExprKind::mul: {
        auto a = linearize(e->kids[0], aux), b = linearize(e->kids[1], aux);
        if (!a || !b) return std::nullopt;
        if (a->ground()) {
          b->scale(a->k);
          return b;
        }
        if (b->ground()) {
          a->scale(b->k);
          return a;
        }
        return std::nullopt;  // nonlinear
      }
      case ExprKind::div_:
      case ExprKind::mod_: {
        if (e->kids[1]->kind != ExprKind::int_lit || e->kids[1]->num <= 0) return std::nullopt;
        auto a = linearize(e->kids[0], aux);
        if (!a) return std::nullopt;
        Int k = e->kids[1]->num;
        // fresh q, r with a = k*q + r and 0 <= r < k
        std::string q = "aux:q" + std::to_string(aux_counter);
        std::string r = "aux:r" + std::to_string(aux_counter);
        aux_counter++;
        aux_vars_.push_back(q);
        aux_vars_.push_back(r);
        LinTerm def = *a;  // a - k*q - r = 0
        def.coef[q] -= k;
        def.coef[r] -= 1;
        aux.push_back(PFormula::atom(AtomKind::eq0, std::move(def)));
        LinTerm rneg;  // -r <= 0
        rneg.coef[r] = -1;
        aux.push_back(PFormula::atom(AtomKind::le0, std::move(rneg)));
        LinTerm rup;  // r - k + 1 <= 0
        rup.coef[r] = 1;
        rup.k = 1 - k;
        aux.push_back(PFormula::atom(AtomKind::le0, std::move(rup)));
        LinTerm out;
        out.coef[e->kind == ExprKind::div_ ? q : r] = 1;
        return out;
      }
      case ExprKind::ident:
      case ExprKind::op_app:
      case ExprKind::fcn_app:
      case ExprKind::choose:
      case ExprKind::prime: {
        std::string key = print_expr(e);
        for (auto it = quant_vars_.rbegin(); it != quant_vars_.rend(); ++it) {
          if (it->first == key) {
            LinTerm t;
            t.coef[it->second] = 1;
            return t;
          }
        }
        // a compound foreign term mentioning a quantified variable cannot be
        // injected: its value varies under the quantifier
        if (mentions_marker(e)) return std::nullopt;
        auto [it, fresh] = result.injections.emplace(key, "inj:" + key);
        (void)fresh;
        LinTerm t;
        t.coef[it->second] = 1;
        return t;
      }
      default:
        // set constructors, tuples and non-integer literals have no integer
        // reading; the atom is outside the fragment
        return std::nullopt;
    }
  }
};

}  // namespace presburger

// Extracts the maximal linear-integer skeleton of a formula. Foreign terms
// are injected as fresh integer variables; the Translation records goal-side
// weakening (which blocks `valid` claims being read as `invalid`).
inline presburger::Translation presburger_inject(const ExprPtr& e) {
  presburger::Translator tr;
  tr.result.formula = tr.tr(e, /*pos=*/true);
  return std::move(tr.result);
}

// Quantifier elimination entry point (tests and the debug dump use it).
inline presburger::PFormula cooper_eliminate(const presburger::PFormula& f,
                                             const presburger::CooperConfig& cfg = {}) {
  return presburger::eliminate(f, cfg);
}

struct PresburgerOutcome {
  PVerdict verdict;
  std::vector<std::string> omitted_hypotheses;
  std::string eliminated;  // render of the eliminated negation, for the debug dump
};

// Decides an obligation over the integers: valid iff the universal closure of
// the injected formula holds. Deterministic; resource blow-up is reported,
// never mis-answered.
inline PresburgerOutcome presburger_decide(const Obligation& ob,
                                           const presburger::CooperConfig& cfg = {}) {
  using namespace presburger;
  PresburgerOutcome out{PVerdict::not_applicable, {}, ""};
  ExprPtr f = ob.goal;
  for (auto it = ob.hypotheses.rbegin(); it != ob.hypotheses.rend(); ++it)
    f = mk_implies(it->second, f);
  Translation t = presburger_inject(f);
  out.omitted_hypotheses = t.omitted;
  // validity via negation-satisfiability over the universal closure
  PFormula negated = pneg(t.formula);
  std::set<std::string> vars;
  free_vars(negated, vars);
  for (const auto& v : vars) negated = PFormula::quant(PFormula::f_exists, v, negated);
  try {
    PFormula elim = eliminate(negated, cfg);
    out.eliminated = render(elim);
    bool counterexample = eval_ground(elim);
    if (!counterexample) {
      out.verdict = PVerdict::valid;
    } else {
      out.verdict = t.goal_weakened ? PVerdict::not_applicable : PVerdict::invalid;
    }
  } catch (const ResourceCap&) {
    out.verdict = PVerdict::resource_failure;
  }
  return out;
}

}  // namespace mtp

#endif
