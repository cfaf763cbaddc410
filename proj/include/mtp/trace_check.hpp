// mtp :: trusted trace-checking kernel
//
// Independently re-validates a ProofTrace against its obligation. The kernel
// re-derives every rule's conclusions from the principal formula and the
// recorded side data, and compares them structurally; it never trusts the
// prover. Beyond the language core (ast/parser/printer) and the lemma base it
// shares no formula-manipulation code with the tableau backend: substitution,
// replacement and arithmetic evaluation are reimplemented here.
#ifndef MTP_TRACE_CHECK_HPP
#define MTP_TRACE_CHECK_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mtp/ast.hpp"
#include "mtp/lemmas.hpp"
#include "mtp/printer.hpp"
#include "mtp/trace.hpp"

namespace mtp {

struct CheckResult {
  bool accepted = false;
  std::string reason;    // reject reason, empty on accept
  std::string position;  // path of trace-node indices, e.g. "0.2.1"
};

namespace kernel {

// ---- kernel-local expression utilities ----

inline void names_of(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == ExprKind::ident) out.insert(e->name);
  for (const auto& k : e->kids) names_of(k, out);
}

// free identifier names, shadow-aware; part of the substitution contract
// shared (as an algorithm, not as code) with the rest of the system
inline void free_names(const ExprPtr& e, std::set<std::string>& shadow,
                       std::set<std::string>& out) {
  if (e->kind == ExprKind::ident) {
    if (!shadow.count(e->name)) out.insert(e->name);
    return;
  }
  if (e->is_binder()) {
    if (e->binder_bounded()) free_names(e->binder_bound(), shadow, out);
    bool added = shadow.insert(e->name).second;
    free_names(e->binder_body(), shadow, out);
    if (added) shadow.erase(e->name);
    return;
  }
  for (const auto& k : e->kids) free_names(k, shadow, out);
}

inline std::set<std::string> free_names(const ExprPtr& e) {
  std::set<std::string> shadow, out;
  free_names(e, shadow, out);
  return out;
}

inline std::string fresh(const std::string& base, const std::set<std::string>& taken) {
  for (int i = 1;; ++i) {
    std::string c = base + "_" + std::to_string(i);
    if (!taken.count(c)) return c;
  }
}

// Capture-avoiding substitution. The renaming discipline (clash test on free
// names, fresh names var_1, var_2, ...) is normative: traces record its
// results, so it must match the prover's bit for bit.
inline ExprPtr subst(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
  if (sub.empty()) return e;
  if (e->kind == ExprKind::ident) {
    auto it = sub.find(e->name);
    return it != sub.end() ? it->second : e;
  }
  if (e->is_binder()) {
    std::map<std::string, ExprPtr> inner = sub;
    inner.erase(e->name);
    std::string var = e->name;
    ExprPtr body = e->binder_body();
    bool clash = false;
    for (const auto& [_, r] : inner)
      if (free_names(r).count(var)) clash = true;
    if (clash && !inner.empty()) {
      std::set<std::string> taken = free_names(e);
      for (const auto& [_, r] : inner)
        for (const auto& n : free_names(r)) taken.insert(n);
      std::string nv = fresh(var, taken);
      std::map<std::string, ExprPtr> ren{{var, mk_ident(nv, IdentKind::bound)}};
      body = subst(body, ren);
      var = nv;
    }
    Expr copy = *e;
    copy.name = var;
    if (e->binder_bounded()) copy.kids[0] = subst(e->kids[0], sub);
    copy.kids[copy.kids.size() - 1] = subst(body, inner);
    return mk_expr(std::move(copy));
  }
  Expr copy = *e;
  for (auto& k : copy.kids) k = subst(k, sub);
  return mk_expr(std::move(copy));
}

inline ExprPtr inst1(const std::string& var, const ExprPtr& body, const ExprPtr& term) {
  std::map<std::string, ExprPtr> m{{var, term}};
  return subst(body, m);
}

// replacement with the same binder-skip discipline the rules are defined with
inline ExprPtr replace(const ExprPtr& e, const ExprPtr& from, const ExprPtr& to,
                       const std::set<std::string>& from_names) {
  if (expr_eq(e, from)) return to;
  if (e->is_binder() && from_names.count(e->name)) {
    if (!e->binder_bounded()) return e;
    Expr copy = *e;
    copy.kids[0] = replace(copy.kids[0], from, to, from_names);
    return mk_expr(std::move(copy));
  }
  Expr copy = *e;
  for (auto& k : copy.kids) k = replace(k, from, to, from_names);
  return mk_expr(std::move(copy));
}

inline ExprPtr replace(const ExprPtr& e, const ExprPtr& from, const ExprPtr& to) {
  std::set<std::string> ns;
  names_of(from, ns);
  return replace(e, from, to, ns);
}

inline bool lit_value(const ExprPtr& e, Int& num, int& dec) {
  if (e->kind == ExprKind::int_lit) { num = e->num; dec = 0; return true; }
  if (e->kind == ExprKind::real_lit) { num = e->num; dec = e->dec_places; return true; }
  return false;
}

inline ExprPtr arith_step(const Expr& e) {
  if (e.kids.size() != 2) return nullptr;
  Int a, b;
  int ad, bd;
  if (!lit_value(e.kids[0], a, ad) || !lit_value(e.kids[1], b, bd)) return nullptr;
  if (e.kind == ExprKind::div_ || e.kind == ExprKind::mod_) {
    if (ad > 0 || bd > 0 || b <= 0) return nullptr;
    if (e.kind == ExprKind::div_) {
      Int q = a / b;
      if ((a % b) != 0 && ((a < 0) != (b < 0))) q -= 1;
      return mk_int(q);
    }
    Int q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) q -= 1;
    return mk_int(a - b * q);
  }
  int d = ad > bd ? ad : bd;
  for (int i = ad; i < d; ++i) a *= 10;
  for (int i = bd; i < d; ++i) b *= 10;
  Int r;
  switch (e.kind) {
    case ExprKind::add: r = a + b; break;
    case ExprKind::sub: r = a - b; break;
    case ExprKind::mul: r = a * b; d = ad + bd; break;
    default: return nullptr;
  }
  return d > 0 ? mk_real(r, d) : mk_int(r);
}

inline ExprPtr arith_norm(const ExprPtr& e) {
  Expr copy = *e;
  for (auto& k : copy.kids) k = arith_norm(k);
  switch (e->kind) {
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div_:
    case ExprKind::mod_:
      if (ExprPtr v = arith_step(copy)) return v;
      break;
    default:
      break;
  }
  return mk_expr(std::move(copy));
}

inline bool is_lit(const Expr& e) {
  return e.kind == ExprKind::int_lit || e.kind == ExprKind::real_lit ||
         e.kind == ExprKind::str_lit || e.kind == ExprKind::bool_lit;
}

// 1 true / 0 false / -1 undecided, same-kind ground literal atoms only
inline int ground_atom_truth(const ExprPtr& f) {
  bool neg = f->kind == ExprKind::not_;
  const Expr& a = neg ? *f->kids[0] : *f;
  if (a.kind != ExprKind::eq && a.kind != ExprKind::le && a.kind != ExprKind::lt) return -1;
  const Expr &l = *a.kids[0], &r = *a.kids[1];
  if (!is_lit(l) || !is_lit(r)) return -1;
  int truth = -1;
  if (l.kind == ExprKind::str_lit && r.kind == ExprKind::str_lit && a.kind == ExprKind::eq)
    truth = l.name == r.name;
  else if (l.kind == ExprKind::bool_lit && r.kind == ExprKind::bool_lit && a.kind == ExprKind::eq)
    truth = l.bval == r.bval;
  else if ((l.kind == ExprKind::int_lit || l.kind == ExprKind::real_lit) &&
           (r.kind == ExprKind::int_lit || r.kind == ExprKind::real_lit)) {
    Int ln = l.num, rn = r.num;
    int ld = l.kind == ExprKind::real_lit ? l.dec_places : 0;
    int rd = r.kind == ExprKind::real_lit ? r.dec_places : 0;
    int d = ld > rd ? ld : rd;
    for (int i = ld; i < d; ++i) ln *= 10;
    for (int i = rd; i < d; ++i) rn *= 10;
    truth = a.kind == ExprKind::eq ? ln == rn : a.kind == ExprKind::le ? ln <= rn : ln < rn;
  }
  if (truth < 0) return -1;
  return neg ? 1 - truth : truth;
}

inline bool formula_rooted(const Expr& e) {
  switch (e.kind) {
    case ExprKind::and_:
    case ExprKind::or_:
    case ExprKind::not_:
    case ExprKind::implies:
    case ExprKind::forall:
    case ExprKind::exists:
    case ExprKind::eq:
    case ExprKind::in_set:
    case ExprKind::le:
    case ExprKind::lt:
    case ExprKind::subseteq:
    case ExprKind::bool_lit:
      return true;
    default:
      return false;
  }
}

inline bool set_shaped(const Expr& e) {
  return e.kind == ExprKind::set_enum || e.kind == ExprKind::union_ ||
         e.kind == ExprKind::inter || e.kind == ExprKind::set_minus;
}

inline ExprPtr choice(const std::string& var, ExprPtr bound, ExprPtr body) {
  return mk_binder(ExprKind::choose, var, std::move(bound), std::move(body));
}

inline std::string witness_var(std::initializer_list<ExprPtr> scope) {
  std::set<std::string> names;
  for (const auto& e : scope) names_of(e, names);
  if (!names.count("x")) return "x";
  for (int i = 1;; ++i) {
    std::string c = "x_" + std::to_string(i);
    if (!names.count(c)) return c;
  }
}

struct Reject {
  std::string reason;
};

using Branch = std::set<std::string>;  // canonical prints

class Checker {
 public:
  CheckResult check(const std::vector<ExprPtr>& hypotheses, const ExprPtr& goal,
                    const ProofTrace& trace, const std::string& expected_fingerprint) {
    CheckResult res;
    if (!expected_fingerprint.empty() &&
        trace.obligation_fingerprint != expected_fingerprint) {
      res.reason = "fingerprint mismatch";
      return res;
    }
    if (!trace.root) {
      res.reason = "empty trace";
      return res;
    }
    Branch b;
    for (const auto& h : hypotheses) b.insert(print_expr(h));
    b.insert(print_expr(mk_not(goal)));
    path_.clear();
    try {
      walk(b, *trace.root);
    } catch (const Reject& r) {
      res.reason = r.reason;
      res.position = position();
      return res;
    }
    res.accepted = true;
    return res;
  }

 private:
  std::vector<size_t> path_;

  std::string position() const {
    std::string s;
    for (size_t i = 0; i < path_.size(); ++i) s += (i ? "." : "") + std::to_string(path_[i]);
    return s.empty() ? "root" : s;
  }

  [[noreturn]] static void reject(const std::string& why) { throw Reject{why}; }

  static void require_on_branch(const Branch& b, const ExprPtr& f, const char* what) {
    if (!b.count(print_expr(f))) reject(std::string(what) + " not on branch: " + print_expr(f));
  }

  static void require_eq(const std::vector<ExprPtr>& got, const std::vector<ExprPtr>& want) {
    if (got.size() != want.size()) reject("malformed instance: wrong conclusion count");
    for (size_t i = 0; i < got.size(); ++i)
      if (!expr_eq(got[i], want[i]))
        reject("malformed instance: expected " + print_expr(want[i]) + ", trace has " +
               print_expr(got[i]));
  }

  // iterative over single-child chains; recursive over genuine branching
  void walk(Branch b, const TraceNode& start) {
    const TraceNode* n = &start;
    for (;;) {
      if (n->rule == "close") {
        check_closure(b, *n);
        if (!n->children.empty()) reject("closure node with children");
        return;
      }
      Step st = apply(b, *n);
      if (st.branching) {
        if (n->children.size() != st.arms.size())
          reject("unclosed branch: rule yields " + std::to_string(st.arms.size()) +
                 " branch(es), trace has " + std::to_string(n->children.size()));
        for (size_t i = 0; i < st.arms.size(); ++i) {
          Branch child = b;
          child.insert(print_expr(st.arms[i]));
          path_.push_back(i);
          walk(std::move(child), *n->children[i]);
          path_.pop_back();
        }
        return;
      }
      for (const auto& d : st.arms) b.insert(print_expr(d));
      if (n->children.size() != 1) reject("unclosed branch: expected one continuation");
      path_.push_back(0);
      n = n->children[0].get();
    }
  }

  struct Step {
    bool branching = false;
    std::vector<ExprPtr> arms;  // non-branching: formulas added; branching: one per child
  };

  Step apply(const Branch& b, const TraceNode& n) {
    const std::string& r = n.rule;
    // axiom-style nodes need no principal
    if (r == "fcn-app-def") return axiom_fcn_app(n);
    if (r == "choose-def") return axiom_choose(n);
    if (r == "cite-lemma") return axiom_lemma(n);

    if (!n.principal) reject("missing principal for rule " + r);
    require_on_branch(b, n.principal, "principal");
    const Expr& e = *n.principal;

    if (r == "alpha-and") {
      if (e.kind != ExprKind::and_) reject("malformed instance: alpha-and");
      require_eq(n.derived, {e.kids[0], e.kids[1]});
      return {false, n.derived};
    }
    if (r == "alpha-not-not") {
      if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::not_)
        reject("malformed instance: alpha-not-not");
      require_eq(n.derived, {e.kids[0]->kids[0]});
      return {false, n.derived};
    }
    if (r == "alpha-not-or") {
      if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::or_)
        reject("malformed instance: alpha-not-or");
      const Expr& a = *e.kids[0];
      require_eq(n.derived, {mk_not(a.kids[0]), mk_not(a.kids[1])});
      return {false, n.derived};
    }
    if (r == "alpha-not-imp") {
      if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::implies)
        reject("malformed instance: alpha-not-imp");
      const Expr& a = *e.kids[0];
      require_eq(n.derived, {a.kids[0], mk_not(a.kids[1])});
      return {false, n.derived};
    }
    if (r == "beta-or") {
      if (e.kind != ExprKind::or_) reject("malformed instance: beta-or");
      require_eq(n.derived, {e.kids[0], e.kids[1]});
      return {true, n.derived};
    }
    if (r == "beta-imp") {
      if (e.kind != ExprKind::implies) reject("malformed instance: beta-imp");
      require_eq(n.derived, {mk_not(e.kids[0]), e.kids[1]});
      return {true, n.derived};
    }
    if (r == "beta-not-and") {
      if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::and_)
        reject("malformed instance: beta-not-and");
      const Expr& a = *e.kids[0];
      require_eq(n.derived, {mk_not(a.kids[0]), mk_not(a.kids[1])});
      return {true, n.derived};
    }
    if (r == "beta-eq-bool") {
      if (e.kind != ExprKind::eq || !formula_rooted(*e.kids[0]) || !formula_rooted(*e.kids[1]))
        reject("malformed instance: beta-eq-bool needs boolean-rooted operands");
      require_eq(n.derived, {mk_and(e.kids[0], e.kids[1]),
                             mk_and(mk_not(e.kids[0]), mk_not(e.kids[1]))});
      return {true, n.derived};
    }
    if (r == "beta-neq-bool") {
      if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::eq)
        reject("malformed instance: beta-neq-bool");
      const Expr& a = *e.kids[0];
      if (!formula_rooted(*a.kids[0]) || !formula_rooted(*a.kids[1]))
        reject("malformed instance: beta-neq-bool needs boolean-rooted operands");
      require_eq(n.derived, {mk_and(a.kids[0], mk_not(a.kids[1])),
                             mk_and(mk_not(a.kids[0]), a.kids[1])});
      return {true, n.derived};
    }
    if (r == "in-enum") {
      if (e.kind != ExprKind::in_set || e.kids[1]->kind != ExprKind::set_enum)
        reject("malformed instance: in-enum");
      std::vector<ExprPtr> want;
      for (const auto& m : e.kids[1]->kids) want.push_back(mk_eq(e.kids[0], m));
      require_eq(n.derived, want);
      return {true, n.derived};
    }
    if (r == "not-in-enum") {
      if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::in_set ||
          e.kids[0]->kids[1]->kind != ExprKind::set_enum)
        reject("malformed instance: not-in-enum");
      std::vector<ExprPtr> want;
      for (const auto& m : e.kids[0]->kids[1]->kids)
        want.push_back(mk_not(mk_eq(e.kids[0]->kids[0], m)));
      require_eq(n.derived, want);
      return {false, n.derived};
    }
    if (r == "in-union" || r == "in-inter" || r == "in-setminus" || r == "not-in-union" ||
        r == "not-in-inter" || r == "not-in-setminus")
      return set_membership(n, r);
    if (r == "delta-exists") return delta_exists(n);
    if (r == "delta-not-forall") return delta_not_forall(n);
    if (r == "delta-not-subseteq") return delta_not_subseteq(n);
    if (r == "gamma-forall" || r == "gamma-bounded-forall") return gamma_forall(n);
    if (r == "gamma-not-exists" || r == "gamma-bounded-not-exists") return gamma_not_exists(n);
    if (r == "gamma-subseteq") return gamma_subseteq(n);
    if (r == "set-ext") return set_ext(n);
    if (r == "fcn-ext") return fcn_ext(n);
    if (r == "if-split" || r == "case-split") return ite_split(n, r);
    if (r == "paramod") return paramod(b, n);
    if (r == "arith-eval") {
      require_eq(n.derived, {arith_norm(n.principal)});
      return {false, n.derived};
    }
    reject("unknown rule '" + r + "'");
  }

  Step set_membership(const TraceNode& n, const std::string& r) {
    const Expr& e = *n.principal;
    bool neg = r.rfind("not-", 0) == 0;
    const Expr& a = neg ? *e.kids[0] : e;
    if ((neg && e.kind != ExprKind::not_) || a.kind != ExprKind::in_set)
      reject("malformed instance: " + r);
    const ExprPtr& t = a.kids[0];
    const Expr& s = *a.kids[1];
    auto in = [&](const ExprPtr& set) { return mk_in(t, set); };
    if (r == "in-union" && s.kind == ExprKind::union_) {
      require_eq(n.derived, {in(s.kids[0]), in(s.kids[1])});
      return {true, n.derived};
    }
    if (r == "in-inter" && s.kind == ExprKind::inter) {
      require_eq(n.derived, {in(s.kids[0]), in(s.kids[1])});
      return {false, n.derived};
    }
    if (r == "in-setminus" && s.kind == ExprKind::set_minus) {
      require_eq(n.derived, {in(s.kids[0]), mk_not(in(s.kids[1]))});
      return {false, n.derived};
    }
    if (r == "not-in-union" && s.kind == ExprKind::union_) {
      require_eq(n.derived, {mk_not(in(s.kids[0])), mk_not(in(s.kids[1]))});
      return {false, n.derived};
    }
    if (r == "not-in-inter" && s.kind == ExprKind::inter) {
      require_eq(n.derived, {mk_not(in(s.kids[0])), mk_not(in(s.kids[1]))});
      return {true, n.derived};
    }
    if (r == "not-in-setminus" && s.kind == ExprKind::set_minus) {
      require_eq(n.derived, {mk_not(in(s.kids[0])), in(s.kids[1])});
      return {true, n.derived};
    }
    reject("malformed instance: " + r);
  }

  Step delta_exists(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::exists) reject("malformed instance: delta-exists");
    ExprPtr eps = choice(e.name, e.binder_bounded() ? e.binder_bound() : nullptr, e.binder_body());
    if (n.side.size() != 1 || !expr_eq(n.side[0], eps))
      reject("non-fresh term: choice witness differs from the canonical one");
    ExprPtr inst = inst1(e.name, e.binder_body(), eps);
    if (e.binder_bounded())
      require_eq(n.derived, {mk_in(eps, e.binder_bound()), inst});
    else
      require_eq(n.derived, {inst});
    return {false, n.derived};
  }

  Step delta_not_forall(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::forall)
      reject("malformed instance: delta-not-forall");
    const Expr& a = *e.kids[0];
    ExprPtr eps =
        choice(a.name, a.binder_bounded() ? a.binder_bound() : nullptr, mk_not(a.binder_body()));
    if (n.side.size() != 1 || !expr_eq(n.side[0], eps))
      reject("non-fresh term: choice witness differs from the canonical one");
    ExprPtr inst = mk_not(inst1(a.name, a.binder_body(), eps));
    if (a.binder_bounded())
      require_eq(n.derived, {mk_in(eps, a.binder_bound()), inst});
    else
      require_eq(n.derived, {inst});
    return {false, n.derived};
  }

  Step delta_not_subseteq(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::subseteq)
      reject("malformed instance: delta-not-subseteq");
    const Expr& a = *e.kids[0];
    std::string v = witness_var({a.kids[0], a.kids[1]});
    ExprPtr x = mk_ident(v, IdentKind::bound);
    ExprPtr eps = choice(v, nullptr, mk_and(mk_in(x, a.kids[0]), mk_not(mk_in(x, a.kids[1]))));
    if (n.side.size() != 1 || !expr_eq(n.side[0], eps))
      reject("non-fresh term: choice witness differs from the canonical one");
    require_eq(n.derived, {mk_in(eps, a.kids[0]), mk_not(mk_in(eps, a.kids[1]))});
    return {false, n.derived};
  }

  Step gamma_forall(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::forall) reject("malformed instance: gamma-forall");
    if (n.side.size() != 1) reject("malformed instance: gamma needs one instantiation term");
    ExprPtr inst = inst1(e.name, e.binder_body(), n.side[0]);
    if (e.binder_bounded())
      require_eq(n.derived, {mk_implies(mk_in(n.side[0], e.binder_bound()), inst)});
    else
      require_eq(n.derived, {inst});
    return {false, n.derived};
  }

  Step gamma_not_exists(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::exists)
      reject("malformed instance: gamma-not-exists");
    const Expr& a = *e.kids[0];
    if (n.side.size() != 1) reject("malformed instance: gamma needs one instantiation term");
    ExprPtr inst = mk_not(inst1(a.name, a.binder_body(), n.side[0]));
    if (a.binder_bounded())
      require_eq(n.derived, {mk_implies(mk_in(n.side[0], a.binder_bound()), inst)});
    else
      require_eq(n.derived, {inst});
    return {false, n.derived};
  }

  Step gamma_subseteq(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::subseteq) reject("malformed instance: gamma-subseteq");
    if (n.side.size() != 1) reject("malformed instance: gamma needs one instantiation term");
    require_eq(n.derived, {mk_implies(mk_in(n.side[0], e.kids[0]), mk_in(n.side[0], e.kids[1]))});
    return {false, n.derived};
  }

  Step set_ext(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::eq)
      reject("malformed instance: set-ext");
    const ExprPtr &l = e.kids[0]->kids[0], &r = e.kids[0]->kids[1];
    if (!set_shaped(*l) && !set_shaped(*r))
      reject("malformed instance: set-ext needs a set-shaped operand");
    std::string v = witness_var({l, r});
    ExprPtr x = mk_ident(v, IdentKind::bound);
    ExprPtr w = choice(v, nullptr, mk_not(mk_eq(mk_in(x, l), mk_in(x, r))));
    if (n.side.size() != 1 || !expr_eq(n.side[0], w))
      reject("non-fresh term: extensionality witness differs from the canonical one");
    require_eq(n.derived, {mk_and(mk_in(w, l), mk_not(mk_in(w, r))),
                           mk_and(mk_not(mk_in(w, l)), mk_in(w, r))});
    return {true, n.derived};
  }

  Step fcn_ext(const TraceNode& n) {
    const Expr& e = *n.principal;
    if (e.kind != ExprKind::not_ || e.kids[0]->kind != ExprKind::eq)
      reject("malformed instance: fcn-ext");
    const ExprPtr &l = e.kids[0]->kids[0], &r = e.kids[0]->kids[1];
    if (l->kind != ExprKind::fcn_lit || r->kind != ExprKind::fcn_lit)
      reject("malformed instance: fcn-ext needs two function literals");
    std::string v = witness_var({l, r});
    ExprPtr x = mk_ident(v, IdentKind::bound);
    ExprPtr app_ne = mk_not(mk_eq(inst1(l->name, l->binder_body(), x),
                                  inst1(r->name, r->binder_body(), x)));
    ExprPtr w = choice(v, l->binder_bound(), app_ne);
    if (n.side.size() != 1 || !expr_eq(n.side[0], w))
      reject("non-fresh term: extensionality witness differs from the canonical one");
    ExprPtr app_ne_w = mk_not(mk_eq(inst1(l->name, l->binder_body(), w),
                                    inst1(r->name, r->binder_body(), w)));
    require_eq(n.derived, {mk_not(mk_eq(l->binder_bound(), r->binder_bound())),
                           mk_and(mk_in(w, l->binder_bound()), app_ne_w)});
    return {true, n.derived};
  }

  Step ite_split(const TraceNode& n, const std::string& r) {
    if (n.side.size() != 1) reject("malformed instance: " + r + " needs the split subterm");
    const ExprPtr& ite = n.side[0];
    const ExprPtr& f = n.principal;
    if (r == "if-split") {
      if (ite->kind != ExprKind::if_) reject("malformed instance: if-split");
      require_eq(n.derived, {mk_and(ite->kids[0], replace(f, ite, ite->kids[1])),
                             mk_and(mk_not(ite->kids[0]), replace(f, ite, ite->kids[2]))});
      return {true, n.derived};
    }
    if (ite->kind != ExprKind::case_) reject("malformed instance: case-split");
    std::vector<ExprPtr> want;
    size_t pairs = ite->kids.size() / 2;
    ExprPtr all_neg;
    for (size_t i = 0; i < pairs; ++i) {
      ExprPtr guard = ite->kids[2 * i];
      want.push_back(mk_and(guard, replace(f, ite, ite->kids[2 * i + 1])));
      ExprPtr ng = mk_not(guard);
      all_neg = all_neg ? mk_and(all_neg, ng) : ng;
    }
    if (ite->has_other) {
      ExprPtr other_f = replace(f, ite, ite->kids.back());
      want.push_back(all_neg ? mk_and(all_neg, other_f) : other_f);
    } else if (all_neg) {
      ExprPtr opaque = choice("v", nullptr, mk_bool(true));
      want.push_back(mk_and(all_neg, replace(f, ite, opaque)));
    }
    require_eq(n.derived, want);
    return {true, n.derived};
  }

  Step paramod(const Branch& b, const TraceNode& n) {
    if (n.side.size() != 1 || n.side[0]->kind != ExprKind::eq)
      reject("malformed instance: paramod needs an equation");
    const ExprPtr &from = n.side[0]->kids[0], &to = n.side[0]->kids[1];
    if (!b.count(print_expr(mk_eq(from, to))) && !b.count(print_expr(mk_eq(to, from))))
      reject("paramod equation not on branch: " + print_expr(n.side[0]));
    require_eq(n.derived, {replace(n.principal, from, to)});
    return {false, n.derived};
  }

  Step axiom_fcn_app(const TraceNode& n) {
    if (n.side.size() != 1) reject("malformed instance: fcn-app-def");
    const ExprPtr& redex = n.side[0];
    if (redex->kind != ExprKind::fcn_app || redex->kids[0]->kind != ExprKind::fcn_lit)
      reject("malformed instance: fcn-app-def needs a literal application");
    const ExprPtr& lit = redex->kids[0];
    ExprPtr inst = inst1(lit->name, lit->binder_body(), redex->kids[1]);
    require_eq(n.derived,
               {mk_implies(mk_in(redex->kids[1], lit->binder_bound()), mk_eq(redex, inst))});
    return {false, n.derived};
  }

  Step axiom_choose(const TraceNode& n) {
    if (n.side.size() != 1 || n.side[0]->kind != ExprKind::choose)
      reject("malformed instance: choose-def needs a choice term");
    const ExprPtr& c = n.side[0];
    ExprPtr body = c->binder_body();
    ExprPtr want;
    if (c->binder_bounded()) {
      ExprPtr ex = mk_binder(ExprKind::exists, c->name, c->binder_bound(), body);
      want = mk_implies(ex, mk_and(mk_in(c, c->binder_bound()), inst1(c->name, body, c)));
    } else {
      ExprPtr ex = mk_binder(ExprKind::exists, c->name, nullptr, body);
      want = mk_implies(ex, inst1(c->name, body, c));
    }
    require_eq(n.derived, {want});
    return {false, n.derived};
  }

  Step axiom_lemma(const TraceNode& n) {
    const ExprPtr* f = lemma_base_lookup(n.text);
    if (!f) reject("unknown lemma '" + n.text + "'");
    require_eq(n.derived, {*f});
    return {false, n.derived};
  }

  void check_closure(const Branch& b, const TraceNode& n) {
    const std::string& kind = n.text;
    if (kind == "contradiction") {
      if (n.side.size() != 2) reject("bad closure: contradiction needs two witnesses");
      require_on_branch(b, n.side[0], "closure witness");
      require_on_branch(b, n.side[1], "closure witness");
      if (!expr_eq(n.side[1], mk_not(n.side[0])))
        reject("bad closure: witnesses are not complementary");
      return;
    }
    if (n.side.size() != 1) reject("bad closure: expected one witness");
    require_on_branch(b, n.side[0], "closure witness");
    const Expr& w = *n.side[0];
    if (kind == "false-literal") {
      bool lit_false = w.kind == ExprKind::bool_lit && !w.bval;
      bool not_true = w.kind == ExprKind::not_ && w.kids[0]->kind == ExprKind::bool_lit &&
                      w.kids[0]->bval;
      if (!lit_false && !not_true) reject("bad closure: not FALSE / ~TRUE");
      return;
    }
    if (kind == "refl-neq") {
      if (w.kind != ExprKind::not_ || w.kids[0]->kind != ExprKind::eq ||
          !expr_eq(w.kids[0]->kids[0], w.kids[0]->kids[1]))
        reject("bad closure: not a reflexivity violation");
      return;
    }
    if (kind == "ground-false") {
      if (ground_atom_truth(n.side[0]) != 0) reject("bad closure: literal atom is not false");
      return;
    }
    reject("unknown closure kind '" + kind + "'");
  }
};

}  // namespace kernel

// Re-validates a trace against a sequent. `expected_fingerprint` may be empty
// to skip the binding check (the caller then owns that concern).
inline CheckResult check_trace(const std::vector<ExprPtr>& hypotheses, const ExprPtr& goal,
                               const ProofTrace& trace, const std::string& expected_fingerprint) {
  kernel::Checker c;
  return c.check(hypotheses, goal, trace, expected_fingerprint);
}

// The fixed rule table, rendered for documentation and review. Deterministic.
inline std::vector<std::pair<std::string, std::string>> audit_rule_table() {
  return {
      {"alpha-and", "from A∧B derive A, B"},
      {"alpha-not-not", "from ¬¬A derive A"},
      {"alpha-not-or", "from ¬(A∨B) derive ¬A, ¬B"},
      {"alpha-not-imp", "from ¬(A⇒B) derive A, ¬B"},
      {"beta-or", "from A∨B branch on A | B"},
      {"beta-imp", "from A⇒B branch on ¬A | B"},
      {"beta-not-and", "from ¬(A∧B) branch on ¬A | ¬B"},
      {"beta-eq-bool", "from A=B with boolean-rooted sides branch on A∧B | ¬A∧¬B"},
      {"beta-neq-bool", "from ¬(A=B) with boolean-rooted sides branch on A∧¬B | ¬A∧B"},
      {"in-enum", "from t∈{e1..en} branch on t=e1 | .. | t=en (closes when n=0)"},
      {"not-in-enum", "from ¬(t∈{e1..en}) derive t≠e1, .., t≠en"},
      {"in-union", "from t∈A∪B branch on t∈A | t∈B"},
      {"not-in-union", "from ¬(t∈A∪B) derive ¬(t∈A), ¬(t∈B)"},
      {"in-inter", "from t∈A∩B derive t∈A, t∈B"},
      {"not-in-inter", "from ¬(t∈A∩B) branch on ¬(t∈A) | ¬(t∈B)"},
      {"in-setminus", "from t∈A\\B derive t∈A, ¬(t∈B)"},
      {"not-in-setminus", "from ¬(t∈A\\B) branch on ¬(t∈A) | t∈B"},
      {"gamma-forall", "from ∀x: P and term t derive P[x:=t]"},
      {"gamma-bounded-forall",
       "bounded-quantifier instantiation: from ∀x∈S: P and term t derive t∈S ⇒ P[x:=t]"},
      {"gamma-not-exists", "from ¬∃x: P and term t derive ¬P[x:=t]"},
      {"gamma-bounded-not-exists", "from ¬∃x∈S: P and term t derive t∈S ⇒ ¬P[x:=t]"},
      {"gamma-subseteq", "from A⊆B and term t derive t∈A ⇒ t∈B"},
      {"delta-exists", "from ∃x: P derive P[x:=ε] with ε the canonical choice CHOOSE x: P"},
      {"delta-not-forall", "from ¬∀x: P derive ¬P[x:=ε] with ε = CHOOSE x: ¬P"},
      {"delta-not-subseteq", "from ¬(A⊆B) derive ε∈A, ¬(ε∈B) with ε = CHOOSE x: x∈A ∧ ¬(x∈B)"},
      {"set-ext", "from ¬(S=T), S or T set-shaped, branch on a distinguishing member"},
      {"fcn-ext", "from ¬(f=g), both function literals, branch on domain mismatch | point mismatch"},
      {"if-split", "split a formula on the condition of an embedded IF-THEN-ELSE"},
      {"case-split", "split a formula on the guards of an embedded CASE"},
      {"fcn-app-def", "add t∈S ⇒ [x∈S|->e][t] = e[x:=t]"},
      {"choose-def", "add (∃x: P) ⇒ P[x:=εx.P] for a choice term on the branch"},
      {"paramod", "rewrite a branch formula with a branch equation s=t"},
      {"arith-eval", "evaluate ground integer/real arithmetic redexes to a fixpoint"},
      {"cite-lemma", "add a named formula from the built-in lemma base"},
      {"close/contradiction", "a formula and its negation are on the branch"},
      {"close/refl-neq", "¬(t=t) is on the branch"},
      {"close/false-literal", "FALSE or ¬TRUE is on the branch"},
      {"close/ground-false", "a ground literal comparison on the branch evaluates to false"},
  };
}

}  // namespace mtp

#endif
