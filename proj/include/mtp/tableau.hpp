// mtp :: proof-producing tableau prover
//
// Refutation style: to prove H1..Hn |- G the prover closes every branch of a
// tableau rooted at {H1..Hn, ~G}. Every rule application is recorded in a
// ProofTrace that the independent kernel (trace_check.hpp) re-derives.
//
// Equality is handled by rewriting with oriented ground equations restricted
// to branch literals; bounded quantifiers instantiate over syntactically
// available domain members plus choice terms.
#ifndef MTP_TABLEAU_HPP
#define MTP_TABLEAU_HPP

#include <chrono>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mtp/lemmas.hpp"
#include "mtp/obligation.hpp"
#include "mtp/rewrite.hpp"
#include "mtp/trace.hpp"

namespace mtp {

struct TableauBudget {
  size_t max_steps = 50000;
  double max_seconds = 5.0;
};

enum class TableauStatus : unsigned char { proved, saturated, budget_exhausted };

struct TableauResult {
  TableauStatus status = TableauStatus::saturated;
  ProofTrace trace;  // valid when proved
  size_t steps = 0;
  std::vector<std::string> open_branch;  // first saturated branch, for diagnostics

  bool proved() const { return status == TableauStatus::proved; }
  std::string failure_reason() const {
    return status == TableauStatus::saturated ? "saturated-open-branch" : "budget-exhausted";
  }
};

namespace tableau_detail {

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
  switch (e.kind) {
    case ExprKind::set_enum:
    case ExprKind::union_:
    case ExprKind::inter:
    case ExprKind::set_minus:
      return true;
    default:
      return false;
  }
}

inline bool is_literal(const Expr& e) {
  return e.kind == ExprKind::int_lit || e.kind == ExprKind::real_lit ||
         e.kind == ExprKind::str_lit || e.kind == ExprKind::bool_lit;
}

// strict total order on ground expressions used to orient equations
inline bool term_less(const ExprPtr& a, const ExprPtr& b) {
  bool la = is_literal(*a), lb = is_literal(*b);
  if (la != lb) return la;  // literals are the smallest terms
  size_t sa = expr_size(a), sb = expr_size(b);
  if (sa != sb) return sa < sb;
  return print_expr(a) < print_expr(b);
}

// ---------------------------------------------------------------------------
// ground arithmetic normalization (shared SPEC with the kernel, not code:
// reduce ground literal redexes leftmost-innermost to a fixpoint)

inline bool arith_value(const ExprPtr& e, Int& num, int& dec) {
  if (e->kind == ExprKind::int_lit) {
    num = e->num;
    dec = 0;
    return true;
  }
  if (e->kind == ExprKind::real_lit) {
    num = e->num;
    dec = e->dec_places;
    return true;
  }
  return false;
}

inline ExprPtr eval_arith_redex(const Expr& e) {
  Int an, bn;
  int ad, bd;
  if (e.kids.size() != 2) return nullptr;
  if (!arith_value(e.kids[0], an, ad) || !arith_value(e.kids[1], bn, bd)) return nullptr;
  bool real = ad > 0 || bd > 0;
  if (e.kind == ExprKind::div_ || e.kind == ExprKind::mod_) {
    if (real || bn <= 0) return nullptr;  // \div and % are integer ops, positive divisor
    return mk_int(e.kind == ExprKind::div_ ? floor_div(an, bn) : floor_mod(an, bn));
  }
  // align decimal places
  int d = ad > bd ? ad : bd;
  for (int i = ad; i < d; ++i) an *= 10;
  for (int i = bd; i < d; ++i) bn *= 10;
  Int r;
  switch (e.kind) {
    case ExprKind::add: r = an + bn; break;
    case ExprKind::sub: r = an - bn; break;
    case ExprKind::mul:
      r = an * bn;
      d = ad + bd;
      break;
    default: return nullptr;
  }
  return d > 0 ? mk_real(r, d) : mk_int(r);
}

inline ExprPtr arith_normalize(const ExprPtr& e) {
  Expr copy = *e;
  bool changed = false;
  for (auto& k : copy.kids) {
    ExprPtr nk = arith_normalize(k);
    changed = changed || nk.get() != k.get();
    k = nk;
  }
  switch (e->kind) {
    case ExprKind::add:
    case ExprKind::sub:
    case ExprKind::mul:
    case ExprKind::div_:
    case ExprKind::mod_: {
      const Expr& cur = changed ? copy : *e;
      if (ExprPtr v = eval_arith_redex(cur)) return v;
      break;
    }
    default:
      break;
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

// ground atom evaluation for closure detection: returns 1 (true), 0 (false),
// -1 (not decidable syntactically). Same-kind literals only.
inline int eval_ground_atom(const ExprPtr& e) {
  bool neg = e->kind == ExprKind::not_;
  const Expr& a = neg ? *e->kids[0] : *e;
  if (a.kind != ExprKind::eq && a.kind != ExprKind::le && a.kind != ExprKind::lt) return -1;
  const Expr &l = *a.kids[0], &r = *a.kids[1];
  if (!is_literal(l) || !is_literal(r)) return -1;
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
    for (int i = ld; i < (ld > rd ? ld : rd); ++i) ln *= 10;
    for (int i = rd; i < (ld > rd ? ld : rd); ++i) rn *= 10;
    truth = a.kind == ExprKind::eq ? ln == rn : a.kind == ExprKind::le ? ln <= rn : ln < rn;
  }
  if (truth < 0) return -1;
  return neg ? 1 - truth : truth;
}

// replace every occurrence of closed subterm `from` by `to`; descent stops
// at binders that rebind a name occurring in `from`
inline void collect_names(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == ExprKind::ident) out.insert(e->name);
  for (const auto& k : e->kids) collect_names(k, out);
}

inline ExprPtr replace_all(const ExprPtr& e, const ExprPtr& from, const ExprPtr& to,
                           const std::set<std::string>& from_names) {
  if (expr_eq(e, from)) return to;
  if (e->is_binder() && from_names.count(e->name)) {
    if (!e->binder_bounded()) return e;
    Expr copy = *e;  // the bound set is outside the binder scope
    ExprPtr nb = replace_all(copy.kids[0], from, to, from_names);
    if (nb.get() == copy.kids[0].get()) return e;
    copy.kids[0] = nb;
    return mk_expr(std::move(copy));
  }
  Expr copy = *e;
  bool changed = false;
  for (auto& k : copy.kids) {
    ExprPtr nk = replace_all(k, from, to, from_names);
    changed = changed || nk.get() != k.get();
    k = nk;
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

inline ExprPtr replace_all(const ExprPtr& e, const ExprPtr& from, const ExprPtr& to) {
  std::set<std::string> names;
  collect_names(from, names);
  return replace_all(e, from, to, names);
}

// canonical choice term for a quantified formula body
inline ExprPtr choice_term(const std::string& var, const ExprPtr& bound, const ExprPtr& body) {
  return mk_binder(ExprKind::choose, var, bound, body);
}

// deterministic witness variable not colliding with any name in the scrutinees
inline std::string witness_var(std::initializer_list<ExprPtr> scope) {
  std::set<std::string> names;
  for (const auto& e : scope) collect_names(e, names);
  if (!names.count("x")) return "x";
  for (int i = 1;; ++i) {
    std::string cand = "x_" + std::to_string(i);
    if (!names.count(cand)) return cand;
  }
}

inline ExprPtr instantiate(const std::string& var, const ExprPtr& body, const ExprPtr& term) {
  std::map<std::string, ExprPtr> sub{{var, term}};
  return detail::substitute(body, sub);
}

// true when a bound-kind identifier occurs free in e (i.e. the expression is
// still under some quantifier and not a closed term)
inline bool free_bound_ident(const ExprPtr& e, std::set<std::string>& shadow) {
  if (e->kind == ExprKind::ident)
    return e->ident_kind == IdentKind::bound && !shadow.count(e->name);
  if (e->is_binder()) {
    if (e->binder_bounded() && free_bound_ident(e->binder_bound(), shadow)) return true;
    bool added = shadow.insert(e->name).second;
    bool r = free_bound_ident(e->binder_body(), shadow);
    if (added) shadow.erase(e->name);
    return r;
  }
  for (const auto& k : e->kids)
    if (free_bound_ident(k, shadow)) return true;
  return false;
}

inline bool contains_bound_ident(const ExprPtr& e) {
  std::set<std::string> shadow;
  return free_bound_ident(e, shadow);
}

struct BudgetExceeded {};

// ---------------------------------------------------------------------------

struct GammaItem {
  ExprPtr formula;  // forall / ~exists / subseteq shapes
  std::set<std::string> used;
  size_t activations = 0;
};

struct Branch {
  std::vector<ExprPtr> formulas;
  std::vector<bool> subsumed;         // rewritten away; kept for closure matching
  std::map<std::string, size_t> present;  // canonical print -> index
  std::deque<size_t> alpha_queue;
  std::deque<size_t> beta_queue;
  std::vector<GammaItem> gammas;
  size_t gamma_cursor = 0;
  std::vector<std::pair<ExprPtr, ExprPtr>> equations;  // oriented: rewrite first -> second
  std::vector<ExprPtr> terms;          // instantiation candidates, insertion order
  std::set<std::string> term_set;
  std::set<std::string> definitions_added;  // fcn-app / choose-def dedup keys
};

class Prover {
 public:
  Prover(const TableauBudget& budget) : budget_(budget), start_(std::chrono::steady_clock::now()) {}

  TableauResult run(const Obligation& ob) {
    TableauResult res;
    try {
      Branch root;
      std::vector<ExprPtr> init;
      for (const auto& [name, h] : ob.hypotheses) init.push_back(h);
      init.push_back(mk_not(ob.goal));
      TraceNodePtr head, tail;
      bool closed = false;
      try {
        for (const auto& f : init) {
          if (ExprPtr cw = add_formula(root, f, head, tail)) {
            append(head, tail, make_closure(root, cw));
            closed = true;
            break;
          }
        }
      } catch (const ClosedEarly& c) {
        append(head, tail, make_closure(root, c.witness));
        closed = true;
      }
      if (!closed) {
        TraceNodePtr body = solve(root);
        if (!body) {
          res.status = saturated_ ? TableauStatus::saturated : TableauStatus::budget_exhausted;
          res.steps = steps_;
          res.open_branch = std::move(open_branch_);
          return res;
        }
        append(head, tail, body);
      }
      res.status = TableauStatus::proved;
      res.trace.obligation_fingerprint = ob.fingerprint;
      res.trace.root = head;
      res.steps = steps_;
      return res;
    } catch (const BudgetExceeded&) {
      res.status = TableauStatus::budget_exhausted;
      res.steps = steps_;
      return res;
    }
  }

 private:
  TableauBudget budget_;
  std::chrono::steady_clock::time_point start_;
  size_t steps_ = 0;
  bool saturated_ = false;
  std::vector<std::string> open_branch_;

  void tick() {
    if (++steps_ > budget_.max_steps) throw BudgetExceeded{};
    if ((steps_ & 0xff) == 0) {
      double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (sec > budget_.max_seconds) throw BudgetExceeded{};
    }
  }

  static void append(TraceNodePtr& head, TraceNodePtr& tail, TraceNodePtr n) {
    if (!head) {
      head = n;
    } else {
      tail->children.push_back(n);
    }
    // descend to the end of the single-child chain
    tail = n;
    while (!tail->children.empty() && tail->children.size() == 1 && tail->rule != "close")
      tail = tail->children.back();
  }

  TraceNodePtr node(const std::string& rule, ExprPtr principal, std::vector<ExprPtr> side,
                    std::vector<ExprPtr> derived, std::string text = "") {
    tick();
    auto n = std::make_shared<TraceNode>();
    n->rule = rule;
    n->text = std::move(text);
    n->principal = std::move(principal);
    n->side = std::move(side);
    n->derived = std::move(derived);
    return n;
  }

  TraceNodePtr close_node(const std::string& kind, std::vector<ExprPtr> witnesses) {
    auto n = node("close", nullptr, std::move(witnesses), {}, kind);
    return n;
  }

  // Adds a formula: arithmetic- and equation-normalizes it (each step a trace
  // node), detects closure, registers queues/terms/equations.
  // Returns the closing witness formula if the branch closed.
  ExprPtr add_formula(Branch& b, ExprPtr f, TraceNodePtr& head, TraceNodePtr& tail) {
    // normalization chain: every step's principal is placed on the branch
    // (subsumed) so the kernel can find it
    for (;;) {
      ExprPtr n = arith_normalize(f);
      if (!expr_eq(n, f)) {
        if (register_formula(b, f)) b.subsumed.back() = true;
        append(head, tail, node("arith-eval", f, {}, {n}));
        f = n;
        continue;
      }
      ExprPtr rewritten;
      for (const auto& [lhs, rhs] : b.equations) {
        ExprPtr r = replace_all(f, lhs, rhs);
        if (!expr_eq(r, f)) {
          if (register_formula(b, f)) b.subsumed.back() = true;
          append(head, tail, node("paramod", f, {mk_eq(lhs, rhs)}, {r}));
          rewritten = r;
          break;
        }
      }
      if (rewritten) {
        f = rewritten;
        continue;
      }
      break;
    }
    if (!register_formula(b, f)) return nullptr;  // duplicate
    if (ExprPtr w = closure_witness(b, f)) return w;
    classify(b, f, b.formulas.size() - 1);
    harvest_terms(b, f);
    if (ExprPtr w = register_equation(b, f, head, tail)) return w;
    add_definitions(b, f, head, tail);
    return nullptr;
  }

  // true if new
  bool register_formula(Branch& b, const ExprPtr& f) {
    std::string key = print_expr(f);
    if (b.present.count(key)) return false;
    b.present.emplace(std::move(key), b.formulas.size());
    b.formulas.push_back(f);
    b.subsumed.push_back(false);
    return true;
  }

  ExprPtr closure_witness(Branch& b, const ExprPtr& f) {
    if (f->kind == ExprKind::bool_lit && !f->bval) return f;
    if (f->kind == ExprKind::not_ && f->kids[0]->kind == ExprKind::bool_lit && f->kids[0]->bval)
      return f;
    if (f->kind == ExprKind::not_ && f->kids[0]->kind == ExprKind::eq &&
        expr_eq(f->kids[0]->kids[0], f->kids[0]->kids[1]))
      return f;
    if (eval_ground_atom(f) == 0) return f;
    // complementary pair
    if (f->kind == ExprKind::not_ && b.present.count(print_expr(f->kids[0]))) return f;
    if (b.present.count(print_expr(mk_not(f)))) return f;
    return nullptr;
  }

  TraceNodePtr make_closure(Branch& b, const ExprPtr& w) {
    if (w->kind == ExprKind::bool_lit || (w->kind == ExprKind::not_ &&
                                          w->kids[0]->kind == ExprKind::bool_lit))
      return close_node("false-literal", {w});
    if (w->kind == ExprKind::not_ && w->kids[0]->kind == ExprKind::eq &&
        expr_eq(w->kids[0]->kids[0], w->kids[0]->kids[1]))
      return close_node("refl-neq", {w});
    if (eval_ground_atom(w) == 0) return close_node("ground-false", {w});
    if (w->kind == ExprKind::not_ && b.present.count(print_expr(w->kids[0])))
      return close_node("contradiction", {w->kids[0], w});
    return close_node("contradiction", {w, mk_not(w)});
  }

  enum class Class : unsigned char { inert, alpha, beta, gamma };

  void classify(Branch& b, const ExprPtr& f, size_t idx) {
    switch (classify_kind(f)) {
      case Class::alpha: b.alpha_queue.push_back(idx); break;
      case Class::beta: b.beta_queue.push_back(idx); break;
      case Class::gamma: b.gammas.push_back(GammaItem{f, {}, 0}); break;
      case Class::inert: break;
    }
  }

  static bool has_ite_or_case(const ExprPtr& e) {
    if (e->kind == ExprKind::if_ || e->kind == ExprKind::case_) return true;
    if (e->is_binder()) {
      // only the bound set is in scope for branch-level splitting
      return e->binder_bounded() && has_ite_or_case(e->binder_bound());
    }
    for (const auto& k : e->kids)
      if (has_ite_or_case(k)) return true;
    return false;
  }

  static Class classify_kind(const ExprPtr& f) {
    const Expr& e = *f;
    switch (e.kind) {
      case ExprKind::and_: return Class::alpha;
      case ExprKind::or_:
      case ExprKind::implies: return Class::beta;
      case ExprKind::forall: return Class::gamma;
      case ExprKind::exists: return Class::alpha;  // delta, non-branching
      case ExprKind::subseteq: return Class::gamma;
      case ExprKind::in_set: {
        switch (e.kids[1]->kind) {
          case ExprKind::set_enum: return Class::beta;
          case ExprKind::union_: return Class::beta;
          case ExprKind::inter: return Class::alpha;
          case ExprKind::set_minus: return Class::alpha;
          default: break;
        }
        return has_ite_or_case(f) ? Class::beta : Class::inert;
      }
      case ExprKind::eq: {
        const Expr &l = *e.kids[0], &r = *e.kids[1];
        if (formula_rooted(l) && formula_rooted(r)) return Class::beta;
        return has_ite_or_case(f) ? Class::beta : Class::inert;
      }
      case ExprKind::not_: {
        const Expr& a = *e.kids[0];
        switch (a.kind) {
          case ExprKind::not_: return Class::alpha;
          case ExprKind::and_: return Class::beta;
          case ExprKind::or_:
          case ExprKind::implies: return Class::alpha;
          case ExprKind::forall: return Class::alpha;  // delta
          case ExprKind::exists: return Class::gamma;
          case ExprKind::subseteq: return Class::alpha;  // delta
          case ExprKind::in_set:
            switch (a.kids[1]->kind) {
              case ExprKind::set_enum: return Class::alpha;
              case ExprKind::union_: return Class::alpha;
              case ExprKind::inter: return Class::beta;
              case ExprKind::set_minus: return Class::beta;
              default: break;
            }
            return has_ite_or_case(f) ? Class::beta : Class::inert;
          case ExprKind::eq: {
            const Expr &l = *a.kids[0], &r = *a.kids[1];
            if (formula_rooted(l) && formula_rooted(r)) return Class::beta;
            if (set_shaped(l) || set_shaped(r)) return Class::beta;  // set extensionality
            if (l.kind == ExprKind::fcn_lit && r.kind == ExprKind::fcn_lit) return Class::beta;
            return has_ite_or_case(f) ? Class::beta : Class::inert;
          }
          default:
            return has_ite_or_case(f) ? Class::beta : Class::inert;
        }
      }
      default:
        return has_ite_or_case(f) ? Class::beta : Class::inert;
    }
  }

  // ---- term harvesting (instantiation candidates) ----

  void harvest_terms(Branch& b, const ExprPtr& f) { harvest_rec(b, f, /*term_pos=*/false); }

  void harvest_rec(Branch& b, const ExprPtr& e, bool term_pos) {
    if (term_pos && is_candidate_term(e)) add_term(b, e);
    if (e->is_binder()) {
      if (e->binder_bounded()) harvest_rec(b, e->binder_bound(), true);
      return;  // bodies contain bound variables
    }
    for (size_t i = 0; i < e->kids.size(); ++i) {
      bool child_term = !detail::formula_child(*e, i, !term_pos);
      harvest_rec(b, e->kids[i], child_term);
    }
  }

  static bool is_candidate_term(const ExprPtr& e) {
    if (contains_bound_ident(e)) return false;
    if (expr_size(e) > 24) return false;
    switch (e->kind) {
      case ExprKind::ident:
        return e->ident_kind != IdentKind::builtin_set;
      case ExprKind::int_lit:
      case ExprKind::real_lit:
      case ExprKind::str_lit:
      case ExprKind::bool_lit:
      case ExprKind::op_app:
      case ExprKind::fcn_app:
      case ExprKind::tuple:
      case ExprKind::prime:
      case ExprKind::choose:
      case ExprKind::set_enum:
        return true;
      default:
        return false;
    }
  }

  void add_term(Branch& b, const ExprPtr& t) {
    std::string key = print_expr(t);
    if (b.term_set.insert(std::move(key)).second) b.terms.push_back(t);
  }

  // ---- definitional additions (valid sentences; once per redex text) ----

  void add_definitions(Branch& b, const ExprPtr& f, TraceNodePtr& head, TraceNodePtr& tail) {
    std::vector<ExprPtr> fcn_redexes, chooses;
    scan_definitions(f, fcn_redexes, chooses);
    for (const auto& r : fcn_redexes) {
      std::string key = "f:" + print_expr(r);
      if (!b.definitions_added.insert(key).second) continue;
      const ExprPtr& lit = r->kids[0];
      ExprPtr inst = instantiate(lit->name, lit->binder_body(), r->kids[1]);
      ExprPtr def = mk_implies(mk_in(r->kids[1], lit->binder_bound()), mk_eq(r, inst));
      append(head, tail, node("fcn-app-def", nullptr, {r}, {def}));
      if (ExprPtr w = add_formula(b, def, head, tail)) throw ClosedEarly{w};
    }
    for (const auto& c : chooses) {
      std::string key = "c:" + print_expr(c);
      if (!b.definitions_added.insert(key).second) continue;
      ExprPtr body = c->binder_body();
      ExprPtr def;
      if (c->binder_bounded()) {
        ExprPtr ex = mk_binder(ExprKind::exists, c->name, c->binder_bound(), body);
        ExprPtr inst = instantiate(c->name, body, c);
        def = mk_implies(ex, mk_and(mk_in(c, c->binder_bound()), inst));
      } else {
        ExprPtr ex = mk_binder(ExprKind::exists, c->name, nullptr, body);
        def = mk_implies(ex, instantiate(c->name, body, c));
      }
      append(head, tail, node("choose-def", nullptr, {c}, {def}));
      if (ExprPtr w = add_formula(b, def, head, tail)) throw ClosedEarly{w};
    }
  }

  struct ClosedEarly {
    ExprPtr witness;
  };

  void scan_definitions(const ExprPtr& e, std::vector<ExprPtr>& fcn, std::vector<ExprPtr>& chs) {
    if (e->is_binder() && e->kind != ExprKind::choose) {
      if (e->binder_bounded()) scan_definitions(e->binder_bound(), fcn, chs);
      return;
    }
    if (e->kind == ExprKind::choose) {
      if (!contains_bound_ident(e)) chs.push_back(e);
      if (e->binder_bounded()) scan_definitions(e->binder_bound(), fcn, chs);
      return;
    }
    if (e->kind == ExprKind::fcn_app && e->kids[0]->kind == ExprKind::fcn_lit &&
        !contains_bound_ident(e))
      fcn.push_back(e);
    for (const auto& k : e->kids) scan_definitions(k, fcn, chs);
  }

  // ---- equations ----

  ExprPtr register_equation(Branch& b, const ExprPtr& f, TraceNodePtr& head, TraceNodePtr& tail) {
    if (f->kind != ExprKind::eq) return nullptr;
    const ExprPtr &l = f->kids[0], &r = f->kids[1];
    // boolean literals rewrite like any other term; only connective-rooted
    // sides are excluded (those go through beta-eq-bool instead)
    auto connective = [](const Expr& e) {
      return formula_rooted(e) && e.kind != ExprKind::bool_lit;
    };
    if (connective(*l) || connective(*r)) return nullptr;
    if (contains_bound_ident(l) || contains_bound_ident(r)) return nullptr;
    if (expr_eq(l, r)) return nullptr;
    ExprPtr from = l, to = r;
    if (term_less(from, to)) std::swap(from, to);
    b.equations.emplace_back(from, to);
    // rewrite existing formulas with the new equation
    size_t count = b.formulas.size();
    for (size_t i = 0; i < count; ++i) {
      if (b.subsumed[i]) continue;
      const ExprPtr& g = b.formulas[i];
      ExprPtr ng = replace_all(g, from, to);
      if (expr_eq(ng, g)) continue;
      b.subsumed[i] = true;
      append(head, tail, node("paramod", g, {mk_eq(from, to)}, {ng}));
      if (ExprPtr w = add_formula(b, ng, head, tail)) return w;
    }
    return nullptr;
  }

  // ---- main loop ----

  TraceNodePtr solve(Branch& b) {
    TraceNodePtr head, tail;
    try {
      for (;;) {
        // alpha-class work
        if (!b.alpha_queue.empty()) {
          size_t idx = b.alpha_queue.front();
          b.alpha_queue.pop_front();
          if (b.subsumed[idx]) continue;
          auto [rule, side, derived] = alpha_expand(b.formulas[idx]);
          append(head, tail, node(rule, b.formulas[idx], side, derived));
          bool closed = false;
          for (const auto& d : derived) {
            if (ExprPtr w = add_formula(b, d, head, tail)) {
              append(head, tail, make_closure(b, w));
              closed = true;
              break;
            }
          }
          if (closed) return head;
          continue;
        }
        // beta-class work: prefer splits whose arms mostly close at once
        if (!b.beta_queue.empty()) {
          size_t idx = pick_beta(b);
          if (idx == (size_t)-1) continue;
          auto [rule, side, arms] = beta_expand(b.formulas[idx]);
          TraceNodePtr split = node(rule, b.formulas[idx], side, arms);
          b.subsumed[idx] = true;  // replaced by its arms
          for (const auto& arm : arms) {
            Branch child = b;
            TraceNodePtr chead, ctail;
            ExprPtr w = add_formula(child, arm, chead, ctail);
            TraceNodePtr body;
            if (w) {
              append(chead, ctail, make_closure(child, w));
              body = chead;
            } else {
              body = solve(child);
              if (!body) return nullptr;  // open branch: overall failure
              if (chead) {
                append(chead, ctail, body);
                body = chead;
              }
            }
            split->children.push_back(body);
          }
          if (arms.empty()) {
            // zero-armed split (membership in the empty set): branch closed
          }
          append(head, tail, split);
          return head;
        }
        // gamma-class work
        if (gamma_step(b, head, tail)) continue;
        saturated_ = true;
        if (open_branch_.empty())
          for (size_t i = 0; i < b.formulas.size(); ++i)
            if (!b.subsumed[i]) open_branch_.push_back(print_expr(b.formulas[i]));
        return nullptr;
      }
    } catch (const ClosedEarly& c) {
      append(head, tail, make_closure(b, c.witness));
      return head;
    }
  }

  // cheap per-arm closure test used only for scheduling (soundness is
  // unaffected: the real check happens in add_formula)
  bool would_close(const Branch& b, const ExprPtr& f) {
    if (f->kind == ExprKind::bool_lit && !f->bval) return true;
    if (f->kind == ExprKind::not_ && f->kids[0]->kind == ExprKind::bool_lit && f->kids[0]->bval)
      return true;
    if (f->kind == ExprKind::not_ && f->kids[0]->kind == ExprKind::eq &&
        expr_eq(f->kids[0]->kids[0], f->kids[0]->kids[1]))
      return true;
    if (eval_ground_atom(f) == 0) return true;
    if (f->kind == ExprKind::not_ && b.present.count(print_expr(f->kids[0]))) return true;
    return b.present.count(print_expr(mk_not(f))) != 0;
  }

  // picks the most constrained pending split; (size_t)-1 when the queue only
  // held subsumed entries
  size_t pick_beta(Branch& b) {
    size_t best = (size_t)-1, best_open = SIZE_MAX, best_qpos = 0;
    for (size_t q = 0; q < b.beta_queue.size(); ++q) {
      size_t idx = b.beta_queue[q];
      if (b.subsumed[idx]) continue;
      auto [rule, side, arms] = beta_expand(b.formulas[idx]);
      (void)rule;
      (void)side;
      size_t open = 0;
      for (const auto& a : arms)
        if (!would_close(b, a)) open++;
      if (open < best_open) {
        best_open = open;
        best = idx;
        best_qpos = q;
        if (open == 0) break;
      }
    }
    if (best == (size_t)-1) {
      b.beta_queue.clear();
      return best;
    }
    b.beta_queue.erase(b.beta_queue.begin() + best_qpos);
    return best;
  }

  // returns (rule, side, derived-for-single-child)
  std::tuple<std::string, std::vector<ExprPtr>, std::vector<ExprPtr>> alpha_expand(const ExprPtr& f) {
    const Expr& e = *f;
    if (e.kind == ExprKind::and_) return {"alpha-and", {}, {e.kids[0], e.kids[1]}};
    if (e.kind == ExprKind::exists) {
      ExprPtr eps = choice_term(e.name, e.binder_bounded() ? e.binder_bound() : nullptr,
                                e.binder_body());
      ExprPtr inst = instantiate(e.name, e.binder_body(), eps);
      if (e.binder_bounded())
        return {"delta-exists", {eps}, {mk_in(eps, e.binder_bound()), inst}};
      return {"delta-exists", {eps}, {inst}};
    }
    if (e.kind == ExprKind::in_set) {
      const ExprPtr &t = e.kids[0], &s = e.kids[1];
      if (s->kind == ExprKind::inter)
        return {"in-inter", {}, {mk_in(t, s->kids[0]), mk_in(t, s->kids[1])}};
      if (s->kind == ExprKind::set_minus)
        return {"in-setminus", {}, {mk_in(t, s->kids[0]), mk_not(mk_in(t, s->kids[1]))}};
    }
    if (e.kind == ExprKind::not_) {
      const Expr& a = *e.kids[0];
      switch (a.kind) {
        case ExprKind::not_: return {"alpha-not-not", {}, {a.kids[0]}};
        case ExprKind::or_: return {"alpha-not-or", {}, {mk_not(a.kids[0]), mk_not(a.kids[1])}};
        case ExprKind::implies: return {"alpha-not-imp", {}, {a.kids[0], mk_not(a.kids[1])}};
        case ExprKind::forall: {
          ExprPtr body = a.binder_body();
          ExprPtr eps = choice_term(a.name, a.binder_bounded() ? a.binder_bound() : nullptr,
                                    mk_not(body));
          ExprPtr inst = mk_not(instantiate(a.name, body, eps));
          if (a.binder_bounded())
            return {"delta-not-forall", {eps}, {mk_in(eps, a.binder_bound()), inst}};
          return {"delta-not-forall", {eps}, {inst}};
        }
        case ExprKind::subseteq: {
          std::string v = witness_var({a.kids[0], a.kids[1]});
          ExprPtr x = mk_ident(v, IdentKind::bound);
          ExprPtr pred = mk_and(mk_in(x, a.kids[0]), mk_not(mk_in(x, a.kids[1])));
          ExprPtr eps = choice_term(v, nullptr, pred);
          return {"delta-not-subseteq", {eps},
                  {mk_in(eps, a.kids[0]), mk_not(mk_in(eps, a.kids[1]))}};
        }
        case ExprKind::in_set: {
          const ExprPtr &t = a.kids[0], &s = a.kids[1];
          if (s->kind == ExprKind::set_enum) {
            std::vector<ExprPtr> out;
            for (const auto& m : s->kids) out.push_back(mk_not(mk_eq(t, m)));
            return {"not-in-enum", {}, out};
          }
          if (s->kind == ExprKind::union_)
            return {"not-in-union", {},
                    {mk_not(mk_in(t, s->kids[0])), mk_not(mk_in(t, s->kids[1]))}};
          break;
        }
        default: break;
      }
    }
    throw MtpError("internal: alpha_expand on " + print_expr(f));
  }

  // returns (rule, side, one formula per child)
  std::tuple<std::string, std::vector<ExprPtr>, std::vector<ExprPtr>> beta_expand(const ExprPtr& f) {
    const Expr& e = *f;
    if (e.kind == ExprKind::or_) return {"beta-or", {}, {e.kids[0], e.kids[1]}};
    if (e.kind == ExprKind::implies) return {"beta-imp", {}, {mk_not(e.kids[0]), e.kids[1]}};
    if (e.kind == ExprKind::eq && formula_rooted(*e.kids[0]) && formula_rooted(*e.kids[1]))
      return {"beta-eq-bool", {},
              {mk_and(e.kids[0], e.kids[1]), mk_and(mk_not(e.kids[0]), mk_not(e.kids[1]))}};
    if (e.kind == ExprKind::in_set && e.kids[1]->kind == ExprKind::set_enum) {
      std::vector<ExprPtr> out;
      for (const auto& m : e.kids[1]->kids) out.push_back(mk_eq(e.kids[0], m));
      return {"in-enum", {}, out};
    }
    if (e.kind == ExprKind::in_set && e.kids[1]->kind == ExprKind::union_)
      return {"in-union", {}, {mk_in(e.kids[0], e.kids[1]->kids[0]), mk_in(e.kids[0], e.kids[1]->kids[1])}};
    if (e.kind == ExprKind::not_) {
      const Expr& a = *e.kids[0];
      if (a.kind == ExprKind::and_)
        return {"beta-not-and", {}, {mk_not(a.kids[0]), mk_not(a.kids[1])}};
      if (a.kind == ExprKind::in_set && a.kids[1]->kind == ExprKind::inter)
        return {"not-in-inter", {},
                {mk_not(mk_in(a.kids[0], a.kids[1]->kids[0])),
                 mk_not(mk_in(a.kids[0], a.kids[1]->kids[1]))}};
      if (a.kind == ExprKind::in_set && a.kids[1]->kind == ExprKind::set_minus)
        return {"not-in-setminus", {},
                {mk_not(mk_in(a.kids[0], a.kids[1]->kids[0])), mk_in(a.kids[0], a.kids[1]->kids[1])}};
      if (a.kind == ExprKind::eq) {
        const ExprPtr &l = a.kids[0], &r = a.kids[1];
        if (formula_rooted(*l) && formula_rooted(*r))
          return {"beta-neq-bool", {}, {mk_and(l, mk_not(r)), mk_and(mk_not(l), r)}};
        if (l->kind == ExprKind::fcn_lit && r->kind == ExprKind::fcn_lit) {
          ExprPtr w = fcn_ext_witness(l, r);
          ExprPtr sl = l->binder_bound(), sr = r->binder_bound();
          ExprPtr app_ne = mk_not(mk_eq(instantiate(l->name, l->binder_body(), w),
                                        instantiate(r->name, r->binder_body(), w)));
          return {"fcn-ext", {w}, {mk_not(mk_eq(sl, sr)), mk_and(mk_in(w, sl), app_ne)}};
        }
        if (set_shaped(*l) || set_shaped(*r)) {
          ExprPtr w = ext_witness(l, r);
          return {"set-ext", {w},
                  {mk_and(mk_in(w, l), mk_not(mk_in(w, r))),
                   mk_and(mk_not(mk_in(w, l)), mk_in(w, r))}};
        }
      }
    }
    // formulas containing IF/CASE: split on the leftmost-outermost occurrence
    if (ExprPtr ite = find_ite(f)) {
      if (ite->kind == ExprKind::if_) {
        ExprPtr then_f = replace_all(f, ite, ite->kids[1]);
        ExprPtr else_f = replace_all(f, ite, ite->kids[2]);
        return {"if-split", {ite},
                {mk_and(ite->kids[0], then_f), mk_and(mk_not(ite->kids[0]), else_f)}};
      }
      // CASE
      std::vector<ExprPtr> arms;
      size_t pairs = ite->kids.size() / 2;
      ExprPtr all_neg;
      for (size_t i = 0; i < pairs; ++i) {
        ExprPtr guard = ite->kids[2 * i];
        arms.push_back(mk_and(guard, replace_all(f, ite, ite->kids[2 * i + 1])));
        ExprPtr ng = mk_not(guard);
        all_neg = all_neg ? mk_and(all_neg, ng) : ng;
      }
      if (ite->has_other) {
        ExprPtr other_f = replace_all(f, ite, ite->kids.back());
        arms.push_back(all_neg ? mk_and(all_neg, other_f) : other_f);
      } else if (all_neg) {
        // no OTHER and no guard true: the CASE denotes an unspecified value
        ExprPtr opaque = choice_term("v", nullptr, mk_bool(true));
        arms.push_back(mk_and(all_neg, replace_all(f, ite, opaque)));
      }
      return {"case-split", {ite}, arms};
    }
    throw MtpError("internal: beta_expand on " + print_expr(f));
  }

  static ExprPtr ext_witness(const ExprPtr& l, const ExprPtr& r) {
    std::string v = witness_var({l, r});
    ExprPtr x = mk_ident(v, IdentKind::bound);
    ExprPtr diff = mk_not(mk_eq(mk_in(x, l), mk_in(x, r)));
    return choice_term(v, nullptr, diff);
  }

  static ExprPtr fcn_ext_witness(const ExprPtr& l, const ExprPtr& r) {
    std::string v = witness_var({l, r});
    ExprPtr x = mk_ident(v, IdentKind::bound);
    ExprPtr app_ne = mk_not(mk_eq(instantiate(l->name, l->binder_body(), x),
                                  instantiate(r->name, r->binder_body(), x)));
    return choice_term(v, l->binder_bound(), app_ne);
  }

  static ExprPtr find_ite(const ExprPtr& e) {
    if (e->kind == ExprKind::if_ || e->kind == ExprKind::case_) return e;
    if (e->is_binder()) return e->binder_bounded() ? find_ite(e->binder_bound()) : nullptr;
    for (const auto& k : e->kids)
      if (ExprPtr r = find_ite(k)) return r;
    return nullptr;
  }

  // one fair gamma instantiation; returns false when fully saturated
  bool gamma_step(Branch& b, TraceNodePtr& head, TraceNodePtr& tail) {
    if (b.gammas.empty()) return false;
    size_t n = b.gammas.size();
    for (size_t off = 0; off < n; ++off) {
      GammaItem& g = b.gammas[(b.gamma_cursor + off) % n];
      ExprPtr term = pick_term(b, g);
      if (!term) continue;
      g.used.insert(print_expr(term));
      g.activations++;
      b.gamma_cursor = (b.gamma_cursor + off + 1) % n;
      auto [rule, derived] = gamma_instance(g.formula, term);
      append(head, tail, node(rule, g.formula, {term}, {derived}));
      if (ExprPtr w = add_formula(b, derived, head, tail)) throw ClosedEarly{w};
      return true;
    }
    return false;
  }

  ExprPtr pick_term(Branch& b, const GammaItem& g) {
    const Expr& e = *g.formula;
    // bounded quantifiers prefer syntactically available domain members
    const ExprPtr* bound = nullptr;
    if (e.kind == ExprKind::forall && e.binder_bounded()) bound = &e.kids[0];
    if (e.kind == ExprKind::not_ && e.kids[0]->kind == ExprKind::exists &&
        e.kids[0]->binder_bounded())
      bound = &e.kids[0]->kids[0];
    if (bound && (*bound)->kind == ExprKind::set_enum) {
      for (const auto& m : (*bound)->kids)
        if (!contains_bound_ident(m) && !g.used.count(print_expr(m))) return m;
    }
    for (const auto& t : b.terms)
      if (!g.used.count(print_expr(t))) return t;
    ExprPtr eps = gamma_witness(g.formula);
    if (eps && !g.used.count(print_expr(eps))) return eps;
    return nullptr;
  }

  // last-resort instantiation term: the canonical counterexample witness
  static ExprPtr gamma_witness(const ExprPtr& f) {
    const Expr& e = *f;
    if (e.kind == ExprKind::forall)
      return choice_term(e.name, e.binder_bounded() ? e.binder_bound() : nullptr,
                         mk_not(e.binder_body()));
    if (e.kind == ExprKind::not_ && e.kids[0]->kind == ExprKind::exists) {
      const Expr& a = *e.kids[0];
      return choice_term(a.name, a.binder_bounded() ? a.binder_bound() : nullptr, a.binder_body());
    }
    if (e.kind == ExprKind::subseteq) {
      std::string v = witness_var({e.kids[0], e.kids[1]});
      ExprPtr x = mk_ident(v, IdentKind::bound);
      return choice_term(v, nullptr,
                         mk_and(mk_in(x, e.kids[0]), mk_not(mk_in(x, e.kids[1]))));
    }
    return nullptr;
  }

  std::pair<std::string, ExprPtr> gamma_instance(const ExprPtr& f, const ExprPtr& term) {
    const Expr& e = *f;
    if (e.kind == ExprKind::forall) {
      ExprPtr inst = instantiate(e.name, e.binder_body(), term);
      if (e.binder_bounded())
        return {"gamma-bounded-forall", mk_implies(mk_in(term, e.binder_bound()), inst)};
      return {"gamma-forall", inst};
    }
    if (e.kind == ExprKind::subseteq)
      return {"gamma-subseteq", mk_implies(mk_in(term, e.kids[0]), mk_in(term, e.kids[1]))};
    if (e.kind == ExprKind::not_ && e.kids[0]->kind == ExprKind::exists) {
      const Expr& a = *e.kids[0];
      ExprPtr inst = mk_not(instantiate(a.name, a.binder_body(), term));
      if (a.binder_bounded())
        return {"gamma-bounded-not-exists", mk_implies(mk_in(term, a.binder_bound()), inst)};
      return {"gamma-not-exists", inst};
    }
    throw MtpError("internal: gamma_instance on " + print_expr(f));
  }
};

}  // namespace tableau_detail

// Proves an obligation within the budget. Sound: a returned trace always
// checks; failure carries a reason, never an abnormal exit.
inline TableauResult tableau_prove(const Obligation& ob, TableauBudget budget = {}) {
  tableau_detail::Prover p(budget);
  return p.run(ob);
}

// Skolemization entry used by tests: replaces the outermost existential (or
// CHOOSE-definable) quantifier by its canonical choice term.
inline ExprPtr skolemize_choice(const ExprPtr& f) {
  if (f->kind == ExprKind::exists) {
    ExprPtr eps = tableau_detail::choice_term(
        f->name, f->binder_bounded() ? f->binder_bound() : nullptr, f->binder_body());
    ExprPtr inst = tableau_detail::instantiate(f->name, f->binder_body(), eps);
    return f->binder_bounded() ? mk_and(mk_in(eps, f->binder_bound()), inst) : inst;
  }
  return f;
}

}  // namespace mtp

#endif
