// mtp :: trusted rewrite core
//
// Fixed pipeline order for obligation expressions:
//   resolve subexpression references -> expand usable definitions ->
//   distribute primes -> hash hidden non-substitutive applications.
#ifndef MTP_REWRITE_HPP
#define MTP_REWRITE_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mtp/ast.hpp"
#include "mtp/digest.hpp"
#include "mtp/printer.hpp"

namespace mtp {

enum class UsableOrigin : unsigned char { cited, use_step, by_default };

struct UsabilityContext {
  std::map<std::string, UsableOrigin> usable;

  bool is_usable(const std::string& op) const { return usable.count(op) != 0; }
  void add(const std::string& op, UsableOrigin o) { usable.emplace(op, o); }
};

// ---------------------------------------------------------------------------
// substitution

namespace detail {

inline void free_idents(const ExprPtr& e, std::set<std::string>& shadow, std::set<std::string>& out) {
  if (e->kind == ExprKind::ident) {
    if (!shadow.count(e->name)) out.insert(e->name);
    return;
  }
  if (e->is_binder()) {
    if (e->binder_bounded()) free_idents(e->binder_bound(), shadow, out);
    bool added = shadow.insert(e->name).second;
    free_idents(e->binder_body(), shadow, out);
    if (added) shadow.erase(e->name);
    return;
  }
  for (const auto& k : e->kids) free_idents(k, shadow, out);
}

inline std::set<std::string> free_idents(const ExprPtr& e) {
  std::set<std::string> shadow, out;
  free_idents(e, shadow, out);
  return out;
}

inline std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

// Capture-avoiding substitution of whole expressions for identifier names.
inline ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
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
    for (const auto& [_, repl] : inner)
      if (free_idents(repl).count(var)) clash = true;
    if (clash && !inner.empty()) {
      std::set<std::string> taken = free_idents(e);
      for (const auto& [_, repl] : inner)
        for (const auto& n : free_idents(repl)) taken.insert(n);
      std::string nv = fresh_name(var, taken);
      std::map<std::string, ExprPtr> rename{{var, mk_ident(nv, IdentKind::bound)}};
      body = substitute(body, rename);
      var = nv;
    }
    Expr copy = *e;
    copy.name = var;
    if (e->binder_bounded()) copy.kids[0] = substitute(e->kids[0], sub);
    copy.kids[copy.kids.size() - 1] = substitute(body, inner);
    return mk_expr(std::move(copy));
  }
  Expr copy = *e;
  bool changed = false;
  for (auto& k : copy.kids) {
    ExprPtr nk = substitute(k, sub);
    changed = changed || nk.get() != k.get();
    k = nk;
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// substitutivity / rigidity classification

// yes iff the body contains no prime and applies only yes-operators.
// Sound and conservative: a `no` answer may be a false negative, a `yes`
// never is.
inline TriState classify_substitutive(const OperatorDef& def,
                                      const std::map<std::string, TriState>& env) {
  struct Walk {
    const std::map<std::string, TriState>& env;
    bool ok = true;
    void run(const ExprPtr& e) {
      if (!ok) return;
      if (e->kind == ExprKind::prime) { ok = false; return; }
      if (e->kind == ExprKind::op_app) {
        auto it = env.find(e->name);
        if (it == env.end() || it->second != TriState::yes) { ok = false; return; }
      }
      for (const auto& k : e->kids) run(k);
    }
  } w{env};
  w.run(def.body);
  return w.ok ? TriState::yes : TriState::no;
}

namespace detail {
inline bool classify_rigid(const ExprPtr& body, const std::map<std::string, bool>& env) {
  if (body->kind == ExprKind::prime) return false;
  if (body->kind == ExprKind::ident && body->ident_kind == IdentKind::variable) return false;
  if (body->kind == ExprKind::op_app) {
    auto it = env.find(body->name);
    if (it == env.end() || !it->second) return false;
  }
  for (const auto& k : body->kids)
    if (!classify_rigid(k, env)) return false;
  return true;
}
}  // namespace detail

// Computes the substitutive tri-state and rigidity of every definition,
// in listing order (definitions only reference earlier ones).
inline void annotate_definitions(ModuleAst& m) {
  std::map<std::string, TriState> senv;
  std::map<std::string, bool> renv;
  for (auto& d : m.definitions) {
    d.substitutive = classify_substitutive(d, senv);
    d.rigid = detail::classify_rigid(d.body, renv);
    senv[d.name] = d.substitutive;
    renv[d.name] = d.rigid;
  }
}

// ---------------------------------------------------------------------------
// subexpression references

namespace detail {
inline ExprPtr unwrap_labels(ExprPtr e) {
  while (e->kind == ExprKind::label) e = e->kids[0];
  return e;
}

inline bool find_label(const ExprPtr& e, const std::string& name, ExprPtr& out) {
  if (e->kind == ExprKind::label && e->name == name) {
    out = e->kids[0];
    return true;
  }
  for (const auto& k : e->kids)
    if (find_label(k, name, out)) return true;
  return false;
}
}  // namespace detail

// Instantiates the referenced definition with the given arguments and walks
// the path. Positional indices are 1-based over abstract-syntax children;
// labels select the unique labelled subexpression anywhere in the body.
inline ExprPtr resolve_ref(const std::string& target, const std::vector<ExprPtr>& args,
                           const std::vector<PathSeg>& path, const ModuleAst& module,
                           SourcePos pos = {}) {
  const OperatorDef* def = module.find_def(target);
  if (!def) throw RewriteError("undefined operator '" + target + "'", pos);
  if (def->params.size() != args.size())
    throw RewriteError("operator '" + target + "' expects " + std::to_string(def->params.size()) +
                           " argument(s)", pos);
  std::map<std::string, ExprPtr> sub;
  for (size_t i = 0; i < args.size(); ++i) sub[def->params[i]] = args[i];
  ExprPtr cur = detail::substitute(def->body, sub);
  for (const auto& seg : path) {
    cur = detail::unwrap_labels(cur);
    if (seg.is_label) {
      ExprPtr found;
      if (!detail::find_label(cur, seg.name, found))
        throw RewriteError("no label '" + seg.name + "' in " + target, pos);
      cur = found;
    } else {
      if (seg.index < 1 || (size_t)seg.index > cur->kids.size())
        throw RewriteError("position " + std::to_string(seg.index) + " out of range (node has " +
                               std::to_string(cur->kids.size()) + " children)", pos);
      cur = cur->kids[seg.index - 1];
    }
  }
  return detail::unwrap_labels(cur);
}

// Replaces every subexpression reference by the expression it denotes.
inline ExprPtr resolve_all_refs(const ExprPtr& e, const ModuleAst& module) {
  if (e->kind == ExprKind::sub_ref) {
    std::vector<ExprPtr> args;
    for (const auto& a : e->kids) args.push_back(resolve_all_refs(a, module));
    ExprPtr r = resolve_ref(e->name, args, e->path, module, e->pos);
    return resolve_all_refs(r, module);
  }
  Expr copy = *e;
  bool changed = false;
  for (auto& k : copy.kids) {
    ExprPtr nk = resolve_all_refs(k, module);
    changed = changed || nk.get() != k.get();
    k = nk;
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

// Drops label wrappers; labels only matter for reference resolution and are
// noise to backends and fingerprints.
inline ExprPtr strip_labels(const ExprPtr& e) {
  if (e->kind == ExprKind::label) return strip_labels(e->kids[0]);
  Expr copy = *e;
  bool changed = false;
  for (auto& k : copy.kids) {
    ExprPtr nk = strip_labels(k);
    changed = changed || nk.get() != k.get();
    k = nk;
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

// ---------------------------------------------------------------------------
// expansion

// Beta-reduces every application of a usable operator, inside out, to a
// fixpoint. No arithmetic is evaluated: P(2, 20) with P(x, y) == x + 2 * y
// becomes 2 + 2 * 20, never 42. Hidden operators are not replaced (their
// arguments are still rewritten).
inline ExprPtr expand_usable(const ExprPtr& e, const UsabilityContext& ctx,
                             const ModuleAst& module) {
  Expr copy = *e;
  bool changed = false;
  for (auto& k : copy.kids) {
    ExprPtr nk = expand_usable(k, ctx, module);
    changed = changed || nk.get() != k.get();
    k = nk;
  }
  if (e->kind == ExprKind::op_app && ctx.is_usable(e->name)) {
    const OperatorDef* def = module.find_def(e->name);
    if (def) {
      std::map<std::string, ExprPtr> sub;
      for (size_t i = 0; i < def->params.size(); ++i) sub[def->params[i]] = copy.kids[i];
      return expand_usable(detail::substitute(def->body, sub), ctx, module);
    }
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

// ---------------------------------------------------------------------------
// prime distribution

namespace detail {

inline bool is_constant_expr(const ExprPtr& e, const ModuleAst& module) {
  switch (e->kind) {
    case ExprKind::ident:
      return e->ident_kind != IdentKind::variable;
    case ExprKind::prime:
      return false;
    case ExprKind::op_app: {
      const OperatorDef* def = module.find_def(e->name);
      if (!def || !def->rigid) return false;
      break;
    }
    default:
      break;
  }
  for (const auto& k : e->kids)
    if (!is_constant_expr(k, module)) return false;
  return true;
}

// Pushes one prime over `e` downward.
inline ExprPtr push_prime(const ExprPtr& e, const ModuleAst& module) {
  if (is_constant_expr(e, module)) return e;  // absorbed by constants
  switch (e->kind) {
    case ExprKind::ident:
      return mk_node(ExprKind::prime, {e});  // variable: v'
    case ExprKind::label:
      return push_prime(e->kids[0], module);
    case ExprKind::prime:
      throw RewriteError("double prime reached the rewrite engine", e->pos);
    case ExprKind::sub_ref:
      throw RewriteError("unresolved subexpression reference under prime", e->pos);
    case ExprKind::box:
      throw RewriteError("temporal operator under prime", e->pos);
    case ExprKind::op_app: {
      const OperatorDef* def = module.find_def(e->name);
      if (!def || !def->rigid)
        throw RewriteError("cannot distribute prime over hidden operator '" + e->name +
                               "'; cite its definition", e->pos);
      Expr copy = *e;  // rigid operator: commute into the arguments
      for (auto& k : copy.kids) k = push_prime(k, module);
      return mk_expr(std::move(copy));
    }
    default: {
      // ordinary operator of mathematics: commute
      Expr copy = *e;
      for (auto& k : copy.kids) k = push_prime(k, module);
      return mk_expr(std::move(copy));
    }
  }
}

}  // namespace detail

// Eliminates prime applications: afterwards primes appear only immediately
// around variable identifiers. Expansion must already have run.
inline ExprPtr distribute_prime(const ExprPtr& e, const ModuleAst& module) {
  if (e->kind == ExprKind::prime) return detail::push_prime(distribute_prime(e->kids[0], module), module);
  Expr copy = *e;
  bool changed = false;
  for (auto& k : copy.kids) {
    ExprPtr nk = distribute_prime(k, module);
    changed = changed || nk.get() != k.get();
    k = nk;
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

// Structural predicate used by tests and by the obligation engine to assert
// the post-state of prime distribution.
inline bool primes_only_on_variables(const ExprPtr& e) {
  if (e->kind == ExprKind::prime)
    return e->kids[0]->kind == ExprKind::ident && e->kids[0]->kids.empty();
  for (const auto& k : e->kids)
    if (!primes_only_on_variables(k)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// hashing of hidden non-substitutive applications

namespace detail {

inline bool formula_child(const Expr& parent, size_t idx, bool parent_is_formula) {
  switch (parent.kind) {
    case ExprKind::and_:
    case ExprKind::or_:
    case ExprKind::not_:
    case ExprKind::implies:
    case ExprKind::box:
      return true;
    case ExprKind::forall:
    case ExprKind::exists:
    case ExprKind::choose:
      return !(parent.binder_bounded() && idx == 0);  // bound set is a term
    case ExprKind::if_:
      return idx == 0 ? true : parent_is_formula;
    case ExprKind::case_:
      if (parent.has_other && idx + 1 == parent.kids.size()) return parent_is_formula;
      return idx % 2 == 0 ? true : parent_is_formula;
    default:
      return false;  // operands of =, \in, arithmetic, sets, tuples: terms
  }
}

inline ExprPtr hash_hidden_rec(const ExprPtr& e, const UsabilityContext& ctx,
                               const ModuleAst& module, bool formula_pos) {
  if (e->kind == ExprKind::op_app && !ctx.is_usable(e->name)) {
    const OperatorDef* def = module.find_def(e->name);
    if (def && def->substitutive == TriState::no) {
      std::string text = print_expr(e);
      std::string name =
          std::string("hash_") + (formula_pos ? "p" : "t") + "_" + sha256_hex(text);
      return mk_ident(name, IdentKind::opaque, e->pos);
    }
  }
  Expr copy = *e;
  bool changed = false;
  for (size_t i = 0; i < copy.kids.size(); ++i) {
    bool fpos = formula_child(*e, i, formula_pos);
    ExprPtr nk = hash_hidden_rec(copy.kids[i], ctx, module, fpos);
    changed = changed || nk.get() != copy.kids[i].get();
    copy.kids[i] = nk;
  }
  return changed ? mk_expr(std::move(copy)) : e;
}

}  // namespace detail

// Replaces applications of hidden non-substitutive operators by opaque atoms
// keyed by the digest of their canonical printed text. Identical texts map
// to the same atom; distinct texts to distinct atoms.
inline ExprPtr hash_hidden(const ExprPtr& e, const UsabilityContext& ctx, const ModuleAst& module) {
  return detail::hash_hidden_rec(e, ctx, module, /*formula_pos=*/true);
}

}  // namespace mtp

#endif
