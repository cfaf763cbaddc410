// mtp :: module flattening and name resolution
#ifndef MTP_FLATTEN_HPP
#define MTP_FLATTEN_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mtp/ast.hpp"

namespace mtp {

namespace detail {

struct Scope {
  std::set<std::string> constants;
  std::set<std::string> variables;
  std::map<std::string, size_t> def_arity;  // name -> param count

  static bool is_builtin_set(const std::string& n) { return n == "Nat" || n == "Int" || n == "Real"; }
};

class Resolver {
 public:
  Resolver(const Scope& scope, SourcePos fallback) : scope_(scope), fallback_(fallback) {}

  ExprPtr resolve(const ExprPtr& e, std::vector<std::string>& bound) {
    switch (e->kind) {
      case ExprKind::ident: {
        for (auto it = bound.rbegin(); it != bound.rend(); ++it)
          if (*it == e->name) return with_kind(e, IdentKind::bound);
        if (Scope::is_builtin_set(e->name)) return with_kind(e, IdentKind::builtin_set);
        if (scope_.variables.count(e->name)) return with_kind(e, IdentKind::variable);
        if (scope_.constants.count(e->name)) return with_kind(e, IdentKind::constant);
        auto d = scope_.def_arity.find(e->name);
        if (d != scope_.def_arity.end()) {
          if (d->second != 0)
            throw ModuleError("operator '" + e->name + "' expects arguments", pos_of(e));
          return mk_op_app(e->name, {}, e->pos);
        }
        if (e->ident_kind == IdentKind::opaque) return e;
        throw ModuleError("undeclared identifier '" + e->name + "'", pos_of(e));
      }
      case ExprKind::op_app: {
        auto d = scope_.def_arity.find(e->name);
        if (d == scope_.def_arity.end())
          throw ModuleError("undefined operator '" + e->name + "'", pos_of(e));
        if (d->second != e->kids.size())
          throw ModuleError("operator '" + e->name + "' expects " + std::to_string(d->second) +
                                " argument(s)", pos_of(e));
        return rebuild(e, bound);
      }
      case ExprKind::sub_ref: {
        auto d = scope_.def_arity.find(e->name);
        if (d == scope_.def_arity.end())
          throw ModuleError("undefined operator '" + e->name + "' in subexpression reference",
                            pos_of(e));
        if (d->second != e->kids.size())
          throw ModuleError("operator '" + e->name + "' expects " + std::to_string(d->second) +
                                " argument(s)", pos_of(e));
        return rebuild(e, bound);
      }
      default:
        if (e->is_binder()) {
          Expr copy = *e;
          if (e->binder_bounded()) copy.kids[0] = resolve(e->kids[0], bound);
          bound.push_back(e->name);
          copy.kids[copy.kids.size() - 1] = resolve(e->binder_body(), bound);
          bound.pop_back();
          return mk_expr(std::move(copy));
        }
        return rebuild(e, bound);
    }
  }

 private:
  const Scope& scope_;
  SourcePos fallback_;

  SourcePos pos_of(const ExprPtr& e) const { return e->pos.line ? e->pos : fallback_; }

  static ExprPtr with_kind(const ExprPtr& e, IdentKind k) {
    Expr copy = *e;
    copy.ident_kind = k;
    return mk_expr(std::move(copy));
  }

  ExprPtr rebuild(const ExprPtr& e, std::vector<std::string>& bound) {
    Expr copy = *e;
    for (auto& k : copy.kids) k = resolve(k, bound);
    return mk_expr(std::move(copy));
  }
};

inline void flatten_into(const std::string& name, const std::map<std::string, ModuleAst>& library,
                         std::set<std::string>& visiting, std::set<std::string>& done,
                         ModuleAst& out, const ModuleAst* root) {
  if (done.count(name)) return;
  if (!visiting.insert(name).second)
    throw ModuleError("import cycle through module '" + name + "'");
  const ModuleAst* m = root && root->name == name ? root : nullptr;
  if (!m) {
    auto it = library.find(name);
    if (it == library.end()) throw ModuleError("unknown module '" + name + "'");
    m = &it->second;
  }
  for (const auto& dep : m->extends) flatten_into(dep, library, visiting, done, out, root);
  std::set<std::string> existing;
  for (const auto& c : out.constants) existing.insert(c);
  for (const auto& v : out.variables) existing.insert(v);
  for (const auto& d : out.definitions) existing.insert(d.name);
  for (const auto& t : out.theorems) existing.insert(t.name);
  auto add_name = [&](const std::string& n, SourcePos p) {
    if (existing.count(n))
      throw ModuleError("name '" + n + "' declared in more than one module", p);
  };
  for (const auto& c : m->constants) { add_name(c, m->pos); out.constants.push_back(c); }
  for (const auto& v : m->variables) { add_name(v, m->pos); out.variables.push_back(v); }
  for (const auto& d : m->definitions) { add_name(d.name, d.pos); out.definitions.push_back(d); }
  for (const auto& t : m->theorems) { add_name(t.name, t.pos); out.theorems.push_back(t); }
  visiting.erase(name);
  done.insert(name);
}

}  // namespace detail

// Checks the admitted temporal shape: Init /\ []Next => []Inv (or no box at
// all). Returns true when the statement is the boxed invariance form.
inline bool is_invariance_shape(const ExprPtr& s, ExprPtr* init = nullptr, ExprPtr* next = nullptr,
                                ExprPtr* inv = nullptr) {
  if (s->kind != ExprKind::implies) return false;
  const ExprPtr& lhs = s->kids[0];
  const ExprPtr& rhs = s->kids[1];
  if (rhs->kind != ExprKind::box) return false;
  if (lhs->kind != ExprKind::and_) return false;
  if (lhs->kids[1]->kind != ExprKind::box) return false;
  if (init) *init = lhs->kids[0];
  if (next) *next = lhs->kids[1]->kids[0];
  if (inv) *inv = rhs->kids[0];
  return true;
}

namespace detail {

inline bool contains_box(const ExprPtr& e) {
  if (e->kind == ExprKind::box) return true;
  for (const auto& k : e->kids)
    if (contains_box(k)) return true;
  return false;
}

inline void check_temporal_shape(const Theorem& t) {
  ExprPtr i, n, p;
  if (is_invariance_shape(t.statement, &i, &n, &p)) {
    if (contains_box(i) || contains_box(n) || contains_box(p))
      throw ModuleError("nested temporal operator in theorem '" + t.name + "'", t.pos);
    return;
  }
  if (contains_box(t.statement))
    throw ModuleError(
        "theorem '" + t.name + "' uses [] outside the supported shape Init /\\ []Next => []Inv",
        t.pos);
}

inline void check_no_box(const ExprPtr& e, const char* where) {
  if (contains_box(e)) throw ModuleError(std::string("[] is not allowed in ") + where, e->pos);
}

inline void resolve_proof(const ProofPtr& node, const Scope& scope, ProofPtr& out);

inline ProofPtr resolve_proof_node(const ProofNode& n, const Scope& scope) {
  ProofNode copy = n;
  if (copy.assertion) {
    check_no_box(copy.assertion, "proof step assertions");
    std::vector<std::string> bound;
    copy.assertion = detail::Resolver(scope, copy.pos).resolve(copy.assertion, bound);
  }
  if (copy.subproof) {
    ProofPtr sub;
    resolve_proof(copy.subproof, scope, sub);
    copy.subproof = sub;
  }
  for (auto& st : copy.steps) {
    ProofPtr r;
    resolve_proof(st, scope, r);
    st = r;
  }
  return mk_proof(std::move(copy));
}

inline void resolve_proof(const ProofPtr& node, const Scope& scope, ProofPtr& out) {
  out = node ? resolve_proof_node(*node, scope) : nullptr;
}

}  // namespace detail

// Flattens the transitive EXTENDS closure of `root` into a single module
// (dependencies first), then resolves every identifier. The result is
// self-contained: no EXTENDS remain.
inline ModuleAst flatten(const ModuleAst& root, const std::map<std::string, ModuleAst>& library) {
  ModuleAst flat;
  flat.name = root.name;
  flat.pos = root.pos;
  std::set<std::string> visiting, done;
  detail::flatten_into(root.name, library, visiting, done, flat, &root);

  detail::Scope scope;
  for (const auto& c : flat.constants) scope.constants.insert(c);
  for (const auto& v : flat.variables) scope.variables.insert(v);

  // definitions may reference declared parameters and previously listed
  // definitions only; this also rules out recursion
  for (auto& d : flat.definitions) {
    detail::Scope local = scope;
    for (const auto& p : d.params) {
      if (scope.constants.count(p) || scope.variables.count(p) || scope.def_arity.count(p))
        throw ModuleError("parameter '" + p + "' shadows a declaration", d.pos);
      local.constants.insert(p);
    }
    local.def_arity = scope.def_arity;
    std::vector<std::string> bound;
    detail::check_no_box(d.body, "definition bodies");
    d.body = detail::Resolver(local, d.pos).resolve(d.body, bound);
    scope.def_arity[d.name] = d.params.size();
  }
  for (auto& t : flat.theorems) {
    std::vector<std::string> bound;
    // resolve box shape transparently: resolve its operand expressions
    detail::check_temporal_shape(t);
    t.statement = detail::Resolver(scope, t.pos).resolve(t.statement, bound);
    ProofPtr resolved;
    detail::resolve_proof(t.proof, scope, resolved);
    t.proof = resolved;
  }
  return flat;
}

// The built-in standard module: pragma theorems that reroute backends when
// cited as facts. Their statements contribute nothing.
inline const ModuleAst& std_module() {
  static const ModuleAst m = [] {
    ModuleAst s;
    s.name = "Std";
    Theorem simple;
    simple.name = "SimpleArithmetic";
    simple.statement = mk_bool(true);
    s.theorems.push_back(simple);
    Theorem real;
    real.name = "RealArithmetic";
    real.statement = mk_bool(true);
    s.theorems.push_back(real);
    return s;
  }();
  return m;
}

}  // namespace mtp

#endif
