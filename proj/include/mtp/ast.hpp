// mtp :: abstract syntax for the mini specification/proof language
#ifndef MTP_AST_HPP
#define MTP_AST_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mtp/diag.hpp"
#include "mtp/ints.hpp"

namespace mtp {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind : unsigned char {
  ident,     // constant / variable / bound / builtin-set reference
  op_app,    // user-defined operator application (possibly 0-ary)
  sub_ref,   // subexpression reference O(args)!path — resolved away before proving
  int_lit,
  real_lit,
  str_lit,
  bool_lit,
  set_enum,  // {e1, ..., en}
  tuple,     // <<e1, ..., en>>
  fcn_lit,   // [x \in S |-> e]
  fcn_app,   // f[e]
  eq,
  in_set,
  and_,
  or_,
  not_,
  implies,
  forall,    // \A x : body  or  \A x \in S : body
  exists,
  choose,    // CHOOSE x : body  or  CHOOSE x \in S : body
  case_,     // CASE p1 -> e1 [] ... [] OTHER -> e
  if_,       // IF c THEN a ELSE b
  add,
  sub,
  mul,
  div_,      // \div
  mod_,      // %
  le,
  lt,
  union_,
  inter,
  set_minus,
  subseteq,
  prime,     // e'
  label,     // l::(e)
  box        // []e — theorem statements only
};

enum class IdentKind : unsigned char {
  unresolved,
  constant,
  variable,
  bound,
  builtin_set,  // Nat, Int, Real
  opaque        // engine-introduced atoms (hashed applications etc.)
};

struct PathSeg {
  bool is_label = false;
  long index = 0;     // positional, 1-based
  std::string name;   // label
};

struct Expr {
  ExprKind kind;
  IdentKind ident_kind = IdentKind::unresolved;
  bool bval = false;           // bool_lit
  bool has_other = false;      // case_: trailing OTHER arm present
  Int num;                     // int_lit; real_lit numerator
  int dec_places = 0;          // real_lit: num / 10^dec_places
  std::string name;            // ident, op_app, binder variable, label, str_lit, sub_ref target
  std::vector<ExprPtr> kids;
  std::vector<PathSeg> path;   // sub_ref
  SourcePos pos;

  // caches, valid once identifier kinds are resolved
  bool cache_has_prime = false;
  bool cache_has_var = false;

  bool is_binder() const {
    return kind == ExprKind::forall || kind == ExprKind::exists || kind == ExprKind::choose ||
           kind == ExprKind::fcn_lit;
  }
  bool binder_bounded() const { return kids.size() == 2; }
  const ExprPtr& binder_bound() const { return kids[0]; }
  const ExprPtr& binder_body() const { return kids[kids.size() - 1]; }
};

namespace detail {
inline void fold_caches(Expr& e) {
  if (e.kind == ExprKind::prime) e.cache_has_prime = true;
  if (e.kind == ExprKind::ident && e.ident_kind == IdentKind::variable) e.cache_has_var = true;
  for (const auto& k : e.kids) {
    e.cache_has_prime = e.cache_has_prime || k->cache_has_prime;
    e.cache_has_var = e.cache_has_var || k->cache_has_var;
  }
}
}  // namespace detail

inline ExprPtr mk_expr(Expr e) {
  detail::fold_caches(e);
  return std::make_shared<const Expr>(std::move(e));
}

inline ExprPtr mk_node(ExprKind k, std::vector<ExprPtr> kids, SourcePos pos = {}) {
  Expr e;
  e.kind = k;
  e.kids = std::move(kids);
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_ident(std::string name, IdentKind ik = IdentKind::unresolved, SourcePos pos = {}) {
  Expr e;
  e.kind = ExprKind::ident;
  e.ident_kind = ik;
  e.name = std::move(name);
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_op_app(std::string name, std::vector<ExprPtr> args, SourcePos pos = {}) {
  Expr e;
  e.kind = ExprKind::op_app;
  e.name = std::move(name);
  e.kids = std::move(args);
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_int(Int v, SourcePos pos = {}) {
  Expr e;
  e.kind = ExprKind::int_lit;
  e.num = std::move(v);
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_real(Int numerator, int dec_places, SourcePos pos = {}) {
  // normalize: strip trailing zeros but keep at least one decimal place
  while (dec_places > 1 && numerator % 10 == 0) {
    numerator /= 10;
    dec_places -= 1;
  }
  Expr e;
  e.kind = ExprKind::real_lit;
  e.num = std::move(numerator);
  e.dec_places = dec_places;
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_str(std::string s, SourcePos pos = {}) {
  Expr e;
  e.kind = ExprKind::str_lit;
  e.name = std::move(s);
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_bool(bool b, SourcePos pos = {}) {
  Expr e;
  e.kind = ExprKind::bool_lit;
  e.bval = b;
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_binder(ExprKind k, std::string var, ExprPtr bound /*nullable*/, ExprPtr body,
                         SourcePos pos = {}) {
  Expr e;
  e.kind = k;
  e.name = std::move(var);
  if (bound) e.kids.push_back(std::move(bound));
  e.kids.push_back(std::move(body));
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_label(std::string l, ExprPtr inner, SourcePos pos = {}) {
  Expr e;
  e.kind = ExprKind::label;
  e.name = std::move(l);
  e.kids.push_back(std::move(inner));
  e.pos = pos;
  return mk_expr(std::move(e));
}

inline ExprPtr mk_not(ExprPtr a) { return mk_node(ExprKind::not_, {std::move(a)}); }
inline ExprPtr mk_and(ExprPtr a, ExprPtr b) { return mk_node(ExprKind::and_, {std::move(a), std::move(b)}); }
inline ExprPtr mk_or(ExprPtr a, ExprPtr b) { return mk_node(ExprKind::or_, {std::move(a), std::move(b)}); }
inline ExprPtr mk_implies(ExprPtr a, ExprPtr b) { return mk_node(ExprKind::implies, {std::move(a), std::move(b)}); }
inline ExprPtr mk_eq(ExprPtr a, ExprPtr b) { return mk_node(ExprKind::eq, {std::move(a), std::move(b)}); }
inline ExprPtr mk_in(ExprPtr a, ExprPtr b) { return mk_node(ExprKind::in_set, {std::move(a), std::move(b)}); }
inline ExprPtr mk_prime(ExprPtr a, SourcePos pos = {}) {
  if (a->cache_has_prime) throw ParseError("double priming is not allowed", pos.line ? pos : a->pos);
  return mk_node(ExprKind::prime, {std::move(a)}, pos);
}

// Structural equality. Identifier kinds are annotations, not identity:
// two idents are equal iff their names are.
inline bool expr_eq(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::int_lit: return a->num == b->num;
    case ExprKind::real_lit: return a->num == b->num && a->dec_places == b->dec_places;
    case ExprKind::bool_lit: return a->bval == b->bval;
    case ExprKind::str_lit: return a->name == b->name;
    default: break;
  }
  if (a->name != b->name) return false;
  if (a->has_other != b->has_other) return false;
  if (a->kids.size() != b->kids.size()) return false;
  if (a->path.size() != b->path.size()) return false;
  for (size_t i = 0; i < a->path.size(); ++i) {
    const PathSeg &pa = a->path[i], &pb = b->path[i];
    if (pa.is_label != pb.is_label || pa.index != pb.index || pa.name != pb.name) return false;
  }
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_eq(a->kids[i], b->kids[i])) return false;
  return true;
}

inline size_t expr_size(const ExprPtr& e) {
  size_t n = 1;
  for (const auto& k : e->kids) n += expr_size(k);
  return n;
}

// ---------------------------------------------------------------------------
// Modules, definitions, theorems, proofs

enum class TriState : unsigned char { yes, no, unknown };

struct OperatorDef {
  std::string name;
  std::vector<std::string> params;
  ExprPtr body;
  TriState substitutive = TriState::unknown;  // computed after flattening
  bool rigid = false;                         // state-free body; computed after flattening
  bool usable_by_default = false;
  SourcePos pos;
};

enum class ProofKind : unsigned char {
  leaf_by,
  leaf_obvious,
  leaf_omitted,
  use_step,
  assert_step,
  qed_step,
  sequence
};

struct FactRef {
  bool is_step = false;  // <n>name citation
  int level = 0;
  std::string name;
  SourcePos pos;
};

struct ProofNode;
using ProofPtr = std::shared_ptr<const ProofNode>;

struct ProofNode {
  ProofKind kind;
  // leaf_by / use_step
  std::vector<FactRef> facts;
  std::vector<std::string> defs;
  // assert_step / qed_step / use_step
  int level = 0;
  std::string label;
  ExprPtr assertion;   // assert_step only
  ProofPtr subproof;   // may be null: step without a proof
  // sequence
  std::vector<ProofPtr> steps;
  SourcePos pos;
};

inline ProofPtr mk_proof(ProofNode n) { return std::make_shared<const ProofNode>(std::move(n)); }

struct Theorem {
  std::string name;
  ExprPtr statement;
  ProofPtr proof;  // may be null
  SourcePos pos;
};

struct ModuleAst {
  std::string name;
  std::vector<std::string> extends;
  std::vector<std::string> constants;
  std::vector<std::string> variables;
  std::vector<OperatorDef> definitions;
  std::vector<Theorem> theorems;
  SourcePos pos;

  const OperatorDef* find_def(const std::string& n) const {
    for (const auto& d : definitions)
      if (d.name == n) return &d;
    return nullptr;
  }
  const Theorem* find_theorem(const std::string& n) const {
    for (const auto& t : theorems)
      if (t.name == n) return &t;
    return nullptr;
  }
};

}  // namespace mtp

#endif
