// mtp :: recursive-descent parser for modules, expressions and proofs
#ifndef MTP_PARSER_HPP
#define MTP_PARSER_HPP

#include <set>
#include <string>
#include <vector>

#include "mtp/ast.hpp"
#include "mtp/lexer.hpp"

namespace mtp {

// Binding powers, loose to tight:
//   => (1, right)  \/ (2)  /\ (3)  ~ (4)  relational (5, non-assoc)
//   set ops (6)  + - (7)  * \div % (8)  prefix - and [] (9)  postfix ' [ ] ! (10)
// Relational operators bind tighter than the boolean connectives, so
// ~x = y reads as ~(x = y).
class Parser {
 public:
  explicit Parser(std::string src) : toks_(Lexer(std::move(src)).run()) {}

  ModuleAst parse_module() {
    ModuleAst m;
    expect(Tok::module_bar, "'----' module header");
    expect(Tok::kw_module, "MODULE");
    m.pos = peek().pos;
    m.name = expect_ident("module name");
    expect(Tok::module_bar, "'----' after module name");
    std::set<std::string> decl_names;
    auto declare = [&](const std::string& n, SourcePos p) {
      if (n == "Nat" || n == "Int" || n == "Real")
        throw ParseError("'" + n + "' is a reserved built-in set name", p);
      if (!decl_names.insert(n).second)
        throw ParseError("duplicate declaration of '" + n + "'", p);
    };
    while (peek().kind != Tok::module_end) {
      switch (peek().kind) {
        case Tok::kw_extends: {
          advance();
          ident_list(m.extends);
          break;
        }
        case Tok::kw_constant:
        case Tok::kw_constants: {
          advance();
          std::vector<std::string> ns;
          auto p = peek().pos;
          ident_list(ns);
          for (auto& n : ns) declare(n, p);
          m.constants.insert(m.constants.end(), ns.begin(), ns.end());
          break;
        }
        case Tok::kw_variable:
        case Tok::kw_variables: {
          advance();
          std::vector<std::string> ns;
          auto p = peek().pos;
          ident_list(ns);
          for (auto& n : ns) declare(n, p);
          m.variables.insert(m.variables.end(), ns.begin(), ns.end());
          break;
        }
        case Tok::kw_theorem: {
          advance();
          Theorem t;
          t.pos = peek().pos;
          t.name = expect_ident("theorem name");
          declare(t.name, t.pos);
          expect(Tok::defeq, "'==' after theorem name");
          t.statement = parse_expr(1);
          t.proof = parse_proof(0);
          m.theorems.push_back(std::move(t));
          break;
        }
        case Tok::ident: {
          OperatorDef d;
          d.pos = peek().pos;
          d.name = advance().text;
          declare(d.name, d.pos);
          if (peek().kind == Tok::lparen) {
            advance();
            std::set<std::string> seen;
            for (;;) {
              auto p = peek().pos;
              std::string param = expect_ident("parameter name");
              if (!seen.insert(param).second)
                throw ParseError("duplicate parameter '" + param + "'", p);
              d.params.push_back(std::move(param));
              if (peek().kind == Tok::comma) {
                advance();
                continue;
              }
              break;
            }
            expect(Tok::rparen, "')' after parameters");
          }
          expect(Tok::defeq, "'==' in definition");
          d.body = parse_expr(1);
          check_labels_unique(d.body);
          m.definitions.push_back(std::move(d));
          break;
        }
        default:
          throw ParseError("expected a declaration, definition or theorem", peek().pos);
      }
    }
    advance();  // module_end
    if (peek().kind != Tok::end) throw ParseError("trailing input after module end", peek().pos);
    return m;
  }

  ExprPtr parse_single_expr() {
    ExprPtr e = parse_expr(1);
    if (peek().kind != Tok::end) throw ParseError("trailing input after expression", peek().pos);
    return e;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek(size_t off = 0) const {
    size_t i = pos_ + off;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  Token advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) throw ParseError(std::string("expected ") + what, peek().pos);
    advance();
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::ident) throw ParseError(std::string("expected ") + what, peek().pos);
    return advance().text;
  }
  void ident_list(std::vector<std::string>& out) {
    out.push_back(expect_ident("identifier"));
    while (peek().kind == Tok::comma) {
      advance();
      out.push_back(expect_ident("identifier"));
    }
  }

  // ---- expressions ----

  static int binary_level(Tok k) {
    switch (k) {
      case Tok::op_implies: return 1;
      case Tok::op_or: return 2;
      case Tok::op_and: return 3;
      case Tok::op_eq: case Tok::op_neq: case Tok::op_le: case Tok::op_lt:
      case Tok::op_ge: case Tok::op_gt: case Tok::op_in: case Tok::op_notin:
      case Tok::op_subseteq: return 5;
      case Tok::op_union: case Tok::op_inter: case Tok::op_setminus: return 6;
      case Tok::op_plus: case Tok::op_minus: return 7;
      case Tok::op_star: case Tok::op_div: case Tok::op_mod: return 8;
      default: return -1;
    }
  }

  ExprPtr parse_expr(int min_level) {
    ExprPtr lhs = parse_unary(min_level);
    for (;;) {
      Tok k = peek().kind;
      int lvl = binary_level(k);
      if (lvl < min_level) return lhs;
      SourcePos p = peek().pos;
      advance();
      int rhs_min = (lvl == 1) ? 1 : (lvl == 5 ? 6 : lvl + 1);  // => right-assoc, relational non-assoc
      ExprPtr rhs = parse_expr(rhs_min);
      if (lvl == 5 && binary_level(peek().kind) == 5)
        throw ParseError("relational operators do not chain; parenthesize", peek().pos);
      lhs = combine(k, std::move(lhs), std::move(rhs), p);
    }
  }

  static ExprPtr combine(Tok k, ExprPtr a, ExprPtr b, SourcePos p) {
    auto node = [&](ExprKind kind, ExprPtr x, ExprPtr y) {
      return mk_node(kind, {std::move(x), std::move(y)}, p);
    };
    switch (k) {
      case Tok::op_implies: return node(ExprKind::implies, std::move(a), std::move(b));
      case Tok::op_or: return node(ExprKind::or_, std::move(a), std::move(b));
      case Tok::op_and: return node(ExprKind::and_, std::move(a), std::move(b));
      case Tok::op_eq: return node(ExprKind::eq, std::move(a), std::move(b));
      case Tok::op_neq: return mk_node(ExprKind::not_, {node(ExprKind::eq, std::move(a), std::move(b))}, p);
      case Tok::op_le: return node(ExprKind::le, std::move(a), std::move(b));
      case Tok::op_lt: return node(ExprKind::lt, std::move(a), std::move(b));
      case Tok::op_ge: return node(ExprKind::le, std::move(b), std::move(a));
      case Tok::op_gt: return node(ExprKind::lt, std::move(b), std::move(a));
      case Tok::op_in: return node(ExprKind::in_set, std::move(a), std::move(b));
      case Tok::op_notin:
        return mk_node(ExprKind::not_, {node(ExprKind::in_set, std::move(a), std::move(b))}, p);
      case Tok::op_subseteq: return node(ExprKind::subseteq, std::move(a), std::move(b));
      case Tok::op_union: return node(ExprKind::union_, std::move(a), std::move(b));
      case Tok::op_inter: return node(ExprKind::inter, std::move(a), std::move(b));
      case Tok::op_setminus: return node(ExprKind::set_minus, std::move(a), std::move(b));
      case Tok::op_plus: return node(ExprKind::add, std::move(a), std::move(b));
      case Tok::op_minus: return node(ExprKind::sub, std::move(a), std::move(b));
      case Tok::op_star: return node(ExprKind::mul, std::move(a), std::move(b));
      case Tok::op_div: return node(ExprKind::div_, std::move(a), std::move(b));
      case Tok::op_mod: return node(ExprKind::mod_, std::move(a), std::move(b));
      default: throw ParseError("internal: not a binary operator", p);
    }
  }

  ExprPtr parse_unary(int min_level) {
    const Token& t = peek();
    if (t.kind == Tok::op_not && min_level <= 4) {
      SourcePos p = advance().pos;
      return mk_node(ExprKind::not_, {parse_expr(4)}, p);
    }
    if (t.kind == Tok::op_minus) {
      SourcePos p = advance().pos;
      ExprPtr operand = parse_unary(9);
      if (operand->kind == ExprKind::int_lit) return mk_int(-operand->num, p);
      if (operand->kind == ExprKind::real_lit) return mk_real(-operand->num, operand->dec_places, p);
      return mk_node(ExprKind::sub, {mk_int(0, p), std::move(operand)}, p);
    }
    if (t.kind == Tok::box) {
      SourcePos p = advance().pos;
      return mk_node(ExprKind::box, {parse_postfix()}, p);
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    ExprPtr e = parse_primary();
    for (;;) {
      if (peek().kind == Tok::prime_mark) {
        SourcePos p = advance().pos;
        e = mk_prime(std::move(e), p);
        continue;
      }
      if (peek().kind == Tok::lbracket) {
        SourcePos p = advance().pos;
        ExprPtr arg = parse_expr(1);
        expect(Tok::rbracket, "']' after function argument");
        e = mk_node(ExprKind::fcn_app, {std::move(e), std::move(arg)}, p);
        continue;
      }
      if (peek().kind == Tok::bang) {
        e = parse_sub_ref(std::move(e));
        continue;
      }
      return e;
    }
  }

  ExprPtr parse_sub_ref(ExprPtr base) {
    SourcePos p = peek().pos;
    if (base->kind != ExprKind::op_app && base->kind != ExprKind::ident)
      throw ParseError("subexpression reference requires a named operator", p);
    Expr r;
    r.kind = ExprKind::sub_ref;
    r.name = base->name;
    if (base->kind == ExprKind::op_app) r.kids = base->kids;
    r.pos = base->pos;
    while (peek().kind == Tok::bang) {
      advance();
      PathSeg seg;
      if (peek().kind == Tok::int_lit) {
        Token n = advance();
        seg.index = (long)n.ival;
        if (seg.index < 1) throw ParseError("positional reference must be >= 1", n.pos);
      } else if (peek().kind == Tok::ident) {
        seg.is_label = true;
        seg.name = advance().text;
      } else {
        throw ParseError("expected position or label after '!'", peek().pos);
      }
      r.path.push_back(std::move(seg));
    }
    return mk_expr(std::move(r));
  }

  ExprPtr parse_primary() {
    Token t = peek();
    switch (t.kind) {
      case Tok::int_lit: advance(); return mk_int(t.ival, t.pos);
      case Tok::real_lit: advance(); return mk_real(t.ival, t.dec_places, t.pos);
      case Tok::str_lit: advance(); return mk_str(t.text, t.pos);
      case Tok::kw_true: advance(); return mk_bool(true, t.pos);
      case Tok::kw_false: advance(); return mk_bool(false, t.pos);
      case Tok::kw_boolean: {
        advance();
        return mk_node(ExprKind::set_enum, {mk_bool(true, t.pos), mk_bool(false, t.pos)}, t.pos);
      }
      case Tok::lparen: {
        advance();
        ExprPtr e = parse_expr(1);
        expect(Tok::rparen, "')'");
        return e;
      }
      case Tok::lbrace: {
        advance();
        std::vector<ExprPtr> elems;
        if (peek().kind != Tok::rbrace) {
          elems.push_back(parse_expr(1));
          while (peek().kind == Tok::comma) {
            advance();
            elems.push_back(parse_expr(1));
          }
        }
        expect(Tok::rbrace, "'}'");
        return mk_node(ExprKind::set_enum, std::move(elems), t.pos);
      }
      case Tok::ltuple: {
        advance();
        std::vector<ExprPtr> elems;
        if (peek().kind != Tok::rtuple) {
          elems.push_back(parse_expr(1));
          while (peek().kind == Tok::comma) {
            advance();
            elems.push_back(parse_expr(1));
          }
        }
        expect(Tok::rtuple, "'>>'");
        return mk_node(ExprKind::tuple, std::move(elems), t.pos);
      }
      case Tok::lbracket: {
        advance();
        std::string var = expect_ident("bound variable in function literal");
        expect(Tok::op_in, "'\\in' in function literal");
        ExprPtr dom = parse_expr(1);
        expect(Tok::maps_to, "'|->'");
        ExprPtr body = parse_expr(1);
        expect(Tok::rbracket, "']'");
        return mk_binder(ExprKind::fcn_lit, std::move(var), std::move(dom), std::move(body), t.pos);
      }
      case Tok::op_forall:
      case Tok::op_exists: {
        advance();
        ExprKind k = t.kind == Tok::op_forall ? ExprKind::forall : ExprKind::exists;
        std::vector<std::string> vars;
        ident_list(vars);
        ExprPtr bound;
        if (peek().kind == Tok::op_in) {
          advance();
          bound = parse_expr(6);
        }
        expect(Tok::colon, "':' after quantifier binder");
        ExprPtr body = parse_expr(1);
        for (auto it = vars.rbegin(); it != vars.rend(); ++it)
          body = mk_binder(k, *it, bound, std::move(body), t.pos);
        return body;
      }
      case Tok::kw_choose: {
        advance();
        std::string var = expect_ident("bound variable after CHOOSE");
        ExprPtr bound;
        if (peek().kind == Tok::op_in) {
          advance();
          bound = parse_expr(6);
        }
        expect(Tok::colon, "':' after CHOOSE binder");
        ExprPtr body = parse_expr(1);
        return mk_binder(ExprKind::choose, std::move(var), std::move(bound), std::move(body), t.pos);
      }
      case Tok::kw_if: {
        advance();
        ExprPtr c = parse_expr(1);
        expect(Tok::kw_then, "THEN");
        ExprPtr a = parse_expr(1);
        expect(Tok::kw_else, "ELSE");
        ExprPtr b = parse_expr(1);
        return mk_node(ExprKind::if_, {std::move(c), std::move(a), std::move(b)}, t.pos);
      }
      case Tok::kw_case: {
        advance();
        Expr e;
        e.kind = ExprKind::case_;
        e.pos = t.pos;
        for (;;) {
          if (peek().kind == Tok::kw_other) {
            advance();
            expect(Tok::arrow, "'->' after OTHER");
            e.kids.push_back(parse_expr(1));
            e.has_other = true;
            break;
          }
          ExprPtr guard = parse_expr(1);
          expect(Tok::arrow, "'->' in CASE arm");
          ExprPtr val = parse_expr(1);
          e.kids.push_back(std::move(guard));
          e.kids.push_back(std::move(val));
          if (peek().kind == Tok::box) {
            advance();
            continue;
          }
          break;
        }
        if (e.kids.empty()) throw ParseError("CASE needs at least one arm", t.pos);
        return mk_expr(std::move(e));
      }
      case Tok::ident: {
        advance();
        if (peek().kind == Tok::dcolon) {
          advance();
          expect(Tok::lparen, "'(' after label '::'");
          ExprPtr inner = parse_expr(1);
          expect(Tok::rparen, "')' closing labelled expression");
          return mk_label(t.text, std::move(inner), t.pos);
        }
        if (peek().kind == Tok::lparen) {
          advance();
          std::vector<ExprPtr> args;
          args.push_back(parse_expr(1));
          while (peek().kind == Tok::comma) {
            advance();
            args.push_back(parse_expr(1));
          }
          expect(Tok::rparen, "')' after arguments");
          return mk_op_app(t.text, std::move(args), t.pos);
        }
        return mk_ident(t.text, IdentKind::unresolved, t.pos);
      }
      default:
        throw ParseError("expected an expression", t.pos);
    }
  }

  // ---- proofs ----

  // Parses the proof attached to a step at `parent_level` (0 = theorem).
  // Returns null when no proof follows.
  ProofPtr parse_proof(int parent_level) {
    switch (peek().kind) {
      case Tok::kw_by:
      case Tok::kw_obvious:
      case Tok::kw_omitted:
        return parse_leaf();
      case Tok::step_label:
        if (peek().step_dotted && peek().step_level > parent_level)
          return parse_sequence(peek().step_level);
        return nullptr;
      default:
        return nullptr;
    }
  }

  ProofPtr parse_leaf() {
    Token t = advance();
    ProofNode n;
    n.pos = t.pos;
    if (t.kind == Tok::kw_obvious) {
      n.kind = ProofKind::leaf_obvious;
      return mk_proof(std::move(n));
    }
    if (t.kind == Tok::kw_omitted) {
      n.kind = ProofKind::leaf_omitted;
      return mk_proof(std::move(n));
    }
    n.kind = ProofKind::leaf_by;
    parse_fact_clause(n);
    return mk_proof(std::move(n));
  }

  void parse_fact_clause(ProofNode& n) {
    // facts first (may be empty when BY goes straight to DEF), then DEF names
    if (peek().kind != Tok::kw_def) {
      for (;;) {
        n.facts.push_back(parse_fact_ref());
        if (peek().kind == Tok::comma) {
          advance();
          continue;
        }
        break;
      }
    }
    if (peek().kind == Tok::kw_def) {
      advance();
      ident_list(n.defs);
    }
  }

  FactRef parse_fact_ref() {
    FactRef f;
    f.pos = peek().pos;
    if (peek().kind == Tok::step_label) {
      Token t = advance();
      f.is_step = true;
      f.level = t.step_level;
      f.name = t.text;
      return f;
    }
    f.name = expect_ident("fact reference");
    return f;
  }

  ProofPtr parse_sequence(int level) {
    ProofNode seq;
    seq.kind = ProofKind::sequence;
    seq.pos = peek().pos;
    std::set<std::string> labels;
    bool saw_qed = false;
    while (peek().kind == Tok::step_label && peek().step_dotted && peek().step_level == level) {
      if (saw_qed) throw ParseError("step after QED at the same level", peek().pos);
      ProofPtr st = parse_step(level, labels);
      saw_qed = st->kind == ProofKind::qed_step;
      seq.steps.push_back(std::move(st));
    }
    if (!saw_qed) throw ParseError("proof level must end with a QED step", peek().pos);
    return mk_proof(std::move(seq));
  }

  ProofPtr parse_step(int level, std::set<std::string>& labels) {
    Token lbl = advance();
    if (!labels.insert(lbl.text).second)
      throw ParseError("duplicate step label <" + std::to_string(level) + ">" + lbl.text, lbl.pos);
    ProofNode n;
    n.level = level;
    n.label = lbl.text;
    n.pos = lbl.pos;
    if (peek().kind == Tok::kw_use) {
      advance();
      n.kind = ProofKind::use_step;
      parse_fact_clause(n);
      return mk_proof(std::move(n));
    }
    if (peek().kind == Tok::kw_qed) {
      advance();
      n.kind = ProofKind::qed_step;
      n.subproof = parse_proof(level);
      return mk_proof(std::move(n));
    }
    n.kind = ProofKind::assert_step;
    n.assertion = parse_expr(1);
    n.subproof = parse_proof(level);
    return mk_proof(std::move(n));
  }

  // labels must be unique within one definition body
  void check_labels_unique(const ExprPtr& body) {
    std::set<std::string> seen;
    walk_labels(body, seen);
  }
  static void walk_labels(const ExprPtr& e, std::set<std::string>& seen) {
    if (e->kind == ExprKind::label && !seen.insert(e->name).second)
      throw ParseError("duplicate label '" + e->name + "' in definition body", e->pos);
    for (const auto& k : e->kids) walk_labels(k, seen);
  }
};

inline ModuleAst parse_module(const std::string& source) { return Parser(source).parse_module(); }
inline ExprPtr parse_expr_text(const std::string& source) { return Parser(source).parse_single_expr(); }

}  // namespace mtp

#endif
