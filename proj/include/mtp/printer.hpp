// mtp :: canonical pretty-printer
//
// The canonical printed form is a contract: it is the input to obligation
// fingerprints and to hashing of hidden applications, and it must re-parse
// to a structurally equal expression.
#ifndef MTP_PRINTER_HPP
#define MTP_PRINTER_HPP

#include <string>

#include "mtp/ast.hpp"

namespace mtp {

namespace detail {

// Mirrors the parser's binding powers; "open" forms (quantifiers, CHOOSE,
// IF, CASE) are level 0 and get parenthesized in any operand position.
inline int print_level(const Expr& e) {
  switch (e.kind) {
    case ExprKind::implies: return 1;
    case ExprKind::or_: return 2;
    case ExprKind::and_: return 3;
    case ExprKind::not_: return 4;
    case ExprKind::eq:
    case ExprKind::in_set:
    case ExprKind::le:
    case ExprKind::lt:
    case ExprKind::subseteq: return 5;
    case ExprKind::union_:
    case ExprKind::inter:
    case ExprKind::set_minus: return 6;
    case ExprKind::add:
    case ExprKind::sub: return 7;
    case ExprKind::mul:
    case ExprKind::div_:
    case ExprKind::mod_: return 8;
    case ExprKind::box: return 9;
    case ExprKind::forall:
    case ExprKind::exists:
    case ExprKind::choose:
    case ExprKind::if_:
    case ExprKind::case_: return 0;
    default: return 10;  // primaries and postfix forms
  }
}

inline const char* binop_text(ExprKind k) {
  switch (k) {
    case ExprKind::implies: return "=>";
    case ExprKind::or_: return "\\/";
    case ExprKind::and_: return "/\\";
    case ExprKind::eq: return "=";
    case ExprKind::in_set: return "\\in";
    case ExprKind::le: return "<=";
    case ExprKind::lt: return "<";
    case ExprKind::subseteq: return "\\subseteq";
    case ExprKind::union_: return "\\cup";
    case ExprKind::inter: return "\\cap";
    case ExprKind::set_minus: return "\\";
    case ExprKind::add: return "+";
    case ExprKind::sub: return "-";
    case ExprKind::mul: return "*";
    case ExprKind::div_: return "\\div";
    case ExprKind::mod_: return "%";
    default: return "?";
  }
}

void print_rec(std::string& os, const Expr& e, int min_level);

inline void print_list(std::string& os, const std::vector<ExprPtr>& es, size_t from = 0) {
  for (size_t i = from; i < es.size(); ++i) {
    if (i > from) os += ", ";
    print_rec(os, *es[i], 0);
  }
}

inline void print_binary(std::string& os, const Expr& e, int lvl, bool right_assoc) {
  print_rec(os, *e.kids[0], right_assoc ? lvl + 1 : lvl);
  os += ' ';
  os += binop_text(e.kind);
  os += ' ';
  print_rec(os, *e.kids[1], right_assoc ? lvl : lvl + 1);
}

inline std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void print_rec(std::string& os, const Expr& e, int min_level) {
  int lvl = print_level(e);
  if (lvl < min_level) {
    os += '(';
    print_rec(os, e, 0);
    os += ')';
    return;
  }
  switch (e.kind) {
    case ExprKind::ident: os += e.name; return;
    case ExprKind::op_app:
      os += e.name;
      if (!e.kids.empty()) {
        os += '(';
        print_list(os, e.kids);
        os += ')';
      }
      return;
    case ExprKind::sub_ref:
      os += e.name;
      if (!e.kids.empty()) {
        os += '(';
        print_list(os, e.kids);
        os += ')';
      }
      for (const auto& seg : e.path) {
        os += '!';
        if (seg.is_label) os += seg.name;
        else os += std::to_string(seg.index);
      }
      return;
    case ExprKind::int_lit: os += e.num.str(); return;
    case ExprKind::real_lit: {
      Int n = e.num < 0 ? Int(-e.num) : e.num;
      std::string digits = n.str();
      while ((int)digits.size() <= e.dec_places) digits.insert(digits.begin(), '0');
      digits.insert(digits.size() - e.dec_places, ".");
      if (e.num < 0) os += '-';
      os += digits;
      return;
    }
    case ExprKind::str_lit: os += quote_string(e.name); return;
    case ExprKind::bool_lit: os += (e.bval ? "TRUE" : "FALSE"); return;
    case ExprKind::set_enum:
      os += '{';
      print_list(os, e.kids);
      os += '}';
      return;
    case ExprKind::tuple:
      os += "<<";
      print_list(os, e.kids);
      os += ">>";
      return;
    case ExprKind::fcn_lit:
      os += '[';
      os += e.name;
      os += " \\in ";
      print_rec(os, *e.kids[0], 0);
      os += " |-> ";
      print_rec(os, *e.kids[1], 0);
      os += ']';
      return;
    case ExprKind::fcn_app:
      print_rec(os, *e.kids[0], 10);
      os += '[';
      print_rec(os, *e.kids[1], 0);
      os += ']';
      return;
    case ExprKind::not_:
      os += '~';
      print_rec(os, *e.kids[0], 4);
      return;
    case ExprKind::prime:
      print_rec(os, *e.kids[0], 10);
      os += '\'';
      return;
    case ExprKind::label:
      os += e.name;
      os += "::(";
      print_rec(os, *e.kids[0], 0);
      os += ')';
      return;
    case ExprKind::box:
      os += "[]";
      print_rec(os, *e.kids[0], 10);
      return;
    case ExprKind::forall:
    case ExprKind::exists:
    case ExprKind::choose:
      os += (e.kind == ExprKind::forall ? "\\A " : e.kind == ExprKind::exists ? "\\E " : "CHOOSE ");
      os += e.name;
      if (e.binder_bounded()) {
        os += " \\in ";
        print_rec(os, *e.binder_bound(), 6);
      }
      os += ": ";
      print_rec(os, *e.binder_body(), 0);
      return;
    case ExprKind::if_:
      os += "IF ";
      print_rec(os, *e.kids[0], 0);
      os += " THEN ";
      print_rec(os, *e.kids[1], 0);
      os += " ELSE ";
      print_rec(os, *e.kids[2], 0);
      return;
    case ExprKind::case_: {
      // arm level 1: a nested CASE would capture the following [] separator
      os += "CASE ";
      size_t pairs = e.kids.size() / 2;
      for (size_t i = 0; i < pairs; ++i) {
        if (i > 0) os += " [] ";
        print_rec(os, *e.kids[2 * i], 1);
        os += " -> ";
        print_rec(os, *e.kids[2 * i + 1], 1);
      }
      if (e.has_other) {
        if (pairs > 0) os += " [] ";
        os += "OTHER -> ";
        print_rec(os, *e.kids.back(), 1);
      }
      return;
    }
    case ExprKind::implies:
      print_binary(os, e, lvl, /*right_assoc=*/true);
      return;
    case ExprKind::eq:
    case ExprKind::in_set:
    case ExprKind::le:
    case ExprKind::lt:
    case ExprKind::subseteq:
      // non-associative: both operands one level up
      print_rec(os, *e.kids[0], lvl + 1);
      os += ' ';
      os += binop_text(e.kind);
      os += ' ';
      print_rec(os, *e.kids[1], lvl + 1);
      return;
    default:
      print_binary(os, e, lvl, /*right_assoc=*/false);
      return;
  }
}

}  // namespace detail

inline std::string print_expr(const ExprPtr& e) {
  std::string os;
  os.reserve(64);
  detail::print_rec(os, *e, 0);
  return os;
}

inline std::string print_expr(const Expr& e) {
  std::string os;
  os.reserve(64);
  detail::print_rec(os, e, 0);
  return os;
}

}  // namespace mtp

#endif
