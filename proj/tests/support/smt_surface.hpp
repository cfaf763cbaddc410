// test support :: minimal SMT-LIB 2 surface checker
//
// Stands in for a solver front end when none is installed: balanced
// s-expressions, known command heads, declare-before-use in assertions.
#ifndef MTP_TESTS_SMT_SURFACE_HPP
#define MTP_TESTS_SMT_SURFACE_HPP

#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "mtp/smt.hpp"

namespace smt_surface {

struct SmtSurface {
  std::string error;
  std::set<std::string> declared;

  struct Sexp {
    std::string atom;
    std::vector<Sexp> kids;
    bool is_atom() const { return kids.empty() && !atom.empty(); }
  };

  bool parse(const std::string& s, size_t& i, Sexp& out) {
    while (i < s.size() && (isspace((unsigned char)s[i]) || s[i] == ';')) {
      if (s[i] == ';')
        while (i < s.size() && s[i] != '\n') i++;
      else
        i++;
    }
    if (i >= s.size()) return false;
    if (s[i] == '(') {
      i++;
      for (;;) {
        while (i < s.size() && isspace((unsigned char)s[i])) i++;
        if (i < s.size() && s[i] == ')') {
          i++;
          return true;
        }
        Sexp kid;
        if (!parse(s, i, kid)) {
          error = "unbalanced parenthesis";
          return false;
        }
        out.kids.push_back(std::move(kid));
      }
    }
    if (s[i] == ')') {
      error = "stray ')'";
      return false;
    }
    if (s[i] == '|') {
      size_t j = s.find('|', i + 1);
      if (j == std::string::npos) {
        error = "unterminated quoted symbol";
        return false;
      }
      out.atom = s.substr(i, j - i + 1);
      i = j + 1;
      return true;
    }
    size_t start = i;
    while (i < s.size() && !isspace((unsigned char)s[i]) && s[i] != '(' && s[i] != ')') i++;
    out.atom = s.substr(start, i - start);
    return true;
  }

  bool known_builtin(const std::string& a) {
    static const std::set<std::string> b = {"and", "or",  "not", "=>",  "=",    "<=", "<",
                                            ">=",  ">",   "+",   "-",   "*",    "ite", "true",
                                            "false", "forall", "exists", "Int", "Real", "Bool", "U"};
    if (b.count(a)) return true;
    if (!a.empty() && (isdigit((unsigned char)a[0]) || a[0] == '.')) return true;
    return false;
  }

  void check_term(const Sexp& e, std::set<std::string> bound) {
    if (e.is_atom()) {
      if (known_builtin(e.atom) || bound.count(e.atom) || declared.count(e.atom)) return;
      if (error.empty()) error = "undeclared symbol " + e.atom;
      return;
    }
    if (e.kids.empty()) {
      error = "empty application";
      return;
    }
    if (e.kids[0].is_atom() && (e.kids[0].atom == "forall" || e.kids[0].atom == "exists")) {
      if (e.kids.size() != 3) {
        error = "malformed quantifier";
        return;
      }
      for (const auto& binding : e.kids[1].kids)
        if (binding.kids.size() == 2) bound.insert(binding.kids[0].atom);
      check_term(e.kids[2], bound);
      return;
    }
    for (size_t i = 0; i < e.kids.size(); ++i) {
      if (i == 0 && e.kids[0].is_atom()) {
        if (!known_builtin(e.kids[0].atom) && !declared.count(e.kids[0].atom)) {
          if (error.empty()) error = "undeclared head " + e.kids[0].atom;
        }
        continue;
      }
      check_term(e.kids[i], bound);
    }
  }

  bool accept(const std::string& script) {
    size_t i = 0;
    bool saw_logic = false, saw_check = false;
    for (;;) {
      Sexp cmd;
      size_t before = i;
      if (!parse(script, i, cmd)) {
        if (!error.empty()) return false;
        if (before == i || i >= script.size()) break;
      }
      if (cmd.kids.empty()) {
        if (cmd.atom.empty()) break;
        error = "top-level atom";
        return false;
      }
      const std::string& head = cmd.kids[0].atom;
      if (head == "set-logic") {
        saw_logic = cmd.kids.size() == 2 && cmd.kids[1].atom == "AUFLIRA";
      } else if (head == "declare-sort") {
        declared.insert(cmd.kids[1].atom);
      } else if (head == "declare-fun") {
        if (cmd.kids.size() != 4) {
          error = "malformed declare-fun";
          return false;
        }
        declared.insert(cmd.kids[1].atom);
      } else if (head == "assert") {
        if (cmd.kids.size() != 2) {
          error = "malformed assert";
          return false;
        }
        check_term(cmd.kids[1], {});
        if (!error.empty()) return false;
      } else if (head == "check-sat") {
        saw_check = true;
      } else {
        error = "unknown command " + head;
        return false;
      }
    }
    if (!saw_logic) error = "missing (set-logic AUFLIRA)";
    if (!saw_check && error.empty()) error = "missing (check-sat)";
    return error.empty();
  }
};

inline bool script_well_formed(const mtp::SmtScript& s, std::string* why = nullptr) {
  SmtSurface surf;
  bool ok = surf.accept(s.text);
  if (!ok && why) *why = surf.error;
  return ok;
}

}  // namespace smt_surface

#endif
