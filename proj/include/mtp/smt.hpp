// mtp :: SMT-LIB 2 backend (AUFLIRA)
//
// Obligations are rewritten into AUFLIRA after a highly conservative sort
// detection pass: integer/real/boolean sorts are assigned only when forced
// by a membership bound (x \in Nat / Int / Real) or by a literal's position;
// everything else stays in one opaque uninterpreted sort. Hypotheses outside
// the fragment are omitted (sound for validity claims) and listed; an
// inexpressible goal makes the backend not-applicable. `sat` is only ever a
// hint, never a refutation, because omission breaks countermodels.
#ifndef MTP_SMT_HPP
#define MTP_SMT_HPP

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtp/obligation.hpp"
#include "mtp/printer.hpp"

namespace mtp {

enum class SmtSort : unsigned char { integer, real, boolean, opaque, conflict };

inline const char* smt_sort_name(SmtSort s) {
  switch (s) {
    case SmtSort::integer: return "Int";
    case SmtSort::real: return "Real";
    case SmtSort::boolean: return "Bool";
    default: return "U";
  }
}

enum class SortOrigin : unsigned char { bound_annotation, inferred, defaulted };

struct SortInfo {
  SmtSort sort = SmtSort::opaque;
  SortOrigin origin = SortOrigin::defaulted;
};

struct FuncSig {
  std::vector<SortInfo> args;
  SortInfo result;
  bool conflict = false;
};

struct SortAssignment {
  std::map<std::string, SortInfo> symbols;    // canonical print of 0-ary symbol
  std::map<std::string, FuncSig> functions;   // operator name -> signature
  std::set<std::string> nat_bounded;          // symbols needing a >= 0 side assertion

  SmtSort sort_of(const std::string& sym) const {
    auto it = symbols.find(sym);
    return it == symbols.end() ? SmtSort::opaque : it->second.sort;
  }
};

struct SmtScript {
  bool applicable = false;
  std::string text;                     // full SMT-LIB 2 script
  std::vector<std::string> omitted;     // omitted hypothesis names
};

namespace smt_detail {

inline bool is_symbol_leaf(const ExprPtr& e) {
  if (e->kind == ExprKind::ident) return e->ident_kind != IdentKind::builtin_set;
  if (e->kind == ExprKind::prime && e->kids[0]->kind == ExprKind::ident) return true;
  return false;
}

inline bool builtin_set_named(const ExprPtr& e, const char* n) {
  return e->kind == ExprKind::ident && e->name == n;
}

// ---- sort detection ----

class SortDetector {
 public:
  SortAssignment out;

  void scan_formula(const ExprPtr& e, const std::set<std::string>& bound_vars) {
    switch (e->kind) {
      case ExprKind::and_:
      case ExprKind::or_:
      case ExprKind::not_:
      case ExprKind::implies:
        for (const auto& k : e->kids) scan_formula(k, bound_vars);
        return;
      case ExprKind::if_:
        scan_formula(e->kids[0], bound_vars);
        scan_formula(e->kids[1], bound_vars);
        scan_formula(e->kids[2], bound_vars);
        return;
      case ExprKind::forall:
      case ExprKind::exists: {
        if (e->binder_bounded()) scan_bound(e->binder_bound(), e->name, bound_vars);
        std::set<std::string> inner = bound_vars;
        inner.insert(e->name);
        scan_formula(e->binder_body(), inner);
        return;
      }
      case ExprKind::in_set:
        scan_membership(e, bound_vars);
        return;
      case ExprKind::eq:
      case ExprKind::le:
      case ExprKind::lt:
        scan_atom(e, bound_vars);
        return;
      default:
        // formula-position symbol: boolean by position
        if (is_symbol_leaf(e) && !bound_vars.count(symbol_key(e)))
          assign(symbol_key(e), SmtSort::boolean, SortOrigin::inferred);
        if (e->kind == ExprKind::op_app) note_function(e, SmtSort::boolean, bound_vars);
        return;
    }
  }

 private:
  static std::string symbol_key(const ExprPtr& e) { return print_expr(e); }

  void assign(const std::string& sym, SmtSort s, SortOrigin origin) {
    auto it = out.symbols.find(sym);
    if (it == out.symbols.end()) {
      out.symbols[sym] = {s, origin};
      return;
    }
    if (it->second.sort == s) {
      if (origin == SortOrigin::bound_annotation) it->second.origin = origin;
      return;
    }
    // bound annotations dominate inference; genuine clashes poison the symbol
    if (it->second.origin == SortOrigin::bound_annotation && origin == SortOrigin::inferred) return;
    if (it->second.origin == SortOrigin::inferred && origin == SortOrigin::bound_annotation) {
      it->second = {s, origin};
      return;
    }
    it->second.sort = SmtSort::conflict;
  }

  void scan_bound(const ExprPtr& set, const std::string& var, const std::set<std::string>&) {
    (void)set;
    (void)var;  // bound variables are handled at translation time
  }

  void scan_membership(const ExprPtr& e, const std::set<std::string>& bound_vars) {
    const ExprPtr &t = e->kids[0], &s = e->kids[1];
    if (!is_symbol_leaf(t) || bound_vars.count(symbol_key(t))) return;
    if (builtin_set_named(s, "Nat")) {
      assign(symbol_key(t), SmtSort::integer, SortOrigin::bound_annotation);
      out.nat_bounded.insert(symbol_key(t));
    } else if (builtin_set_named(s, "Int")) {
      assign(symbol_key(t), SmtSort::integer, SortOrigin::bound_annotation);
    } else if (builtin_set_named(s, "Real")) {
      assign(symbol_key(t), SmtSort::real, SortOrigin::bound_annotation);
    }
  }

  // numeric evidence inside one atom: literals force the numeric sort
  void scan_atom(const ExprPtr& e, const std::set<std::string>& bound_vars) {
    bool has_int = false, has_real = false;
    gather_evidence(e, has_int, has_real);
    if (!has_int && !has_real) {
      // plain equality between terms carries no numeric evidence
      for (const auto& k : e->kids) scan_term(k, SmtSort::opaque, bound_vars);
      return;
    }
    SmtSort s = has_real ? SmtSort::real : SmtSort::integer;
    for (const auto& k : e->kids) scan_term(k, s, bound_vars);
  }

  static void gather_evidence(const ExprPtr& e, bool& has_int, bool& has_real) {
    if (e->kind == ExprKind::int_lit) has_int = true;
    if (e->kind == ExprKind::real_lit) has_real = true;
    if (e->is_binder()) return;
    for (const auto& k : e->kids) gather_evidence(k, has_int, has_real);
  }

  void scan_term(const ExprPtr& e, SmtSort evidence, const std::set<std::string>& bound_vars) {
    if (is_symbol_leaf(e)) {
      if (evidence != SmtSort::opaque && !bound_vars.count(symbol_key(e)))
        assign(symbol_key(e), evidence, SortOrigin::inferred);
      return;
    }
    if (e->kind == ExprKind::op_app) {
      note_function(e, evidence, bound_vars);
      for (const auto& k : e->kids) scan_term(k, evidence, bound_vars);
      return;
    }
    switch (e->kind) {
      case ExprKind::add:
      case ExprKind::sub:
      case ExprKind::mul:
      case ExprKind::div_:
      case ExprKind::mod_:
        for (const auto& k : e->kids) scan_term(k, evidence, bound_vars);
        return;
      default:
        return;  // other shapes carry no per-symbol evidence
    }
  }

  void note_function(const ExprPtr& app, SmtSort result_evidence,
                     const std::set<std::string>& bound_vars) {
    (void)bound_vars;
    FuncSig& sig = out.functions[app->name];
    if (sig.args.empty() && !sig.conflict) sig.args.resize(app->kids.size());
    if (sig.args.size() != app->kids.size()) {
      sig.conflict = true;
      return;
    }
    auto merge = [&](SortInfo& slot, SmtSort s) {
      if (s == SmtSort::opaque) return;
      if (slot.sort == SmtSort::opaque && slot.origin == SortOrigin::defaulted) {
        slot = {s, SortOrigin::inferred};
      } else if (slot.sort != s) {
        sig.conflict = true;
      }
    };
    merge(sig.result, result_evidence);
    for (size_t i = 0; i < app->kids.size(); ++i) {
      const ExprPtr& a = app->kids[i];
      if (a->kind == ExprKind::int_lit) merge(sig.args[i], SmtSort::integer);
      if (a->kind == ExprKind::real_lit) merge(sig.args[i], SmtSort::real);
    }
  }
};

struct Inexpressible {
  std::string what;
};

// ---- translation ----

class ScriptBuilder {
 public:
  ScriptBuilder(const SortAssignment& sorts) : sorts_(sorts) {}

  std::string formula(const ExprPtr& e) {
    std::map<std::string, SmtSort> bound;
    return fml(e, bound);
  }

  // declarations for every symbol used; deterministic order
  std::string declarations() const {
    std::ostringstream os;
    if (used_opaque_) os << "(declare-sort U 0)\n";
    for (const auto& [sym, sort] : used_symbols_)
      os << "(declare-fun " << quote(sym) << " () " << smt_sort_name(sort) << ")\n";
    for (const auto& [name, sig] : used_functions_) {
      os << "(declare-fun " << quote(name) << " (";
      for (size_t i = 0; i < sig.args.size(); ++i)
        os << (i ? " " : "") << smt_sort_name(sig.args[i].sort);
      os << ") " << smt_sort_name(sig.result.sort) << ")\n";
    }
    return os.str();
  }

  std::vector<std::string> side_assertions() const {
    std::vector<std::string> out;
    for (const auto& [sym, sort] : used_symbols_)
      if (sort == SmtSort::integer && sorts_.nat_bounded.count(sym))
        out.push_back("(assert (>= " + quote(sym) + " 0))");
    return out;
  }

 private:
  const SortAssignment& sorts_;
  std::map<std::string, SmtSort> used_symbols_;
  std::map<std::string, FuncSig> used_functions_;
  bool used_opaque_ = false;

  static std::string quote(const std::string& s) {
    bool plain = !s.empty() && (std::isalpha((unsigned char)s[0]) || s[0] == '_');
    for (char c : s)
      plain = plain && (std::isalnum((unsigned char)c) || c == '_');
    if (plain) return s;
    return "|" + s + "|";
  }

  SmtSort symbol_sort(const std::string& key) {
    SmtSort s = sorts_.sort_of(key);
    if (s == SmtSort::conflict) throw Inexpressible{"conflicting sorts for " + key};
    if (s == SmtSort::opaque) used_opaque_ = true;
    used_symbols_.emplace(key, s);
    return s;
  }

  std::string fml(const ExprPtr& e, std::map<std::string, SmtSort>& bound) {
    switch (e->kind) {
      case ExprKind::bool_lit: return e->bval ? "true" : "false";
      case ExprKind::and_: return "(and " + fml(e->kids[0], bound) + " " + fml(e->kids[1], bound) + ")";
      case ExprKind::or_: return "(or " + fml(e->kids[0], bound) + " " + fml(e->kids[1], bound) + ")";
      case ExprKind::not_: return "(not " + fml(e->kids[0], bound) + ")";
      case ExprKind::implies:
        return "(=> " + fml(e->kids[0], bound) + " " + fml(e->kids[1], bound) + ")";
      case ExprKind::if_:
        return "(ite " + fml(e->kids[0], bound) + " " + fml(e->kids[1], bound) + " " +
               fml(e->kids[2], bound) + ")";
      case ExprKind::eq: {
        auto [l, ls] = term(e->kids[0], bound);
        auto [r, rs] = term(e->kids[1], bound);
        if (ls != rs) throw Inexpressible{"equality between differently sorted terms"};
        return "(= " + l + " " + r + ")";
      }
      case ExprKind::le:
      case ExprKind::lt: {
        auto [l, ls] = term(e->kids[0], bound);
        auto [r, rs] = term(e->kids[1], bound);
        if (ls != rs || (ls != SmtSort::integer && ls != SmtSort::real))
          throw Inexpressible{"order atom outside arithmetic"};
        return std::string(e->kind == ExprKind::le ? "(<= " : "(< ") + l + " " + r + ")";
      }
      case ExprKind::in_set: {
        const ExprPtr &t = e->kids[0], &s = e->kids[1];
        if (builtin_set_named(s, "Nat")) {
          auto [tt, ts] = term(t, bound);
          if (ts != SmtSort::integer) throw Inexpressible{"Nat bound on non-integer term"};
          return "(>= " + tt + " 0)";
        }
        if (builtin_set_named(s, "Int")) {
          auto [tt, ts] = term(t, bound);
          (void)tt;
          if (ts != SmtSort::integer) throw Inexpressible{"Int bound on non-integer term"};
          return "true";
        }
        if (builtin_set_named(s, "Real")) {
          auto [tt, ts] = term(t, bound);
          (void)tt;
          if (ts != SmtSort::real) throw Inexpressible{"Real bound on non-real term"};
          return "true";
        }
        throw Inexpressible{"set membership"};
      }
      case ExprKind::forall:
      case ExprKind::exists: {
        const char* q = e->kind == ExprKind::forall ? "forall" : "exists";
        SmtSort vs = SmtSort::opaque;
        std::string guard;
        if (e->binder_bounded()) {
          const ExprPtr& b = e->binder_bound();
          if (builtin_set_named(b, "Nat")) {
            vs = SmtSort::integer;
            guard = "(>= " + quote(e->name) + " 0)";
          } else if (builtin_set_named(b, "Int")) {
            vs = SmtSort::integer;
          } else if (builtin_set_named(b, "Real")) {
            vs = SmtSort::real;
          } else {
            throw Inexpressible{"quantifier bound outside Nat/Int/Real"};
          }
        } else {
          used_opaque_ = true;
        }
        auto saved = bound.find(e->name) != bound.end()
                         ? std::optional<SmtSort>(bound[e->name])
                         : std::nullopt;
        bound[e->name] = vs;
        std::string body = fml(e->binder_body(), bound);
        if (saved) bound[e->name] = *saved;
        else bound.erase(e->name);
        if (!guard.empty())
          body = e->kind == ExprKind::forall ? "(=> " + guard + " " + body + ")"
                                             : "(and " + guard + " " + body + ")";
        return std::string("(") + q + " ((" + quote(e->name) + " " + smt_sort_name(vs) + ")) " +
               body + ")";
      }
      default:
        // formula-position symbol must be boolean-sorted
        if (is_symbol_leaf(e)) {
          std::string key = print_expr(e);
          auto it = bound.find(key);
          if (it != bound.end()) throw Inexpressible{"bound variable in formula position"};
          if (symbol_sort(key) != SmtSort::boolean)
            throw Inexpressible{"non-boolean symbol in formula position: " + key};
          return quote(key);
        }
        if (e->kind == ExprKind::op_app) {
          auto [txt, s] = app(e, bound);
          if (s != SmtSort::boolean) throw Inexpressible{"non-boolean application as formula"};
          return txt;
        }
        throw Inexpressible{"formula shape: " + print_expr(e)};
    }
  }

  std::pair<std::string, SmtSort> term(const ExprPtr& e, std::map<std::string, SmtSort>& bound) {
    switch (e->kind) {
      case ExprKind::int_lit: {
        if (e->num < 0) return {"(- " + Int(-e->num).str() + ")", SmtSort::integer};
        return {e->num.str(), SmtSort::integer};
      }
      case ExprKind::real_lit: {
        Expr copy = *e;
        std::string txt = print_expr(copy);
        if (e->num < 0) return {"(- " + txt.substr(1) + ")", SmtSort::real};
        return {txt, SmtSort::real};
      }
      case ExprKind::add:
      case ExprKind::sub:
      case ExprKind::mul: {
        auto [l, ls] = term(e->kids[0], bound);
        auto [r, rs] = term(e->kids[1], bound);
        if (ls != rs || (ls != SmtSort::integer && ls != SmtSort::real))
          throw Inexpressible{"arithmetic over non-numeric terms"};
        // AUFLIRA is linear: multiplication needs a literal side
        if (e->kind == ExprKind::mul && e->kids[0]->kind != ExprKind::int_lit &&
            e->kids[1]->kind != ExprKind::int_lit && e->kids[0]->kind != ExprKind::real_lit &&
            e->kids[1]->kind != ExprKind::real_lit)
          throw Inexpressible{"nonlinear multiplication"};
        const char* op = e->kind == ExprKind::add ? "+" : e->kind == ExprKind::sub ? "-" : "*";
        return {std::string("(") + op + " " + l + " " + r + ")", ls};
      }
      case ExprKind::if_: {
        std::string c = fml(e->kids[0], bound);
        auto [a, as] = term(e->kids[1], bound);
        auto [b, bs] = term(e->kids[2], bound);
        if (as != bs) throw Inexpressible{"IF branches with different sorts"};
        return {"(ite " + c + " " + a + " " + b + ")", as};
      }
      case ExprKind::op_app:
        if (!e->kids.empty()) return app(e, bound);
        [[fallthrough]];
      default: {
        if (is_symbol_leaf(e) || (e->kind == ExprKind::op_app && e->kids.empty())) {
          std::string key = print_expr(e);
          auto it = bound.find(key);
          if (it != bound.end()) {
            if (it->second == SmtSort::opaque) used_opaque_ = true;
            return {quote(key), it->second};
          }
          return {quote(key), symbol_sort(key)};
        }
        throw Inexpressible{"term shape: " + print_expr(e)};
      }
    }
  }

  std::pair<std::string, SmtSort> app(const ExprPtr& e, std::map<std::string, SmtSort>& bound) {
    auto it = sorts_.functions.find(e->name);
    if (it == sorts_.functions.end() || it->second.conflict)
      throw Inexpressible{"uninterpreted operator with conflicting uses: " + e->name};
    const FuncSig& sig = it->second;
    std::ostringstream os;
    os << '(' << quote(e->name);
    for (size_t i = 0; i < e->kids.size(); ++i) {
      auto [a, as] = term(e->kids[i], bound);
      if (as != sig.args[i].sort) throw Inexpressible{"argument sort mismatch for " + e->name};
      os << ' ' << a;
    }
    os << ')';
    FuncSig& reg = used_functions_[e->name];
    reg = sig;
    if (sig.result.sort == SmtSort::opaque) used_opaque_ = true;
    for (const auto& a : sig.args)
      if (a.sort == SmtSort::opaque) used_opaque_ = true;
    return {os.str(), sig.result.sort};
  }
};

}  // namespace smt_detail

// The conservative sort detection pass over a whole obligation.
inline SortAssignment detect_sorts(const Obligation& ob) {
  smt_detail::SortDetector d;
  std::set<std::string> none;
  for (const auto& [name, h] : ob.hypotheses) d.scan_formula(h, none);
  d.scan_formula(ob.goal, none);
  return d.out;
}

// Renders the AUFLIRA script: expressible hypotheses asserted, the rest
// omitted and listed, the goal negated. Not applicable when the goal itself
// is outside the fragment.
inline SmtScript smt_translate(const Obligation& ob, const SortAssignment& sorts) {
  using namespace smt_detail;
  SmtScript script;
  ScriptBuilder builder(sorts);
  std::string goal_text;
  try {
    goal_text = builder.formula(ob.goal);
  } catch (const Inexpressible&) {
    return script;  // not applicable
  }
  std::vector<std::pair<std::string, std::string>> asserts;
  for (const auto& [name, h] : ob.hypotheses) {
    try {
      asserts.emplace_back(name, builder.formula(h));
    } catch (const Inexpressible&) {
      script.omitted.push_back(name);
    }
  }
  std::ostringstream os;
  os << "(set-logic AUFLIRA)\n";
  os << builder.declarations();
  for (const auto& side : builder.side_assertions()) os << side << "\n";
  for (const auto& [name, a] : asserts) os << "; hypothesis " << name << "\n(assert " << a << ")\n";
  os << "; negated goal\n(assert (not " << goal_text << "))\n(check-sat)\n";
  script.applicable = true;
  script.text = os.str();
  return script;
}

// ---------------------------------------------------------------------------
// external solver driver

enum class SolverVerdict : unsigned char { valid, invalid_hint, unknown, solver_error };

inline const char* to_string(SolverVerdict v) {
  switch (v) {
    case SolverVerdict::valid: return "valid";
    case SolverVerdict::invalid_hint: return "invalid-hint";
    case SolverVerdict::unknown: return "unknown";
    default: return "solver-error";
  }
}

struct SolverConfig {
  std::string command_template = "z3 -smt2 {file}";  // {file} replaced by the script path
  double timeout_seconds = 10.0;
};

struct SolverRun {
  SolverVerdict verdict = SolverVerdict::solver_error;
  std::string output;
};

// Runs the configured solver on a script file. unsat => valid; sat is only a
// hint (omitted hypotheses make countermodels unreliable).
inline SolverRun run_solver(const std::string& script_path, const SolverConfig& cfg) {
  SolverRun run;
  if (cfg.timeout_seconds <= 0) {
    run.verdict = SolverVerdict::unknown;
    run.output = "timeout before start";
    return run;
  }
  std::string cmd = cfg.command_template;
  auto pos = cmd.find("{file}");
  if (pos == std::string::npos) {
    run.output = "command template lacks {file}";
    return run;
  }
  cmd.replace(pos, 6, "'" + script_path + "'");
  long to = (long)cfg.timeout_seconds;
  if (cfg.timeout_seconds > (double)to) to += 1;
  cmd = "timeout " + std::to_string(to) + " " + cmd + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    run.output = "failed to start solver";
    return run;
  }
  std::array<char, 4096> buf;
  std::string out;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int rc = pclose(pipe);
  run.output = out;
  std::istringstream is(out);
  std::string first;
  while (std::getline(is, first)) {
    if (first == "sat") {
      run.verdict = SolverVerdict::invalid_hint;
      return run;
    }
    if (first == "unsat") {
      run.verdict = SolverVerdict::valid;
      return run;
    }
    if (first == "unknown" || first == "timeout") {
      run.verdict = SolverVerdict::unknown;
      return run;
    }
  }
  if (rc == 124 * 256) {  // timeout(1) exit status
    run.verdict = SolverVerdict::unknown;
    run.output = "timeout\n" + out;
    return run;
  }
  run.verdict = SolverVerdict::solver_error;
  return run;
}

inline std::string smt_script_path(const std::string& dir, const std::string& fingerprint) {
  return dir + "/" + fingerprint + ".smt2";
}

inline void write_smt_script(const std::string& path, const SmtScript& script) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream os(path);
  os << script.text;
}

}  // namespace mtp

#endif
