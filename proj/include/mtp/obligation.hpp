// mtp :: hierarchical proof interpretation and obligation generation
#ifndef MTP_OBLIGATION_HPP
#define MTP_OBLIGATION_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtp/ast.hpp"
#include "mtp/flatten.hpp"
#include "mtp/lemmas.hpp"
#include "mtp/printer.hpp"
#include "mtp/rewrite.hpp"

namespace mtp {

enum class BackendHint : unsigned char { none, presburger, smt };

struct Obligation {
  std::string fingerprint;
  std::vector<std::pair<std::string, ExprPtr>> hypotheses;  // post rewrite pipeline
  ExprPtr goal;
  std::set<std::string> usable_defs;
  // provenance
  std::string module_name;
  std::string theorem_name;
  std::vector<std::string> step_path;
  SourcePos pos;
  bool omitted = false;
  BackendHint hint = BackendHint::none;
  std::string rewrite_error;  // non-empty when the pipeline refused (e.g. unexpandable prime)

  std::string location() const {
    std::string s = theorem_name;
    for (const auto& p : step_path) s += "/" + p;
    return s;
  }
};

struct StepContext {
  std::vector<std::pair<std::string, ExprPtr>> known;  // prior steps + USE'd facts, in order
  std::vector<std::string> active;                     // names auto-included in every leaf
  UsabilityContext usable;
  BackendHint hint = BackendHint::none;
  ExprPtr goal;
};

namespace detail {

inline std::string step_name(int level, const std::string& label) {
  return "<" + std::to_string(level) + ">" + label;
}

inline std::string canonical_sequent(const std::vector<std::pair<std::string, ExprPtr>>& hyps,
                                     const ExprPtr& goal) {
  std::string text;
  for (const auto& [name, e] : hyps) {
    text += print_expr(e);
    text += " ;; ";
  }
  text += "|- ";
  text += print_expr(goal);
  return text;
}

}  // namespace detail

// Runs the trusted rewrite pipeline over one sequent and fingerprints the
// result. A rewrite refusal is recorded on the obligation, not thrown.
inline void process_obligation(Obligation& ob, const ModuleAst& module) {
  try {
    auto process = [&](const ExprPtr& e) {
      ExprPtr r = resolve_all_refs(e, module);
      r = expand_usable(r, [&] {
        UsabilityContext ctx;
        for (const auto& d : ob.usable_defs) ctx.add(d, UsableOrigin::cited);
        return ctx;
      }(), module);
      r = distribute_prime(r, module);
      r = [&] {
        UsabilityContext ctx;
        for (const auto& d : ob.usable_defs) ctx.add(d, UsableOrigin::cited);
        return hash_hidden(r, ctx, module);
      }();
      return strip_labels(r);
    };
    for (auto& [name, e] : ob.hypotheses) e = process(e);
    ob.goal = process(ob.goal);
  } catch (const RewriteError& err) {
    ob.rewrite_error = err.what();
  }
  ob.fingerprint = sha256_hex(detail::canonical_sequent(ob.hypotheses, ob.goal));
}

// The safety rule: Init /\ []Next => []Inv reduces to
//   Init => Inv   and   Inv /\ Next => Inv'
// Prime distribution over Inv' happens later, per obligation, once the
// leaf's cited definitions are known.
inline std::pair<ExprPtr, ExprPtr> apply_invariance_rule(const Theorem& thm) {
  ExprPtr init, next, inv;
  if (!is_invariance_shape(thm.statement, &init, &next, &inv))
    throw ModuleError("theorem '" + thm.name +
                          "' is not of the supported temporal form Init /\\ []Next => []Inv",
                      thm.pos);
  if (inv->cache_has_prime || init->cache_has_prime)
    throw ModuleError("primed expression in Init/Inv of invariance theorem '" + thm.name + "'",
                      thm.pos);
  ExprPtr init_goal = mk_implies(init, inv);
  ExprPtr step_goal = mk_implies(mk_and(inv, next), mk_prime(inv));
  return {init_goal, step_goal};
}

// ---------------------------------------------------------------------------
// proof interpretation

class ProofInterpreter {
 public:
  ProofInterpreter(const ModuleAst& module) : module_(module) {}

  std::vector<Obligation> run(const Theorem& thm) {
    obligations_.clear();
    thm_ = &thm;
    StepContext ctx;
    if (is_invariance_shape(thm.statement)) {
      interpret_invariance(thm, ctx);
    } else {
      ctx.goal = thm.statement;
      if (!thm.proof) {
        emit_unproven(ctx, {});
      } else {
        interpret(thm.proof, ctx, {}, /*rule_discharged_qed=*/false);
      }
    }
    return std::move(obligations_);
  }

 private:
  const ModuleAst& module_;
  const Theorem* thm_ = nullptr;
  std::vector<Obligation> obligations_;

  void interpret_invariance(const Theorem& thm, StepContext& ctx) {
    auto [init_goal, step_goal] = apply_invariance_rule(thm);
    ctx.goal = thm.statement;
    if (!thm.proof) {
      emit_unproven(ctx, {});
      return;
    }
    if (thm.proof->kind != ProofKind::sequence)
      throw ModuleError("temporal theorem '" + thm.name +
                            "' needs step assertions for both invariance-rule goals",
                        thm.pos);
    bool have_init = false, have_step = false;
    for (const auto& st : thm.proof->steps) {
      if (st->kind != ProofKind::assert_step) continue;
      if (expr_eq(st->assertion, init_goal)) have_init = true;
      if (expr_eq(st->assertion, step_goal)) have_step = true;
    }
    if (!have_init)
      throw ModuleError("invariance proof of '" + thm.name + "' must assert " +
                            print_expr(init_goal), thm.pos);
    if (!have_step)
      throw ModuleError("invariance proof of '" + thm.name + "' must assert " +
                            print_expr(step_goal), thm.pos);
    // The QED of this level is discharged by the rule itself.
    interpret(thm.proof, ctx, {}, /*rule_discharged_qed=*/true);
  }

  void interpret(const ProofPtr& proof, StepContext ctx, std::vector<std::string> path,
                 bool rule_discharged_qed) {
    switch (proof->kind) {
      case ProofKind::sequence: {
        for (const auto& st : proof->steps)
          interpret_step(st, ctx, path, rule_discharged_qed);
        return;
      }
      case ProofKind::leaf_by:
      case ProofKind::leaf_obvious:
        emit_leaf(*proof, ctx, path);
        return;
      case ProofKind::leaf_omitted:
        emit_omitted(ctx, path);
        return;
      default:
        throw ModuleError("malformed proof tree", proof->pos);
    }
  }

  void interpret_step(const ProofPtr& st, StepContext& ctx, const std::vector<std::string>& path,
                      bool rule_discharged_qed) {
    std::string name = detail::step_name(st->level, st->label);
    std::vector<std::string> sub_path = path;
    sub_path.push_back(name);
    switch (st->kind) {
      case ProofKind::use_step: {
        for (const auto& f : st->facts) {
          auto fact = resolve_fact(f, ctx);
          if (fact.pragma != BackendHint::none) {
            ctx.hint = fact.pragma;
            continue;
          }
          ctx.known.emplace_back(fact.name, fact.formula);
          ctx.active.push_back(fact.name);
        }
        for (const auto& d : st->defs) {
          require_def(d, st->pos);
          ctx.usable.add(d, UsableOrigin::use_step);
        }
        return;
      }
      case ProofKind::assert_step: {
        StepContext sub = ctx;
        sub.goal = st->assertion;
        if (st->subproof) {
          interpret(st->subproof, sub, sub_path, false);
        } else {
          emit_unproven(sub, sub_path);
        }
        ctx.known.emplace_back(name, st->assertion);
        return;
      }
      case ProofKind::qed_step: {
        if (rule_discharged_qed) return;  // invariance rule covers this level's goal
        StepContext sub = ctx;
        if (st->subproof) {
          interpret(st->subproof, sub, sub_path, false);
        } else {
          emit_unproven(sub, sub_path);
        }
        return;
      }
      default:
        throw ModuleError("unexpected leaf in step position", st->pos);
    }
  }

  struct ResolvedFact {
    std::string name;
    ExprPtr formula;
    BackendHint pragma = BackendHint::none;
  };

  ResolvedFact resolve_fact(const FactRef& f, const StepContext& ctx) {
    if (f.is_step) {
      std::string key = detail::step_name(f.level, f.name);
      for (const auto& [n, e] : ctx.known)
        if (n == key) return {key, e, BackendHint::none};
      throw ModuleError("unknown fact " + key + " (not a prior sibling or ancestor's prior step)",
                        f.pos);
    }
    for (const auto& [n, e] : ctx.known)
      if (n == f.name) return {f.name, e, BackendHint::none};
    // prior theorems of the flattened module
    for (const auto& t : module_.theorems) {
      if (&t == thm_) break;
      if (t.name == f.name) {
        if (detail::contains_box(t.statement))
          throw ModuleError("temporal theorem '" + f.name + "' cannot be cited as a fact", f.pos);
        return {f.name, t.statement, BackendHint::none};
      }
    }
    if (f.name == "SimpleArithmetic") return {f.name, mk_bool(true), BackendHint::presburger};
    if (f.name == "RealArithmetic") return {f.name, mk_bool(true), BackendHint::smt};
    if (const ExprPtr* lemma = lemma_base_lookup(f.name)) return {f.name, *lemma, BackendHint::none};
    throw ModuleError("unknown fact '" + f.name + "'", f.pos);
  }

  void require_def(const std::string& d, SourcePos pos) {
    if (!module_.find_def(d)) throw ModuleError("DEF cites unknown operator '" + d + "'", pos);
  }

  Obligation base_obligation(const StepContext& ctx, const std::vector<std::string>& path) {
    Obligation ob;
    ob.module_name = module_.name;
    ob.theorem_name = thm_->name;
    ob.step_path = path;
    ob.goal = ctx.goal;
    ob.hint = ctx.hint;
    for (const auto& [d, o] : ctx.usable.usable) {
      (void)o;
      ob.usable_defs.insert(d);
    }
    return ob;
  }

  void emit_leaf(const ProofNode& leaf, const StepContext& ctx, const std::vector<std::string>& path) {
    Obligation ob = base_obligation(ctx, path);
    ob.pos = leaf.pos;
    std::set<std::string> seen;
    if (leaf.kind == ProofKind::leaf_by) {
      for (const auto& f : leaf.facts) {
        auto fact = resolve_fact(f, ctx);
        if (fact.pragma != BackendHint::none) {
          ob.hint = fact.pragma;
          continue;
        }
        if (seen.insert(fact.name).second) ob.hypotheses.emplace_back(fact.name, fact.formula);
      }
      for (const auto& d : leaf.defs) {
        require_def(d, leaf.pos);
        ob.usable_defs.insert(d);
      }
      // facts activated by USE steps follow the cited ones
      for (const auto& n : ctx.active)
        for (const auto& [kn, ke] : ctx.known)
          if (kn == n && seen.insert(kn).second) ob.hypotheses.emplace_back(kn, ke);
    } else {
      // OBVIOUS: the ambient context, i.e. every known fact in order
      for (const auto& [kn, ke] : ctx.known)
        if (seen.insert(kn).second) ob.hypotheses.emplace_back(kn, ke);
    }
    process_obligation(ob, module_);
    obligations_.push_back(std::move(ob));
  }

  void emit_omitted(const StepContext& ctx, const std::vector<std::string>& path) {
    Obligation ob = base_obligation(ctx, path);
    ob.omitted = true;
    process_obligation(ob, module_);
    obligations_.push_back(std::move(ob));
  }

  // A step (or theorem) without any proof: tracked as omitted debt.
  void emit_unproven(const StepContext& ctx, const std::vector<std::string>& path) {
    emit_omitted(ctx, path);
  }
};

inline std::vector<Obligation> interpret_proof(const Theorem& thm, const ModuleAst& module) {
  return ProofInterpreter(module).run(thm);
}

inline std::vector<Obligation> generate_obligations(const ModuleAst& module) {
  std::vector<Obligation> all;
  for (const auto& t : module.theorems) {
    auto obs = interpret_proof(t, module);
    for (auto& ob : obs) all.push_back(std::move(ob));
  }
  return all;
}

// ---------------------------------------------------------------------------
// unproven-step listing and failure reports

struct UnprovenEntry {
  std::string theorem;
  std::vector<std::string> path;  // empty: the theorem itself has no proof
};

namespace detail {
inline void collect_unproven(const ProofPtr& proof, std::vector<std::string>& path,
                             const std::string& thm, std::vector<UnprovenEntry>& out,
                             bool rule_discharged_qed) {
  if (!proof) return;
  switch (proof->kind) {
    case ProofKind::sequence:
      for (const auto& st : proof->steps) {
        if (st->kind == ProofKind::use_step) continue;
        if (st->kind == ProofKind::qed_step && rule_discharged_qed) continue;
        path.push_back(step_name(st->level, st->label));
        if (st->kind == ProofKind::assert_step || st->kind == ProofKind::qed_step) {
          if (!st->subproof)
            out.push_back({thm, path});
          else
            collect_unproven(st->subproof, path, thm, out, false);
        }
        path.pop_back();
      }
      return;
    case ProofKind::leaf_omitted:
      out.push_back({thm, path});
      return;
    default:
      return;
  }
}
}  // namespace detail

// Every assertion or QED step without a subproof and every OMITTED leaf, in
// document order.
inline std::vector<UnprovenEntry> list_unproven(const ModuleAst& module) {
  std::vector<UnprovenEntry> out;
  for (const auto& t : module.theorems) {
    if (!t.proof) {
      out.push_back({t.name, {}});
      continue;
    }
    std::vector<std::string> path;
    bool rule_qed = is_invariance_shape(t.statement);
    detail::collect_unproven(t.proof, path, t.name, out, rule_qed);
  }
  return out;
}

// Human-readable failure report; definitions were already expanded by the
// rewrite pipeline.
inline std::string report_failure(const Obligation& ob,
                                  const std::vector<std::string>& backend_reasons) {
  std::ostringstream os;
  os << ob.module_name << ": obligation " << ob.fingerprint.substr(0, 12) << " at "
     << ob.location() << (ob.omitted ? " (omitted, not attempted)" : " FAILED") << "\n";
  if (!ob.rewrite_error.empty()) os << "  rewrite: " << ob.rewrite_error << "\n";
  for (const auto& [name, e] : ob.hypotheses) os << "  " << name << ": " << print_expr(e) << "\n";
  if (ob.hypotheses.empty()) os << "  (no hypotheses)\n";
  os << "  |- " << print_expr(ob.goal) << "\n";
  if (!ob.usable_defs.empty()) {
    os << "  usable:";
    for (const auto& d : ob.usable_defs) os << ' ' << d;
    os << "\n";
  }
  for (const auto& r : backend_reasons) os << "  " << r << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// obligation dump (line-delimited; one record per obligation)

struct DumpRecord {
  std::string fingerprint;
  std::string module_name;
  std::string theorem_name;
  std::string path;
  bool omitted = false;
  std::vector<std::pair<std::string, ExprPtr>> hypotheses;
  ExprPtr goal;
};

inline DumpRecord parse_dump_line(const std::string& line) {
  std::vector<std::string> f;
  size_t start = 0;
  for (;;) {
    size_t tab = line.find('\t', start);
    f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (f.size() < 7) throw MtpError("malformed obligation record");
  DumpRecord r;
  r.fingerprint = f[0];
  r.module_name = f[1];
  r.theorem_name = f[2];
  r.path = f[3];
  r.omitted = f[4] == "omitted";
  size_t n = std::stoul(f[5]);
  if (f.size() != 7 + 2 * n) throw MtpError("malformed obligation record");
  for (size_t i = 0; i < n; ++i)
    r.hypotheses.emplace_back(f[6 + 2 * i], parse_expr_text(f[7 + 2 * i]));
  r.goal = parse_expr_text(f.back());
  return r;
}

inline std::string dump_obligation_line(const Obligation& ob) {
  std::ostringstream os;
  os << ob.fingerprint << '\t' << ob.module_name << '\t' << ob.theorem_name << '\t';
  if (ob.step_path.empty()) {
    os << '-';
  } else {
    for (size_t i = 0; i < ob.step_path.size(); ++i) os << (i ? "/" : "") << ob.step_path[i];
  }
  os << '\t' << (ob.omitted ? "omitted" : "normal");
  os << '\t' << ob.hypotheses.size();
  for (const auto& [name, e] : ob.hypotheses) os << '\t' << name << '\t' << print_expr(e);
  os << '\t' << print_expr(ob.goal);
  return os.str();
}

}  // namespace mtp

#endif
