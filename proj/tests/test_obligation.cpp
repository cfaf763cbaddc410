#include <catch2/catch_amalgamated.hpp>

#include "mtp/flatten.hpp"
#include "mtp/obligation.hpp"
#include "mtp/parser.hpp"
#include "mtp/presburger.hpp"
#include "mtp/printer.hpp"
#include "mtp/tableau.hpp"
#include "support/eval.hpp"

using namespace mtp;

namespace {

ModuleAst flat_module(const std::string& src) {
  ModuleAst m = flatten(parse_module(src), {});
  annotate_definitions(m);
  return m;
}

}  // namespace

TEST_CASE("THEOREM TRUE with proof OBVIOUS yields one empty-context obligation") {
  auto m = flat_module("---- MODULE M ----\nTHEOREM T == TRUE\nOBVIOUS\n====\n");
  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].hypotheses.empty());
  CHECK(print_expr(obs[0].goal) == "TRUE");
  CHECK(!obs[0].omitted);
}

TEST_CASE("disjunctive goal: one obligation per asserted case plus the QED") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p1, p2, p3, q
THEOREM T == p1 \/ p2 \/ p3 => q
<1>1. p1 => q
  OMITTED
<1>2. p2 => q
  OMITTED
<1>3. p3 => q
  OMITTED
<1>q. QED BY <1>1, <1>2, <1>3
====
)");
  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 4);  // n + 1 for n = 3
  CHECK(obs[3].hypotheses.size() == 3);
  CHECK(obs[3].hypotheses[0].first == "<1>1");
  CHECK(print_expr(obs[3].goal) == "p1 \\/ p2 \\/ p3 => q");
}

TEST_CASE("citing a later sibling is a scoping error") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p
THEOREM T == p \/ ~p
<1>1. p \/ ~p
  BY <1>2
<1>2. p \/ ~p
  OBVIOUS
<1>q. QED BY <1>2
====
)");
  CHECK_THROWS_AS(interpret_proof(m.theorems[0], m), ModuleError);
}

TEST_CASE("unknown facts and unknown DEF names are errors") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p
THEOREM T == p \/ ~p
BY Mystery
====
)");
  CHECK_THROWS_AS(interpret_proof(m.theorems[0], m), ModuleError);
  auto m2 = flat_module(R"(---- MODULE M ----
CONSTANTS p
THEOREM T == p \/ ~p
BY DEF Mystery
====
)");
  CHECK_THROWS_AS(interpret_proof(m2.theorems[0], m2), ModuleError);
}

TEST_CASE("nested steps see ancestors' prior siblings; OBVIOUS sees the ambient context") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p, q
THEOREM T == p /\ q => q /\ p
<1>1. p /\ q => p
  OBVIOUS
<1>2. p /\ q => q /\ p
  <2>1. p /\ q => q
    OBVIOUS
  <2>q. QED BY <1>1, <2>1
<1>q. QED BY <1>2
====
)");
  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 4);
  // the inner OBVIOUS ambient context contains the prior outer step
  CHECK(obs[1].hypotheses.size() == 1);
  CHECK(obs[1].hypotheses[0].first == "<1>1");
  // the QED cites across levels
  CHECK(obs[2].hypotheses.size() == 2);
  CHECK(obs[2].hypotheses[0].first == "<1>1");
  CHECK(obs[2].hypotheses[1].first == "<2>1");
}

TEST_CASE("USE scopes to the rest of the level and nested levels") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p, q
Def1 == p
THEOREM Fact == p \/ ~p
OBVIOUS
THEOREM T == q \/ ~q
<1>1. USE Fact DEF Def1
<1>2. q \/ ~q
  <2>q. QED OBVIOUS
<1>q. QED BY <1>2
====
)");
  auto obs = interpret_proof(m.theorems[1], m);
  REQUIRE(obs.size() == 2);
  // the nested OBVIOUS picked up the USEd fact
  bool found = false;
  for (const auto& [n, e] : obs[0].hypotheses) found = found || n == "Fact";
  CHECK(found);
  CHECK(obs[0].usable_defs.count("Def1") == 1);
  // the QED cites <1>2 explicitly and still carries the USE
  CHECK(obs[1].hypotheses[0].first == "<1>2");
}

TEST_CASE("theorems cited as facts contribute their statement") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p, q
THEOREM First == p => p \/ q
OBVIOUS
THEOREM Second == p => p \/ q
BY First
====
)");
  auto obs = interpret_proof(m.theorems[1], m);
  REQUIRE(obs.size() == 1);
  REQUIRE(obs[0].hypotheses.size() == 1);
  CHECK(obs[0].hypotheses[0].first == "First");
  CHECK(print_expr(obs[0].hypotheses[0].second) == "p => p \\/ q");
}

TEST_CASE("invariance rule: goals and admitted shapes") {
  auto m = flat_module(R"(---- MODULE M ----
VARIABLES x
Init == x = 0
Nxt == x' = x + 1
Inv == 0 <= x
THEOREM T == Init /\ [](Nxt) => [](Inv)
<1>1. Init => Inv
  BY SimpleArithmetic DEF Init, Inv
<1>2. Inv /\ Nxt => Inv'
  BY SimpleArithmetic DEF Inv, Nxt
<1>q. QED BY <1>1, <1>2
====
)");
  auto [init_goal, step_goal] = apply_invariance_rule(m.theorems[0]);
  CHECK(print_expr(init_goal) == "Init => Inv");
  CHECK(print_expr(step_goal) == "Inv /\\ Nxt => Inv'");

  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 2);  // rule discharges the QED
  CHECK(print_expr(obs[0].goal) == "x = 0 => 0 <= x");
  CHECK(print_expr(obs[1].goal) == "0 <= x /\\ x' = x + 1 => 0 <= x'");
  // both goals are valid in Presburger arithmetic
  CHECK(presburger_decide(obs[0]).verdict == PVerdict::valid);
  CHECK(presburger_decide(obs[1]).verdict == PVerdict::valid);
}

TEST_CASE("invariance rule: TRUE invariant makes the step goal trivial") {
  auto m = flat_module(R"(---- MODULE M ----
VARIABLES x
Nxt == x' = x
THEOREM T == x = 0 /\ [](Nxt) => [](TRUE)
<1>1. x = 0 => TRUE
  OBVIOUS
<1>2. TRUE /\ Nxt => TRUE'
  OBVIOUS
<1>q. QED BY <1>1, <1>2
====
)");
  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 2);
  CHECK(tableau_prove(obs[1]).proved());
}

TEST_CASE("unsupported temporal shapes are rejected") {
  CHECK_THROWS_AS(flat_module(R"(---- MODULE M ----
VARIABLES x
Inv == x = 0
Init == x = 0
THEOREM T == [](Inv) => Init
====
)"),
                  ModuleError);
  // direct rule application on a non-temporal statement
  Theorem t;
  t.name = "X";
  t.statement = parse_expr_text("p => q");
  CHECK_THROWS_AS(apply_invariance_rule(t), ModuleError);
}

TEST_CASE("box statement outside the shape is a module error") {
  CHECK_THROWS_AS(flat_module(R"(---- MODULE M ----
VARIABLES x
THEOREM T == [](x = 0) => x = 0
====
)"),
                  ModuleError);
}

TEST_CASE("failure reports expand usable definitions and flag omitted leaves") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS q
P(x, y) == x + 2 * y
THEOREM H == q
<1>1. P(1, 1) = 3 => q
  BY DEF P
<1>q. QED BY <1>1 DEF P
====
)");
  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 2);
  std::string report = report_failure(obs[1], {"tableau: saturated-open-branch"});
  CHECK(report.find("<1>1: 1 + 2 * 1 = 3 => q") != std::string::npos);
  CHECK(report.find("tableau: saturated") != std::string::npos);

  Obligation empty_hyps = obs[0];
  empty_hyps.hypotheses.clear();
  std::string r2 = report_failure(empty_hyps, {});
  CHECK(r2.find("(no hypotheses)") != std::string::npos);
  CHECK(r2.find("|-") != std::string::npos);

  Obligation omitted = obs[0];
  omitted.omitted = true;
  CHECK(report_failure(omitted, {}).find("omitted, not attempted") != std::string::npos);
}

TEST_CASE("list_unproven enumerates missing subproofs and OMITTED leaves in order") {
  auto full = flat_module("---- MODULE M ----\nTHEOREM T == TRUE\nOBVIOUS\n====\n");
  CHECK(list_unproven(full).empty());

  auto absent = flat_module("---- MODULE M ----\nTHEOREM T == TRUE\n====\n");
  auto u1 = list_unproven(absent);
  REQUIRE(u1.size() == 1);
  CHECK(u1[0].theorem == "T");
  CHECK(u1[0].path.empty());

  auto nested = flat_module(R"(---- MODULE M ----
CONSTANTS p
THEOREM T == p \/ ~p
<1>1. p \/ ~p
  OBVIOUS
<1>2. p \/ ~p
  <2>1. TRUE
    OBVIOUS
  <2>2. TRUE
  <2>3. p \/ ~p
    OMITTED
  <2>q. QED BY <2>3
<1>q. QED BY <1>2
====
)");
  auto u2 = list_unproven(nested);
  REQUIRE(u2.size() == 2);
  CHECK(u2[0].path == std::vector<std::string>{"<1>2", "<2>2"});
  CHECK(u2[1].path == std::vector<std::string>{"<1>2", "<2>3"});
}

TEST_CASE("fingerprints are stable across runs and change with content") {
  std::string src = R"(---- MODULE M ----
CONSTANTS p, q
THEOREM T == p /\ q => p
OBVIOUS
====
)";
  auto a = generate_obligations(flat_module(src));
  auto b = generate_obligations(flat_module(src));
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].fingerprint == b[i].fingerprint);
  CHECK(a[0].fingerprint.size() == 64);

  std::string edited = src;
  edited.replace(edited.find("=> p"), 4, "=> q");
  auto c = generate_obligations(flat_module(edited));
  CHECK(a[0].fingerprint != c[0].fingerprint);
}

TEST_CASE("omitted obligations are marked and never carry a backend hint") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p
THEOREM T == p \/ ~p
OMITTED
====
)");
  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].omitted);
}

TEST_CASE("pragma citations set the backend hint without adding hypotheses") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS n
THEOREM T == n \in Nat => n + 0 = n
BY SimpleArithmetic
====
)");
  auto obs = interpret_proof(m.theorems[0], m);
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].hint == BackendHint::presburger);
  CHECK(obs[0].hypotheses.empty());

  auto m2 = flat_module(R"(---- MODULE M ----
CONSTANTS r
THEOREM T == r \in Real => r < r + 1.0
BY RealArithmetic
====
)");
  CHECK(interpret_proof(m2.theorems[0], m2)[0].hint == BackendHint::smt);
}

TEST_CASE("hierarchy soundness at desk scale: valid obligations entail valid statements") {
  // propositional fixtures: enumerate all boolean assignments of p, q, r
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p, q, r
THEOREM T1 == (p /\ q) \/ (p /\ r) => p
<1>1. p /\ q => p
  OBVIOUS
<1>2. p /\ r => p
  OBVIOUS
<1>q. QED BY <1>1, <1>2
THEOREM T2 == p /\ q => q /\ p
<1>1. p /\ q => q
  OBVIOUS
<1>2. p /\ q => p
  OBVIOUS
<1>q. QED BY <1>1, <1>2
====
)");
  for (const auto& thm : m.theorems) {
    auto obs = interpret_proof(thm, m);
    bool all_obligations_valid = true;
    bool statement_valid = true;
    for (int bits = 0; bits < 8; ++bits) {
      oracle::Env env;
      env.constants = {{"p", oracle::Value::of_bool(bits & 1)},
                       {"q", oracle::Value::of_bool(bits & 2)},
                       {"r", oracle::Value::of_bool(bits & 4)}};
      for (const auto& ob : obs) {
        ExprPtr seq = ob.goal;
        for (auto it = ob.hypotheses.rbegin(); it != ob.hypotheses.rend(); ++it)
          seq = mk_implies(it->second, seq);
        if (oracle::truth(seq, env) != 1) all_obligations_valid = false;
      }
      if (oracle::truth(thm.statement, env) != 1) statement_valid = false;
    }
    CHECK(all_obligations_valid);
    CHECK(statement_valid);  // soundness: obligations valid => statement valid
  }
}

TEST_CASE("obligation dump lines round-trip") {
  auto m = flat_module(R"(---- MODULE M ----
CONSTANTS p, q
THEOREM T == p /\ q => p
<1>1. p /\ q => p
  OBVIOUS
<1>q. QED BY <1>1
====
)");
  auto obs = generate_obligations(m);
  for (const auto& ob : obs) {
    DumpRecord rec = parse_dump_line(dump_obligation_line(ob));
    CHECK(rec.fingerprint == ob.fingerprint);
    CHECK(rec.theorem_name == ob.theorem_name);
    CHECK(rec.omitted == ob.omitted);
    REQUIRE(rec.hypotheses.size() == ob.hypotheses.size());
    for (size_t i = 0; i < rec.hypotheses.size(); ++i)
      CHECK(expr_eq(rec.hypotheses[i].second, ob.hypotheses[i].second));
    CHECK(expr_eq(rec.goal, ob.goal));
  }
}

TEST_CASE("invariance proofs must assert both rule goals") {
  auto m = flat_module(R"(---- MODULE M ----
VARIABLES x
Init == x = 0
Nxt == x' = x
Inv == x = 0
THEOREM T == Init /\ [](Nxt) => [](Inv)
<1>1. Init => Inv
  OBVIOUS
<1>q. QED BY <1>1
====
)");
  CHECK_THROWS_AS(interpret_proof(m.theorems[0], m), ModuleError);
}
