#include <catch2/catch_amalgamated.hpp>

#include "mtp/flatten.hpp"
#include "mtp/parser.hpp"
#include "mtp/printer.hpp"
#include "support/gen.hpp"

using namespace mtp;

static ModuleAst parse_flat(const std::string& src,
                            const std::map<std::string, ModuleAst>& lib = {}) {
  ModuleAst m = parse_module(src);
  return flatten(m, lib);
}

TEST_CASE("operator definition parses into name, params and body") {
  auto m = parse_module(R"(
---- MODULE M ----
P(x, y) == x + 2 * y
====
)");
  REQUIRE(m.definitions.size() == 1);
  const auto& d = m.definitions[0];
  CHECK(d.name == "P");
  CHECK(d.params == std::vector<std::string>{"x", "y"});
  CHECK(print_expr(d.body) == "x + 2 * y");
}

TEST_CASE("smallest theorem: no proof attached") {
  auto m = parse_module("---- MODULE M ----\nTHEOREM T == TRUE\n====\n");
  REQUIRE(m.theorems.size() == 1);
  CHECK(m.theorems[0].name == "T");
  CHECK(m.theorems[0].statement->kind == ExprKind::bool_lit);
  CHECK(m.theorems[0].proof == nullptr);
}

TEST_CASE("double priming is rejected at parse time") {
  CHECK_THROWS_AS(parse_expr_text("x''"), ParseError);
  CHECK_THROWS_AS(parse_expr_text("(x' + 1)'"), ParseError);
  try {
    parse_module("---- MODULE M ----\nVARIABLES x\nD == x''\n====\n");
    FAIL("expected a double-prime diagnostic");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("priming") != std::string::npos);
    CHECK(e.pos.line == 3);
  }
}

TEST_CASE("duplicate labels and duplicate definitions are parse errors") {
  CHECK_THROWS_AS(parse_module("---- MODULE M ----\nD == l::(1) + l::(2)\n====\n"), ParseError);
  CHECK_THROWS_AS(parse_module("---- MODULE M ----\nD == 1\nD == 2\n====\n"), ParseError);
  CHECK_THROWS_AS(parse_module("---- MODULE M ----\nP(x, x) == x\n====\n"), ParseError);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_module("---- MODULE M ----\nD == (1 +\n====\n");
    FAIL("expected syntax error");
  } catch (const ParseError& e) {
    CHECK(e.pos.line >= 2);
    CHECK(e.pos.col >= 1);
  }
}

TEST_CASE("printer goldens") {
  CHECK(print_expr(parse_expr_text("(u = v + 2 * c)'")) == "(u = v + 2 * c)'");
  CHECK(print_expr(parse_expr_text("0")) == "0");
  CHECK(print_expr(parse_expr_text("P(2, 20)")) == "P(2, 20)");
}

TEST_CASE("documented precedence: relational binds tighter than ~, => is right-associative") {
  CHECK(print_expr(parse_expr_text("~x = y")) == print_expr(mk_not(parse_expr_text("x = y"))));
  auto e = parse_expr_text("a => b => c");
  REQUIRE(e->kind == ExprKind::implies);
  CHECK(e->kids[1]->kind == ExprKind::implies);
  CHECK_THROWS_AS(parse_expr_text("a = b = c"), ParseError);
  // >= and > normalize onto <= and <
  CHECK(print_expr(parse_expr_text("x >= 0")) == "0 <= x");
  CHECK(print_expr(parse_expr_text("x > 0")) == "0 < x");
  CHECK(print_expr(parse_expr_text("a # b")) == "~a = b");
}

TEST_CASE("round-trip: parse after print is structurally equal, print is a fixpoint") {
  gen::Rng rng(20240817);
  gen::PrintableGen g(rng);
  for (int i = 0; i < 600; ++i) {
    ExprPtr e = g.expr(1 + i % 4);
    std::string text = print_expr(e);
    ExprPtr back;
    REQUIRE_NOTHROW(back = parse_expr_text(text));
    if (!expr_eq(e, back)) {
      INFO("printed: " << text);
      INFO("reparsed: " << print_expr(back));
      FAIL("round-trip mismatch");
    }
    CHECK(print_expr(back) == text);
  }
}

TEST_CASE("parse totality: arbitrary input yields an AST or a diagnostic") {
  gen::Rng rng(424242);
  const std::string alphabet = "ab01 ()<>=~/\\{}[]'!:,.\"*+-%#|\nMODULE THEOREM BY QED";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    size_t len = rng() % 60;
    for (size_t j = 0; j < len; ++j) {
      if (rng() % 12 == 0)
        s.push_back((char)(rng() % 256));
      else
        s.push_back(alphabet[rng() % alphabet.size()]);
    }
    try {
      parse_module(s);
    } catch (const ParseError&) {
      // a diagnostic is the expected outcome for junk
    }
  }
  SUCCEED("no abnormal exits");
}

TEST_CASE("flatten: no extends is the identity") {
  auto m = parse_module("---- MODULE M ----\nCONSTANTS c\nD == c + 1\n====\n");
  auto flat = flatten(m, {});
  REQUIRE(flat.definitions.size() == 1);
  CHECK(flat.name == m.name);
  CHECK(expr_eq(flat.definitions[0].body, parse_expr_text("c + 1")));
}

TEST_CASE("flatten: extended module's definitions come first") {
  auto b = parse_module("---- MODULE B ----\nOp == 1\n====\n");
  auto a = parse_module("---- MODULE A ----\nEXTENDS B\nMine == Op + 1\n====\n");
  auto flat = flatten(a, {{"B", b}});
  REQUIRE(flat.definitions.size() == 2);
  CHECK(flat.definitions[0].name == "Op");
  CHECK(flat.definitions[1].name == "Mine");
}

TEST_CASE("flatten: cross-module duplicate names are rejected") {
  auto b = parse_module("---- MODULE B ----\nOp == 1\n====\n");
  auto c = parse_module("---- MODULE C ----\nOp == 2\n====\n");
  auto a = parse_module("---- MODULE A ----\nEXTENDS B, C\n====\n");
  CHECK_THROWS_AS(flatten(a, {{"B", b}, {"C", c}}), ModuleError);
}

TEST_CASE("flatten: missing module and import cycles are rejected") {
  auto a = parse_module("---- MODULE A ----\nEXTENDS B\n====\n");
  CHECK_THROWS_AS(flatten(a, {}), ModuleError);
  auto b = parse_module("---- MODULE B ----\nEXTENDS C\n====\n");
  auto c = parse_module("---- MODULE C ----\nEXTENDS B\n====\n");
  auto root = parse_module("---- MODULE R ----\nEXTENDS B\n====\n");
  CHECK_THROWS_AS(flatten(root, {{"B", b}, {"C", c}}), ModuleError);
}

TEST_CASE("flatten is idempotent once the library is drained") {
  auto b = parse_module("---- MODULE B ----\nOp == 1\n====\n");
  auto a = parse_module("---- MODULE A ----\nEXTENDS B\nMine == Op\n====\n");
  auto once = flatten(a, {{"B", b}});
  auto twice = flatten(once, {});
  REQUIRE(once.definitions.size() == twice.definitions.size());
  for (size_t i = 0; i < once.definitions.size(); ++i) {
    CHECK(once.definitions[i].name == twice.definitions[i].name);
    CHECK(expr_eq(once.definitions[i].body, twice.definitions[i].body));
  }
}

TEST_CASE("resolution: undeclared identifiers and misused operators are errors") {
  CHECK_THROWS_AS(parse_flat("---- MODULE M ----\nD == missing\n====\n"), ModuleError);
  CHECK_THROWS_AS(parse_flat("---- MODULE M ----\nP(x) == x\nD == P\n====\n"), ModuleError);
  CHECK_THROWS_AS(parse_flat("---- MODULE M ----\nP(x) == x\nD == P(1, 2)\n====\n"), ModuleError);
  // definitions may not reference later definitions (rules out recursion)
  CHECK_THROWS_AS(parse_flat("---- MODULE M ----\nD == E\nE == 1\n====\n"), ModuleError);
  CHECK_THROWS_AS(parse_flat("---- MODULE M ----\nD == D\n====\n"), ModuleError);
}

TEST_CASE("resolution: identifier kinds are assigned") {
  auto flat = parse_flat(
      "---- MODULE M ----\nCONSTANTS c\nVARIABLES v\nD == c + v + (\\A x \\in Nat: x)\n====\n");
  const ExprPtr& body = flat.definitions[0].body;
  // c + v + (...) is ((c + v) + quant)
  const ExprPtr& cv = body->kids[0];
  CHECK(cv->kids[0]->ident_kind == IdentKind::constant);
  CHECK(cv->kids[1]->ident_kind == IdentKind::variable);
  const ExprPtr& q = body->kids[1];
  CHECK(q->binder_bound()->ident_kind == IdentKind::builtin_set);
  CHECK(q->binder_body()->ident_kind == IdentKind::bound);
}

TEST_CASE("reserved built-in set names cannot be declared") {
  CHECK_THROWS_AS(parse_module("---- MODULE M ----\nCONSTANTS Nat\n====\n"), ParseError);
  CHECK_THROWS_AS(parse_module("---- MODULE M ----\nReal == 1\n====\n"), ParseError);
}

TEST_CASE("box is confined to the invariance statement shape") {
  CHECK_THROWS_AS(parse_flat("---- MODULE M ----\nVARIABLES x\nD == [](x = 1)\n====\n"),
                  ModuleError);
  CHECK_THROWS_AS(
      parse_flat("---- MODULE M ----\nVARIABLES x\nTHEOREM T == [](x = 1) => x = 1\n====\n"),
      ModuleError);
  auto ok = parse_flat(
      "---- MODULE M ----\nVARIABLES x\nInit == x = 0\nNxt == x' = x\nInv == x = 0\n"
      "THEOREM T == Init /\\ [](Nxt) => [](Inv)\n====\n");
  CHECK(is_invariance_shape(ok.theorems[0].statement));
}

TEST_CASE("module end and trailing garbage") {
  CHECK_THROWS_AS(parse_module("---- MODULE M ----\nD == 1\n====\nleftover"), ParseError);
  CHECK_THROWS_AS(parse_module("---- MODULE M ----\nD == 1\n"), ParseError);
}

TEST_CASE("string literals: escapes round-trip, control characters rejected") {
  auto e = parse_expr_text(R"("a\"b\\c")");
  CHECK(e->name == "a\"b\\c");
  CHECK(print_expr(e) == R"("a\"b\\c")");
  CHECK(expr_eq(parse_expr_text(print_expr(e)), e));
}

TEST_CASE("proof parsing: sequences end with QED, labels unique, steps after QED rejected") {
  CHECK_THROWS_AS(parse_module(R"(---- MODULE M ----
CONSTANTS p
THEOREM T == p
<1>1. p
====
)"),
                  ParseError);
  CHECK_THROWS_AS(parse_module(R"(---- MODULE M ----
CONSTANTS p
THEOREM T == p
<1>1. p
<1>1. p
<1>q. QED
====
)"),
                  ParseError);
  auto ok = parse_module(R"(---- MODULE M ----
CONSTANTS p, q
THEOREM T == p \/ q \/ ~p
<1>1. p \/ ~p
  OBVIOUS
<1>2. USE T0 DEF Foo
<1>q. QED BY <1>1
====
)");
  const auto& proof = ok.theorems[0].proof;
  REQUIRE(proof);
  REQUIRE(proof->kind == ProofKind::sequence);
  REQUIRE(proof->steps.size() == 3);
  CHECK(proof->steps[0]->kind == ProofKind::assert_step);
  CHECK(proof->steps[0]->subproof->kind == ProofKind::leaf_obvious);
  CHECK(proof->steps[1]->kind == ProofKind::use_step);
  CHECK(proof->steps[1]->facts.size() == 1);
  CHECK(proof->steps[1]->defs == std::vector<std::string>{"Foo"});
  CHECK(proof->steps[2]->kind == ProofKind::qed_step);
  REQUIRE(proof->steps[2]->subproof);
  CHECK(proof->steps[2]->subproof->facts[0].is_step);
}
