#include <catch2/catch_amalgamated.hpp>

#include "mtp/flatten.hpp"
#include "mtp/parser.hpp"
#include "mtp/printer.hpp"
#include "mtp/rewrite.hpp"
#include "support/eval.hpp"
#include "support/gen.hpp"

using namespace mtp;

namespace {

ModuleAst fixture_module() {
  ModuleAst m = parse_module(R"(
---- MODULE Fix ----
CONSTANTS c, d, e, f
VARIABLES u, v, w, flag
P(x, y) == x + 2 * y
Q(x) == P(x, x) + 1
O(x, y) == x = 20 * y + 2
L(x, y) == x = l::(y * 20) + 2
LMod(x, y) == x = 7 * y + l::(20 * y) + 2
NS(x) == x' = x
UsesNS(x) == NS(x)
Rigid(x) == x + 1
StateDep(x) == x + u
S == {1, 2}
====
)");
  ModuleAst flat = flatten(m, {});
  annotate_definitions(flat);
  return flat;
}

ExprPtr resolved(const ModuleAst& m, const std::string& text) {
  detail::Scope sc;
  for (const auto& c : m.constants) sc.constants.insert(c);
  for (const auto& v : m.variables) sc.variables.insert(v);
  for (const auto& d : m.definitions) sc.def_arity[d.name] = d.params.size();
  std::vector<std::string> bound;
  return detail::Resolver(sc, {}).resolve(parse_expr_text(text), bound);
}

UsabilityContext usable(std::initializer_list<std::string> names) {
  UsabilityContext ctx;
  for (const auto& n : names) ctx.add(n, UsableOrigin::cited);
  return ctx;
}

}  // namespace

TEST_CASE("prime distribution: commuted over operators, absorbed by constants") {
  auto m = fixture_module();
  CHECK(print_expr(distribute_prime(resolved(m, "(u = v + 2 * c)'"), m)) == "u' = v' + 2 * c");
  // a constant expression equals its prime
  auto ce = resolved(m, "(2 * c + d)'");
  CHECK(print_expr(distribute_prime(ce, m)) == "2 * c + d");
  // bounded quantifier: constant bound keeps, body variable gets the prime
  auto q = distribute_prime(expand_usable(resolved(m, "(\\A x \\in S: x < v)'"), usable({"S"}), m), m);
  CHECK(print_expr(q) == "\\A x \\in {1, 2}: x < v'");
}

TEST_CASE("prime distribution properties on random expressions") {
  auto m = fixture_module();
  gen::Rng rng(7001);
  gen::TwoStateGen g(rng);
  for (int i = 0; i < 300; ++i) {
    ExprPtr e = g.formula(3);
    ExprPtr d = distribute_prime(mk_prime(e), m);
    CHECK(primes_only_on_variables(d));
    if (!e->cache_has_var) CHECK(expr_eq(d, e));  // constancy
  }
}

TEST_CASE("semantic soundness: two-state evaluator agrees with distribute_prime") {
  auto m = fixture_module();
  gen::Rng rng(7002);
  gen::TwoStateGen g(rng);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    ExprPtr e = (i % 3 == 0) ? g.int_term(3) : g.formula(3);
    ExprPtr direct = mk_prime(e);
    ExprPtr dist = distribute_prime(direct, m);
    oracle::Env env;
    env.now = {{"u", oracle::Value::of_int((long)(rng() % 5) - 2)},
               {"v", oracle::Value::of_int((long)(rng() % 5) - 2)},
               {"flag", oracle::Value::of_bool(rng() % 2 == 0)},
               {"w", oracle::Value::of_str(rng() % 2 ? "a" : "b")}};
    env.next = {{"u", oracle::Value::of_int((long)(rng() % 5) - 2)},
                {"v", oracle::Value::of_int((long)(rng() % 5) - 2)},
                {"flag", oracle::Value::of_bool(rng() % 2 == 0)},
                {"w", oracle::Value::of_str(rng() % 2 ? "a" : "b")}};
    env.constants = {{"c", oracle::Value::of_int(1)}, {"d", oracle::Value::of_int(-1)}};
    oracle::Value a = oracle::eval(direct, env, false);
    oracle::Value b = oracle::eval(dist, env, false);
    INFO("expr: " << print_expr(e));
    CHECK(a == b);
    checked++;
  }
  CHECK(checked == 300);
}

TEST_CASE("prime over a hidden state-dependent operator is a conservative refusal") {
  auto m = fixture_module();
  CHECK_THROWS_AS(distribute_prime(resolved(m, "(StateDep(1))'"), m), RewriteError);
  // rigid operators commute instead
  auto r = distribute_prime(resolved(m, "(Rigid(v))'"), m);
  CHECK(print_expr(r) == "Rigid(v')");
}

TEST_CASE("expansion: beta-reduction without evaluation, hidden untouched, fixpoint") {
  auto m = fixture_module();
  auto p = resolved(m, "P(2, 20)");
  CHECK(print_expr(expand_usable(p, usable({"P"}), m)) == "2 + 2 * 20");
  CHECK(print_expr(expand_usable(p, usable({}), m)) == "P(2, 20)");
  // nested expansion reaches a fixpoint inside-out
  auto q = resolved(m, "Q(P(1, 2))");
  auto full = expand_usable(q, usable({"P", "Q"}), m);
  CHECK(print_expr(full) == "1 + 2 * 2 + 2 * (1 + 2 * 2) + 1");
}

TEST_CASE("expansion confluence: order of usable sets does not matter") {
  auto m = fixture_module();
  gen::Rng rng(7003);
  for (int i = 0; i < 50; ++i) {
    std::string text = (i % 2) ? "Q(P(1, c)) = P(Q(d), 2)" : "P(Q(c), P(d, Q(1)))";
    auto e = resolved(m, text);
    auto a = expand_usable(expand_usable(e, usable({"P"}), m), usable({"Q", "P"}), m);
    auto b = expand_usable(expand_usable(e, usable({"Q"}), m), usable({"P", "Q"}), m);
    auto c = expand_usable(e, usable({"P", "Q"}), m);
    CHECK(expr_eq(a, c));
    CHECK(expr_eq(b, c));
  }
}

TEST_CASE("capture-avoiding substitution renames binders") {
  auto m = parse_module(R"(
---- MODULE Cap ----
CONSTANTS y
W(x) == \E b: b = x
====
)");
  auto flat = flatten(m, {});
  annotate_definitions(flat);
  // substituting an argument that mentions `b` must not be captured
  std::map<std::string, ExprPtr> sub{{"x", mk_ident("b", IdentKind::constant)}};
  auto body = flat.definitions[0].body;
  auto inst = detail::substitute(body, sub);
  // the binder is renamed, the inserted b stays free
  REQUIRE(inst->is_binder());
  CHECK(inst->name != "b");
  CHECK(print_expr(inst->binder_body()).find("= b") != std::string::npos);
}

TEST_CASE("substitutivity classification") {
  auto m = fixture_module();
  std::map<std::string, TriState> env;
  for (const auto& d : m.definitions) env[d.name] = d.substitutive;
  CHECK(m.find_def("Rigid")->substitutive == TriState::yes);   // x + 1
  CHECK(m.find_def("NS")->substitutive == TriState::no);       // x' = x
  CHECK(m.find_def("UsesNS")->substitutive == TriState::no);   // defined via NS
  CHECK(m.find_def("P")->substitutive == TriState::yes);
  CHECK(m.find_def("StateDep")->substitutive == TriState::yes);  // state alone breaks rigidity only
  CHECK(m.find_def("StateDep")->rigid == false);
  CHECK(m.find_def("Rigid")->rigid == true);
}

TEST_CASE("hashing: hidden non-substitutive applications become stable opaque atoms") {
  auto m = fixture_module();
  auto g1 = resolved(m, "NS(e /\\ f) = NS(f /\\ e)");
  auto h1 = hash_hidden(g1, usable({}), m);
  REQUIRE(h1->kind == ExprKind::eq);
  CHECK(h1->kids[0]->kind == ExprKind::ident);
  CHECK(h1->kids[1]->kind == ExprKind::ident);
  CHECK(h1->kids[0]->name != h1->kids[1]->name);  // distinct texts, distinct atoms
  CHECK(h1->kids[0]->name.rfind("hash_t_", 0) == 0);

  auto g2 = resolved(m, "NS(e /\\ f) = NS(e /\\ f)");
  auto h2 = hash_hidden(g2, usable({}), m);
  CHECK(h2->kids[0]->name == h2->kids[1]->name);  // determinism

  // whitespace in the source does not matter: hashing keys on canonical print
  auto g3 = resolved(m, "NS( e    /\\ f )");
  auto h3 = hash_hidden(mk_eq(g3, g3), usable({}), m);
  CHECK(h3->kids[0]->name == h1->kids[0]->name);

  // usable applications are not hashed (they were expanded before this step)
  auto h4 = hash_hidden(expand_usable(g1, usable({"NS"}), m), usable({"NS"}), m);
  CHECK(print_expr(h4).find("hash_") == std::string::npos);

  // hidden but substitutive: left as an uninterpreted application
  auto g5 = resolved(m, "Rigid(e) = Rigid(f)");
  auto h5 = hash_hidden(g5, usable({}), m);
  CHECK(print_expr(h5) == "Rigid(e) = Rigid(f)");
}

TEST_CASE("formula vs term position marker in hashed atoms") {
  auto m = fixture_module();
  auto formula_pos = hash_hidden(resolved(m, "NS(e)"), usable({}), m);
  CHECK(formula_pos->name.rfind("hash_p_", 0) == 0);
  auto term_pos = hash_hidden(resolved(m, "NS(e) = c"), usable({}), m);
  CHECK(term_pos->kids[0]->name.rfind("hash_t_", 0) == 0);
}

TEST_CASE("subexpression references: positional and labelled goldens") {
  auto m = fixture_module();
  auto r1 = resolve_ref("O", {mk_int(3), mk_int(4)}, {{false, 2, ""}, {false, 1, ""}}, m);
  CHECK(print_expr(r1) == "20 * 4");
  auto r2 = resolve_ref("L", {mk_int(3), mk_int(4)}, {{true, 0, "l"}}, m);
  CHECK(print_expr(r2) == "4 * 20");
  CHECK_THROWS_AS(resolve_ref("O", {mk_int(3), mk_int(4)}, {{false, 9, ""}}, m), RewriteError);
  CHECK_THROWS_AS(resolve_ref("O", {mk_int(3), mk_int(4)}, {{true, 0, "nope"}}, m), RewriteError);
  CHECK_THROWS_AS(resolve_ref("O", {mk_int(3)}, {{false, 1, ""}}, m), RewriteError);
}

TEST_CASE("label persistence: the labelled reference survives definition edits") {
  auto m = fixture_module();
  auto before = resolve_ref("L", {mk_int(3), mk_int(4)}, {{true, 0, "l"}}, m);
  auto after = resolve_ref("LMod", {mk_int(3), mk_int(4)}, {{true, 0, "l"}}, m);
  // the label still designates the 20*y product in the modified body
  CHECK(print_expr(after) == "20 * 4");
  CHECK(print_expr(before) == "4 * 20");
}

TEST_CASE("resolve_all_refs rewrites references embedded in expressions") {
  auto m = fixture_module();
  auto e = resolved(m, "O(3, 4)!2!1 + L(3, 4)!l");
  auto r = resolve_all_refs(e, m);
  CHECK(print_expr(r) == "20 * 4 + 4 * 20");
  CHECK(print_expr(strip_labels(resolved(m, "L(c, d)"))) == "L(c, d)");
}

TEST_CASE("pipeline order: expansion, then priming, then hashing") {
  auto m = fixture_module();
  // NS usable: expansion turns NS(u) into u' = u before priming runs
  auto e = resolved(m, "NS(u)");
  auto expanded = expand_usable(e, usable({"NS"}), m);
  CHECK(print_expr(expanded) == "u' = u");
  auto dist = distribute_prime(expanded, m);
  CHECK(print_expr(dist) == "u' = u");
  // NS hidden: hashing (not expansion) takes over after prime distribution
  auto hidden = hash_hidden(distribute_prime(resolved(m, "NS(c)"), m), usable({}), m);
  CHECK(hidden->kind == ExprKind::ident);
}
