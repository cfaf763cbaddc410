#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "mtp/manager.hpp"
#include "mtp/tableau.hpp"
#include "mtp/trace_check.hpp"
#include "support/gen.hpp"
#include "support/mutations.hpp"

using namespace mtp;

namespace {

CheckResult check_of(const Obligation& ob, const ProofTrace& t) {
  std::vector<ExprPtr> hyps;
  for (const auto& [n, h] : ob.hypotheses) hyps.push_back(h);
  return check_trace(hyps, ob.goal, t, ob.fingerprint);
}

}  // namespace

TEST_CASE("kernel accepts every trace the prover emits across the corpus") {
  const char* modules[] = {"Peterson", "Counter", "Propositional", "FiniteSets",
                           "Arith",    "Hiding",  "Refs",          "Semaphore"};
  size_t checked = 0;
  for (const char* name : modules) {
    auto flat = load_and_flatten(std::string(MTP_SOURCE_DIR) + "/corpus/" + name + ".mt");
    for (const auto& ob : generate_obligations(flat)) {
      if (ob.omitted || ob.hint != BackendHint::none) continue;
      TableauResult res = tableau_prove(ob);
      if (!res.proved()) continue;
      CheckResult chk = check_of(ob, res.trace);
      INFO(name << " " << ob.location() << ": " << chk.reason << " @" << chk.position);
      REQUIRE(chk.accepted);
      // and again after a serialization round trip
      CheckResult chk2 = check_of(ob, parse_trace(write_trace(res.trace)));
      REQUIRE(chk2.accepted);
      checked++;
    }
  }
  CHECK(checked > 70);
}

TEST_CASE("randomized valid propositional traces are always certified") {
  gen::Rng rng(515151);
  size_t certified = 0;
  for (int i = 0; i < 250; ++i) {
    ExprPtr f = gen::prop_formula(rng, 3, 6);
    Obligation ob = mutations::make_ob({}, f);
    TableauResult res = tableau_prove(ob);
    if (!res.proved()) continue;
    REQUIRE(check_of(ob, res.trace).accepted);
    certified++;
  }
  CHECK(certified > 10);
}

TEST_CASE("the curated mutation suite is rejected, every single entry") {
  auto cases = mutations::curated_mutations();
  REQUIRE(cases.size() >= 20);
  for (const auto& c : cases) {
    CheckResult chk = check_of(c.obligation, c.trace);
    INFO(c.name);
    CHECK_FALSE(chk.accepted);
    CHECK_FALSE(chk.reason.empty());
  }
}

TEST_CASE("a trace replayed against a different obligation is rejected") {
  Obligation a = mutations::make_ob({}, parse_expr_text("p \\/ ~p"));
  Obligation b = mutations::make_ob({}, parse_expr_text("q \\/ ~q"));
  TableauResult res = tableau_prove(a);
  REQUIRE(res.proved());
  CheckResult chk = check_of(b, res.trace);
  CHECK_FALSE(chk.accepted);
  CHECK(chk.reason.find("fingerprint") != std::string::npos);
}

TEST_CASE("rejection reports a position") {
  auto cases = mutations::curated_mutations();
  for (const auto& c : cases) {
    if (c.name != "swapped-conclusion") continue;
    CheckResult chk = check_of(c.obligation, c.trace);
    CHECK_FALSE(chk.accepted);
    CHECK_FALSE(chk.position.empty());
  }
}

TEST_CASE("audit_rule_table is deterministic and documents the schemas") {
  auto t1 = audit_rule_table();
  auto t2 = audit_rule_table();
  REQUIRE(t1.size() == t2.size());
  for (size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1[i].first == t2[i].first);
    CHECK(t1[i].second == t2[i].second);
  }
  bool has_alpha_and = false, has_bounded = false;
  for (const auto& [name, schema] : t1) {
    if (name == "alpha-and" && schema == "from A∧B derive A, B") has_alpha_and = true;
    if (schema.find("bounded-quantifier instantiation") != std::string::npos) has_bounded = true;
  }
  CHECK(has_alpha_and);
  CHECK(has_bounded);
}

TEST_CASE("kernel minimality: small, and independent of the prover") {
  std::ifstream in(std::string(MTP_SOURCE_DIR) + "/include/mtp/trace_check.hpp");
  REQUIRE(in.good());
  std::string line;
  size_t lines = 0;
  bool bad_include = false;
  while (std::getline(in, line)) {
    lines++;
    if (line.find("#include") == std::string::npos) continue;
    if (line.find("tableau.hpp") != std::string::npos ||
        line.find("rewrite.hpp") != std::string::npos ||
        line.find("obligation.hpp") != std::string::npos ||
        line.find("presburger.hpp") != std::string::npos ||
        line.find("smt.hpp") != std::string::npos || line.find("manager.hpp") != std::string::npos)
      bad_include = true;
  }
  CHECK_FALSE(bad_include);
  CHECK(lines < 900);  // tracked: the kernel must stay reviewably small
}

TEST_CASE("trace serialization round-trips unusual content") {
  Obligation ob =
      mutations::make_ob({parse_expr_text("pc = \"a \\\\ b\"")}, parse_expr_text("pc = pc"));
  TableauResult res = tableau_prove(ob);
  REQUIRE(res.proved());
  ProofTrace back = parse_trace(write_trace(res.trace));
  CHECK(check_of(ob, back).accepted);
  CHECK(write_trace(back) == write_trace(res.trace));
}
