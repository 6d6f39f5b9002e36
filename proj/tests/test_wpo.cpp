#include "doctest.h"
#include "islarr/checker.hpp"
#include "islarr/entailment.hpp"
#include "islarr/wpo.hpp"

using namespace islarr;

namespace {

// models(wpo) == WPO[[P, C, eps]] over exact states
bool oracle(const std::string& pre, const std::string& prog, Exit e, Value vmax, int case_cap = 16) {
  auto p = parse_assertion(pre);
  auto c = parse_command(prog);
  Universe u = Universe::over({free_vars(p), free_vars(c)}, vmax);
  WpoBudget b;
  b.case_cap = case_cap;
  auto w = wpo(p, c, e, b);
  return models(w, u) == wpo_semantic(p, c, e, u);
}

SymbolicHeap first_case(const std::string& pre, const std::string& prog, const std::string& must) {
  CanoOptions o;
  o.case_cap = 16;
  auto m = parse_pure(must);
  for (auto& d : cano(parse_assertion(pre), parse_command(prog), o).disjuncts)
    if (entails_pure_all(d.body.pure, m) == Answer::Yes) return d.body;
  FAIL("no canonical case with " << must);
  return {};
}

}  // namespace

TEST_SUITE("wpo") {
  TEST_CASE("basic rows") {
    auto c = parse_command("skip");
    CHECK(wpo(Assertion::falsity(), c, Exit::Ok).is_false());
    CHECK(wpo(parse_assertion("x |-> 1"), c, Exit::Er).is_false());
    auto psi = parse_heap("x |-> 1 * null < x * x < x + 1");
    CHECK(wpo_sh(psi, parse_command("error()"), Exit::Ok).is_false());
    auto er = wpo_sh(psi, parse_command("error()"), Exit::Er);
    REQUIRE(er.disjuncts.size() == 1);
    CHECK(er.disjuncts[0].body.normalized() == psi.normalized());
    auto as = wpo_sh(parse_heap("emp"), parse_command("x := 1"), Exit::Ok);
    REQUIRE(as.disjuncts.size() == 1);
    CHECK(as.disjuncts[0].vars.size() == 1);
    CHECK(as.disjuncts[0].body.normalized() == parse_heap("emp * x == 1").normalized());
    CHECK(oracle("x |-> 1 * y == 2", "skip", Exit::Ok, 4));
  }

  TEST_CASE("alloc") {
    CHECK(wpo_sh(parse_heap("emp"), parse_command("x := alloc(2)"), Exit::Er).is_false());
    CHECK(oracle("emp", "x := alloc(2)", Exit::Ok, 5));
    CHECK(oracle("narr(y, y+3)", "x := alloc(2)", Exit::Ok, 6));
    CHECK(oracle("narr(y, y+1) * narr(z, z+1)", "x := alloc(2)", Exit::Ok, 5));
  }

  TEST_CASE("free") {
    auto psi = first_case("x |-> 7", "free(x)", "b(x) == x * e(x) == x + 1");
    auto u = Universe::over({{"x"}}, 8);
    CHECK(models(wpo_sh(psi, parse_command("free(x)"), Exit::Ok), u) ==
          wpo_semantic(Assertion::of(psi), parse_command("free(x)"), Exit::Ok, u));
    auto nul = first_case("emp", "free(x)", "b(x) == null");
    auto er = wpo_sh(nul, parse_command("free(x)"), Exit::Er);
    REQUIRE(er.disjuncts.size() == 1);
    CHECK(er.disjuncts[0].body.normalized() == nul.normalized());
    CHECK(wpo_sh(nul, parse_command("free(x)"), Exit::Ok).is_false());
    CHECK(oracle("arr(a, a+4) * b(a+1) == a+1 * e(a+1) == a+3", "free(a+1)", Exit::Ok, 6));
    CHECK(oracle("arr(a, a+3)", "free(a+1)", Exit::Er, 5));
  }

  TEST_CASE("load") {
    auto psi = first_case("y |-> 5", "x := [t]", "y == t");
    auto w = wpo_sh(psi, parse_command("x := [t]"), Exit::Ok);
    REQUIRE(w.disjuncts.size() == 1);
    auto v = w.disjuncts[0].vars.at(0);
    auto expect = substitute(psi, "x", Term::var(v)) * eq(Term::var("x"), Term::nat(5));
    CHECK(w.disjuncts[0].body.normalized() == expect.normalized());
    CHECK(wpo_sh(first_case("y |-> 5", "x := [t]", "null < b(t)"), parse_command("x := [t]"), Exit::Er).is_false());
    CHECK(oracle("arr(y, z)", "x := [y+1]", Exit::Ok, 5));
    CHECK(oracle("arr(x, x+2)", "x := [x]", Exit::Ok, 5));
    CHECK(oracle("emp", "x := [y]", Exit::Er, 4));
  }

  TEST_CASE("the load rule as printed is unsound") {
    // post exists x'. psi[x := x'] forgets that x holds the loaded cell
    auto c = parse_command("x := [y+1]");
    int checked = 0;
    for (auto& d : cano(parse_assertion("arr(y, y+3)"), c).disjuncts) {
      Fresh f;
      f.reserve(free_vars(d.body));
      f.reserve(all_vars(c));
      auto concl = heap_rule_conclusions(d.body, c, Exit::Ok, f);
      if (std::none_of(concl.begin(), concl.end(), [](auto& r) { return r.rule == "LoadArr"; })) continue;
      std::string v = f();
      Triple printed{Assertion::of(d.body), c, Exit::Ok, Assertion::of({v}, substitute(d.body, "x", Term::var(v)))};
      auto u = universe_for(printed, 5);
      auto verdict = check_triple_semantic(printed, u);
      if (models(printed.post, u).empty()) continue;
      CHECK(verdict.status == Status::Invalid);
      REQUIRE(verdict.witness);
      CHECK(verdict.witness->heap.at(verdict.witness->store.at("y") + 1) != verdict.witness->store.at("x"));
      // the split used instead
      Triple fixed{Assertion::of(d.body), c, Exit::Ok, wpo_sh(d.body, c, Exit::Ok)};
      CHECK(check_triple_semantic(fixed, u).status == Status::Valid);
      ++checked;
    }
    CHECK(checked > 0);
  }

  TEST_CASE("store") {
    auto psi = first_case("y |-> 3", "[t] := 2", "y == t");
    auto w = wpo_sh(psi, parse_command("[t] := 2"), Exit::Ok);
    REQUIRE(w.disjuncts.size() == 1);
    SymbolicHeap expect = psi;
    expect.spatial = {pto(Term::var("t"), Term::nat(2))};
    CHECK(w.disjuncts[0].body.normalized() == expect.normalized());
    CHECK(oracle("arr(y, z)", "[y] := x", Exit::Ok, 5));
    CHECK(oracle("arr(y, z)", "[y+1] := 2", Exit::Ok, 5));
    CHECK(oracle("arr(y, y+2)", "[y+1] := 2", Exit::Ok, 5));
    CHECK(oracle("arr(y, z)", "[z] := x", Exit::Er, 5));
  }

  TEST_CASE("star unrolls to the bound") {
    auto p = parse_assertion("x == 0 * emp");
    auto c = parse_command("(x := x + 1)*");
    for (int k = 0; k <= 2; ++k) {
      WpoBudget b;
      b.loop_bound = k;
      auto w = wpo(p, c, Exit::Ok, b);
      CHECK(w.truncated);
      CHECK(w.disjuncts.size() == static_cast<std::size_t>(k + 1));
    }
  }

  TEST_CASE("sequences, choice and local") {
    CHECK(oracle("emp", "x := alloc(1); free(x)", Exit::Ok, 4));
    CHECK(oracle("emp", "x := alloc(2); free(x+1)", Exit::Er, 4));
    CHECK(oracle("x |-> 1", "free(x); y := [x]", Exit::Er, 4));
    CHECK(oracle("emp", "{ x := 1 } + { x := 2 }", Exit::Ok, 4));
    CHECK(oracle("x |-> 1", "local x in { x := 2 }", Exit::Ok, 4));
    CHECK(oracle("x == 1 * emp", "local x := x + 1 in { y := x }", Exit::Ok, 4));
  }

  TEST_CASE("coverage counters") {
    reset_wpo_coverage();
    wpo(parse_assertion("x |-> -"), parse_command("free(x)"), Exit::Ok);
    auto cov = wpo_coverage();
    CHECK(cov.count("FreeArr3"));
    reset_wpo_coverage();
    CHECK(wpo_coverage().empty());
  }

  TEST_CASE("size limit") {
    CHECK_THROWS_AS(wpo(parse_assertion("arr(a, a+10) * b(a) == a * e(a) == a+10"), parse_command("free(a+1)"),
                        Exit::Er),
                    SizeLimitError);
  }
}
