#include "doctest.h"
#include "islarr/checker.hpp"
#include "islarr/entailment.hpp"

using namespace islarr;

namespace {

Verdict sem(const Triple& t, Value vmax = 4) { return check_triple_semantic(t, universe_for(t, vmax)); }
Verdict logi(const Triple& t, Value vmax = 4) { return check_triple_logical(t, universe_for(t, vmax)); }

}  // namespace

TEST_SUITE("checker") {
  TEST_CASE("intro triples") {
    auto good = make_triple("x |-> -", "free(x)", Exit::Ok, "x !|->");
    CHECK(sem(good).status == Status::Valid);
    CHECK(logi(good).status == Status::Valid);

    auto naive = make_triple("x |-> - * x |-> -", "free(x)", Exit::Ok, "emp * x |-> -");
    auto v = sem(naive);
    CHECK(v.status == Status::Invalid);
    REQUIRE(v.witness);
    auto u = universe_for(naive, 4);
    CHECK_FALSE(wpo_semantic(naive.pre, naive.prog, naive.exit, u).contains(*v.witness));
    CHECK(logi(naive).status == Status::Invalid);

    auto framed = make_triple("x != null * emp * x |-> 1", "free(x)", Exit::Er, "x != null * emp * x |-> 1");
    CHECK(sem(framed).status == Status::Invalid);
    CHECK(sem(make_triple("x != null * emp", "free(x)", Exit::Er, "x != null * emp")).status == Status::Valid);
  }

  TEST_CASE("wpo itself and false are valid posts") {
    for (auto [pre, prog] : {std::pair{"arr(x, x+2)", "[x+1] := 3"}, std::pair{"emp", "x := alloc(1)"},
                             std::pair{"x |-> 2", "y := [x]; free(x)"}}) {
      for (Exit e : {Exit::Ok, Exit::Er}) {
        Triple t{parse_assertion(pre), parse_command(prog), e, {}};
        WpoBudget b;
        b.case_cap = 16;
        t.post = wpo(t.pre, t.prog, e, b);
        CHECK(sem(t).status == Status::Valid);
        CHECK(check_triple_logical(t, universe_for(t, 4), b).status == Status::Valid);
        t.post = Assertion::falsity();
        CHECK(sem(t).status == Status::Valid);
        CHECK(check_triple_logical(t, universe_for(t, 4), b).status == Status::Valid);
      }
    }
  }

  TEST_CASE("loops are bounded") {
    auto t = make_triple("x == 0 * emp", "(x := x + 1)*", Exit::Ok, "x == 2 * emp");
    CHECK(sem(t).status == Status::BoundedValid);
    CHECK(logi(t).status == Status::BoundedValid);
    auto far = make_triple("x == 0 * emp", "(x := x + 1)*", Exit::Ok, "x == 3 * emp");
    CHECK(sem(far).status != Status::Valid);
  }

  TEST_CASE("exit codes follow status") {
    CHECK(exit_code(Status::Valid) == 0);
    CHECK(exit_code(Status::Invalid) == 1);
    CHECK(exit_code(Status::BoundedValid) == 2);
    CHECK(exit_code(Status::Unknown) == 2);
  }

  TEST_CASE("rule instances") {
    auto skip = make_triple("x |-> 1", "skip", Exit::Ok, "x |-> 1");
    CHECK(check_rule_instance("Skip", {}, {}, skip).accepted);
    CHECK_FALSE(check_rule_instance("Skip", {}, {}, make_triple("x |-> 1", "skip", Exit::Ok, "x |-> 2")).accepted);
    CHECK(check_rule_instance("Cons", {skip}, {}, skip).accepted);
    CHECK(check_rule_instance("cons", {skip}, {}, skip).accepted);

    auto prem = make_triple("x != null * emp", "free(x)", Exit::Er, "x != null * emp");
    auto concl = make_triple("x != null * emp * x |-> 1", "free(x)", Exit::Er, "x != null * emp * x |-> 1");
    SideConditions fr;
    fr.frame = parse_heap("x |-> 1");
    auto rc = check_rule_instance("Frame-Ok", {prem}, fr, concl);
    CHECK_FALSE(rc.accepted);
    CHECK_FALSE(rc.diagnostics.empty());

    SideConditions mod;
    mod.frame = parse_heap("x |-> 1");
    auto p2 = make_triple("emp", "x := 1", Exit::Ok, "exists v. emp * x == 1");
    auto c2 = make_triple("emp * x |-> 1", "x := 1", Exit::Ok, "exists v. emp * x == 1 * x |-> 1");
    CHECK_FALSE(check_rule_instance("Frame-Ok", {p2}, mod, c2).accepted);

    CHECK_THROWS_AS(check_rule_instance("Frame", {}, {}, skip), std::invalid_argument);

    SideConditions ex;
    ex.var = "x";
    auto pe = make_triple("x |-> 1", "free(x)", Exit::Ok, "x !|->");
    CHECK_FALSE(check_rule_instance("Exist", {pe}, ex, make_triple("exists x. x |-> 1", "free(x)", Exit::Ok,
                                                                    "exists x. x !|->"))
                    .accepted);
  }

  TEST_CASE("heap rule instances need canonical preconditions") {
    auto t = make_triple("x |-> 1", "free(x)", Exit::Ok, "x !|->");
    CHECK_FALSE(check_rule_instance("FreeArr3", {}, {}, t).accepted);
    CHECK(check_rule_instance("AllocEr", {}, {}, make_triple("null < x * x < 2", "x := alloc(2)", Exit::Er, "false")).accepted);
  }

  TEST_CASE("find bugs") {
    WpoBudget b;
    b.case_cap = 16;
    auto r = find_bugs(parse_assertion("arr(a, a+10) * b(a) == a * e(a) == a+10"), parse_command("free(a+1)"),
                       Universe::over({{"a"}}, 11), b);
    REQUIRE_FALSE(r.empty());
    CHECK(r.source_command[0] == "free(a + 1)");
    CHECK(entails_pure(r.er_disjuncts[0].body.pure, neq(parse_term("b(a+1)"), parse_term("a+1"))) == Answer::Yes);

    CHECK(find_bugs(parse_assertion("x |-> 1"), parse_command("skip"), Universe::over({{"x"}}, 4)).empty());

    // every witness is er-reachable
    auto p = parse_assertion("emp");
    auto c = parse_command("x := [y]");
    Universe u = Universe::over({{"x", "y"}}, 4);
    auto br = find_bugs(p, c, u);
    REQUIRE_FALSE(br.empty());
    auto reach = wpo_semantic(p, c, Exit::Er, u);
    for (auto& w : br.witness_states) CHECK(reach.contains(w));
    for (auto& d : br.er_disjuncts) CHECK(entails_pure(d.body.pure, eq(parse_term("b(y)"), Term::null())) == Answer::Yes);
  }

  TEST_CASE("expressiveness diff") {
    Universe u = Universe::over({{"x"}}, 4);
    auto d = expressiveness_diff(parse_assertion("emp"), parse_command("skip"), Exit::Ok, u);
    CHECK(d.status == Status::Valid);
    auto d2 = expressiveness_diff(parse_assertion("x |-> -"), parse_command("free(x)"), Exit::Ok, u);
    CHECK(d2.status == Status::Valid);
    CHECK(d2.only_wpo_count + d2.only_semantic_count == 0);
  }

  TEST_CASE("json field names") {
    auto v = sem(make_triple("x |-> - * x |-> -", "free(x)", Exit::Ok, "emp * x |-> -"));
    auto j = to_json(v);
    for (auto k : {"status", "witness", "truncated"}) CHECK(j.contains(k));
    CHECK(j["status"] == "Invalid");
    BugReport br;
    CHECK(to_json(br).contains("er_disjuncts"));
    CHECK(to_json(br)["status"] == "NoBugs");
  }

  TEST_CASE("corpora") {
    auto h = hand_corpus();
    CHECK(h.size() >= 30);
    auto r1 = random_corpus(5, 20), r2 = random_corpus(5, 20);
    REQUIRE(r1.size() == 20);
    for (std::size_t i = 0; i < r1.size(); ++i) {
      CHECK(r1[i].pre == r2[i].pre);
      CHECK(r1[i].prog == r2[i].prog);
      auto vs = free_vars(r1[i].pre);
      auto pv = free_vars(r1[i].prog);
      vs.insert(pv.begin(), pv.end());
      CHECK(vs.size() <= 3);
      CHECK(r1[i].vmax <= 6);
    }
  }
}
