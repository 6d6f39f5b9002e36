#include "doctest.h"
#include "gen.hpp"

using namespace islarr;

namespace {

ConcreteState st(std::map<std::string, Value> s, std::map<Value, std::optional<Value>> h,
                 std::vector<std::pair<Value, Value>> b) {
  ConcreteState c;
  c.store = std::move(s);
  c.heap = std::move(h);
  c.blocks = std::move(b);
  return c;
}

// reference evaluator: blocks scanned directly
Value eval_ref(const Term& t, const ConcreteState& s) {
  switch (t.kind()) {
    case TermKind::Null: return 0;
    case TermKind::Nat: return t.nat_value();
    case TermKind::Var: return s.store.count(t.name()) ? s.store.at(t.name()) : 0;
    case TermKind::Add: return eval_ref(t.lhs(), s) + eval_ref(t.rhs(), s);
    default: {
      Value l = eval_ref(t.arg(), s);
      for (auto& [lo, hi] : s.blocks)
        if (lo <= l && l < hi) return t.kind() == TermKind::Base ? lo : hi;
      return 0;
    }
  }
}

}  // namespace

TEST_SUITE("semantics") {
  TEST_CASE("term interpretation") {
    auto s = st({{"x", 3}}, {}, {});
    CHECK(interp_term(Term::null(), s) == 0);
    CHECK(interp_term(parse_term("b(x)"), s) == 0);
    auto s2 = st({{"x", 2}}, {{2, 0}, {3, 0}, {4, 0}}, {{2, 5}});
    CHECK(interp_term(parse_term("e(x)"), s2) == 5);
    CHECK(interp_term(parse_term("b(x+2)"), s2) == 2);
  }

  TEST_CASE("interpretation oracle on random terms") {
    gen::Rng g(21);
    for (int i = 0; i < 1000; ++i) {
      auto s = g.state(7);
      REQUIRE(s.well_formed());
      Term t = g.term(4);
      CHECK(interp_term(t, s) == eval_ref(t, s));
    }
  }

  TEST_CASE("satisfaction") {
    CHECK(satisfies(st({}, {}, {}), parse_heap("emp")));
    auto s = st({{"x", 2}, {"y", 4}}, {{2, 7}, {3, 9}}, {{2, 4}});
    CHECK(satisfies(s, parse_heap("arr(x, y)")));
    CHECK_FALSE(satisfies(s, parse_heap("arr(x, y+1)")));
    CHECK(satisfies(s, parse_heap("x |-> 7 * x+1 |-> 9")));
    CHECK_FALSE(satisfies(s, parse_heap("x |-> 7")));  // exact footprint
    CHECK_FALSE(satisfies(st({{"x", 1}}, {{1, 0}}, {{1, 2}}), parse_heap("arr(x, x)")));
    Universe u = Universe::over({{"x"}}, 4);
    CHECK(models(parse_assertion("x |-> - * x |-> -"), u, false).empty());
  }

  TEST_CASE("negative heap") {
    auto s = st({{"x", 1}}, {{1, std::nullopt}}, {});
    CHECK(satisfies(s, parse_heap("x !|->")));
    CHECK(satisfies(s, parse_heap("narr(x, x+1)")));
  }

  TEST_CASE("denotation") {
    Universe u = Universe::over({{"x"}}, 3);
    auto s = st({{"x", 0}}, {}, {});
    auto skip = denote(parse_command("skip"), Exit::Ok, s, u);
    CHECK(skip.size() == 1);
    CHECK(skip.contains(s));

    auto s2 = st({{"x", 2}}, {{1, 0}, {2, 0}}, {{1, 3}});
    auto er = denote(parse_command("free(x)"), Exit::Er, s2, u);
    CHECK(er.size() == 1);
    CHECK(er.contains(s2));
    CHECK(denote(parse_command("free(x)"), Exit::Ok, s2, u).empty());

    // cells are 1..vmax-1, values 0..vmax: 2 locations x 4 values
    auto al = denote(parse_command("x := alloc(1)"), Exit::Ok, s, u);
    CHECK(al.size() == 8);
    for (auto& r : al.states()) {
      REQUIRE(r.blocks.size() == 1);
      CHECK(r.blocks[0].second == r.blocks[0].first + 1);
      CHECK(r.store.at("x") == r.blocks[0].first);
    }
    CHECK(denote(parse_command("x := alloc(0)"), Exit::Ok, s, u).empty());
  }

  TEST_CASE("load and store fault only outside blocks") {
    Universe u = Universe::over({{"x", "y"}}, 4);
    auto freed = st({{"x", 1}, {"y", 0}}, {{1, std::nullopt}}, {});
    CHECK(denote(parse_command("y := [x]"), Exit::Er, freed, u).size() == 1);
    CHECK(denote(parse_command("[x] := 2"), Exit::Er, freed, u).size() == 1);
    auto live = st({{"x", 1}, {"y", 0}}, {{1, 3}}, {{1, 2}});
    auto ld = denote(parse_command("y := [x]"), Exit::Ok, live, u);
    REQUIRE(ld.size() == 1);
    CHECK(ld.states()[0].store.at("y") == 3);
  }

  TEST_CASE("WPO semantics") {
    Universe u = Universe::over({{"x"}}, 5);
    CHECK(wpo_semantic(Assertion::falsity(), parse_command("skip"), Exit::Ok, u).empty());
    auto w = wpo_semantic(parse_assertion("x |-> -"), parse_command("free(x)"), Exit::Ok, u);
    CHECK(w == models(parse_assertion("x !|->"), u));
    CHECK(w.size() == 4);  // x in 1..4
    auto a = wpo_semantic(parse_assertion("emp"), parse_command("x := alloc(2)"), Exit::Ok, u);
    CHECK(a == models(parse_assertion("arr(x, x+2) * b(x) == x * e(x) == x+2"), u));
    CHECK(a.size() == 3 * 36);
  }

  TEST_CASE("state json round trip") {
    gen::Rng g(22);
    for (int i = 0; i < 100; ++i) {
      auto s = g.state(6);
      CHECK(state_from_json(to_json(s)) == s);
    }
  }
}
