#include "doctest.h"
#include "gen.hpp"
#include "islarr/entailment.hpp"

using namespace islarr;

TEST_SUITE("entailment") {
  TEST_CASE("pure examples") {
    CHECK(entails_pure(parse_pure("x == y * y < z"), parse_pure("x < z")[0]) == Answer::Yes);
    CHECK(entails_pure(PureFormula{}, parse_pure("x < x")[0]) == Answer::No);
    auto guard = parse_pure("b(t) != t * b(t) == null");
    CHECK(entails_pure(parse_pure("b(t) == null"), std::vector<PureAtom>{guard[0], guard[1]}) == Answer::Yes);
    CHECK(satisfiable(parse_pure("x < y * y < x")) == Answer::No);
    CHECK(satisfiable(parse_pure("x + 1 == y")) == Answer::Yes);
    // congruence on block functions
    CHECK(entails_pure(parse_pure("x == y"), parse_pure("b(x) == b(y)")[0]) == Answer::Yes);
    CHECK(entails_pure(parse_pure("x + 1 == y + 1"), parse_pure("e(x) == e(y)")[0]) == Answer::Yes);
  }

  TEST_CASE("decision agrees with bounded enumeration") {
    gen::Rng g(31);
    int decided = 0;
    for (int i = 0; i < 500; ++i) {
      PureFormula hyp;
      int n = g.pick(0, 3);
      for (int k = 0; k < n; ++k) hyp.push_back(g.atom());
      std::vector<PureAtom> concl{g.atom()};
      if (g.coin(0.3)) concl.push_back(g.atom());
      auto fast = entails_pure(hyp, concl);
      auto ref = entails_pure_reference(hyp, concl, 3);
      // the reference only refutes; a refutation must not be contradicted
      if (ref == Answer::No) CHECK_MESSAGE(fast == Answer::No, (to_string(hyp) + " |= " + to_string(concl)));
      if (fast == Answer::Yes) CHECK(ref != Answer::No);
      decided += fast != Answer::Unknown;
    }
    CHECK(decided == 500);
  }

  TEST_CASE("assertion entailment") {
    Universe u = Universe::over({{"x"}}, 4);
    auto p = parse_assertion("x |-> 1");
    CHECK(entails_assertion(p, p, u).status == EntailStatus::Yes);
    CHECK(entails_assertion(parse_assertion("x |-> 1 * x |-> 1"), parse_assertion("false"), u).status ==
          EntailStatus::Yes);
    // arr(x, x+2) and two points-to agree on heaps, but blocks differ
    auto r = entails_assertion(parse_assertion("arr(x, x+2)"), parse_assertion("x |-> - * x+1 |-> -"), u);
    CHECK(r.status == EntailStatus::Yes);
    auto r2 = entails_assertion(parse_assertion("x |-> -"), parse_assertion("x |-> 1"), u);
    CHECK(r2.status == EntailStatus::No);
    REQUIRE(r2.counter);
    CHECK(r2.counter->heap.begin()->second != 1);
  }
}
