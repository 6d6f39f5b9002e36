#include <algorithm>

#include "doctest.h"
#include "gen.hpp"
#include "islarr/canonical.hpp"
#include "islarr/entailment.hpp"

using namespace islarr;

namespace {

// all permutations times all relation vectors, deduplicated by sorted atoms
std::size_t brute_cases(std::vector<Term> t) {
  std::set<std::vector<PureAtom>> seen;
  std::sort(t.begin(), t.end());
  do {
    std::size_t n = t.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<PureAtom> f;
      Term prev = Term::null();
      for (std::size_t i = 0; i < n; ++i) {
        f.push_back((mask >> i & 1) ? lt(prev, t[i]) : eq(prev, t[i]));
        prev = t[i];
      }
      std::sort(f.begin(), f.end());
      seen.insert(f);
    }
  } while (std::next_permutation(t.begin(), t.end()));
  return seen.size();
}

TermSet ts(std::initializer_list<const char*> xs) {
  TermSet out;
  for (auto x : xs) out.insert(parse_term(x));
  return out;
}

}  // namespace

TEST_SUITE("canonical") {
  TEST_CASE("cases") {
    CHECK(cases({}).size() == 1);
    CHECK(cases({}).front().render().empty());
    CHECK(cases(ts({"x"})).size() == 2);
    CHECK(cases(ts({"x", "y"})).size() == brute_cases({parse_term("x"), parse_term("y")}));
    CHECK(cases(ts({"x", "y"})).size() == 8);
    CHECK(cases(ts({"x", "y", "z"})).size() == brute_cases({parse_term("x"), parse_term("y"), parse_term("z")}));
    CHECK_THROWS_AS(cases(ts({"a", "b", "c", "d", "e", "f", "g", "h"})), SizeLimitError);
  }

  TEST_CASE("cano basics") {
    auto skip = parse_command("skip");
    CHECK(cano(Assertion::falsity(), skip).is_false());
    auto e = cano(parse_assertion("emp"), skip);
    REQUIRE(e.disjuncts.size() == 1);
    CHECK(e.disjuncts[0].body == parse_heap("emp"));
  }

  TEST_CASE("cano orders every term for free") {
    auto c = parse_command("free(x)");
    auto a = cano(parse_assertion("x |-> 1"), c);
    CHECK(!a.is_false());
    auto want = ts({"x", "x+1", "1", "b(x)", "e(x)"});
    for (auto& d : a.disjuncts) {
      CHECK(is_canonical(d.body, want));
      for (auto& t : want) {
        int decided = 0;
        for (auto& u : want) {
          if (t == u) continue;
          PureFormula p = d.body.pure;
          bool lt_ok = entails_pure(p, lt(t, u)) == Answer::Yes, eq_ok = entails_pure(p, eq(t, u)) == Answer::Yes,
               gt_ok = entails_pure(p, lt(u, t)) == Answer::Yes;
          decided += lt_ok || eq_ok || gt_ok;
        }
        CHECK(decided == static_cast<int>(want.size()) - 1);
      }
    }
  }

  TEST_CASE("is_canonical") {
    CHECK(is_canonical(parse_heap("null < x * null < y * x < y"), ts({"x", "y"})));
    CHECK_FALSE(is_canonical(parse_heap("emp"), ts({"x"})));
    CHECK(is_canonical(parse_heap("x < x"), ts({"x"})));
  }

  TEST_CASE("cano preserves models") {
    gen::Rng g(41);
    CanoOptions opt;
    opt.case_cap = 12;
    for (int i = 0; i < 30; ++i) {
      SymbolicHeap h;
      h = h * (g.coin() ? pto(Term::var(g.var()), g.prog_term()) : arr(Term::var(g.var()), g.prog_term()));
      if (g.coin()) h = h * eq(Term::base(Term::var("x")), Term::var("x"));
      auto p = Assertion::of(h);
      auto c = Command::free(Term::var(g.var()));
      Universe u = Universe::over({free_vars(p), free_vars(c)}, 4);
      auto cp = cano(p, c, opt);
      CHECK_MESSAGE(models(p, u, false) == models(cp, u, false), to_string(p));
    }
  }
}
