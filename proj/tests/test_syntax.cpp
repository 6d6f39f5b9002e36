#include "doctest.h"
#include "gen.hpp"

using namespace islarr;

namespace {

TermSet ts(std::initializer_list<const char*> xs) {
  TermSet out;
  for (auto x : xs) out.insert(parse_term(x));
  return out;
}

// every non-null node of t, by explicit stack walk
TermSet subterms(const Term& t) {
  TermSet out;
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term u = stack.back();
    stack.pop_back();
    if (u.kind() == TermKind::Null) continue;
    out.insert(u);
    if (u.kind() == TermKind::Add) {
      stack.push_back(u.lhs());
      stack.push_back(u.rhs());
    } else if (u.kind() == TermKind::Base || u.kind() == TermKind::End) {
      stack.push_back(u.arg());
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("syntax") {
  TEST_CASE("term sets") {
    CHECK(term_set(Term::null()).empty());
    CHECK(term_set(parse_term("x")) == ts({"x"}));
    CHECK(term_set(parse_term("x+1")) == ts({"x+1", "x", "1"}));
    CHECK(heap_term_set(parse_heap("x |-> y")) == ts({"x", "x+1", "1", "y"}));
    CHECK(heap_term_set(parse_heap("emp")).empty());
    CHECK(heap_term_set_minus(parse_heap("b(x) == y")) == ts({"x", "y"}));
  }

  TEST_CASE("command term sets and mod") {
    CHECK(command_term_set(parse_command("skip")).empty());
    CHECK(command_term_set(parse_command("error()")).empty());
    CHECK(command_term_set(parse_command("x := [y]")) == ts({"x", "b(y)", "y"}));
    CHECK(command_term_set(parse_command("free(x)")) == ts({"x", "b(x)", "e(x)"}));
    CHECK(modified_vars(parse_command("[x] := y")).empty());
    CHECK(modified_vars(parse_command("x := alloc(2)")) == std::set<std::string>{"x"});
    CHECK(modified_vars(parse_command("local x in { x := 1; y := 2 }")) == std::set<std::string>{"y"});
  }

  TEST_CASE("substitution") {
    CHECK(substitute(parse_heap("x |-> 1"), "x", Term::var("v")) == parse_heap("v |-> 1"));
    CHECK(substitute(parse_heap("emp * y == 2"), "x", Term::var("v")) == parse_heap("emp * y == 2"));
    CHECK(substitute(parse_heap("b(x) == x"), "x", Term::var("v")) == parse_heap("b(v) == v"));
    CHECK(replace_term_set(parse_heap("b(y) |-> 1"), ts({"b(y)"}), Term::var("z")) == parse_heap("z |-> 1"));
    auto h = parse_heap("x |-> y * x < 3");
    CHECK(replace_term_set(h, {}, Term::var("z")) == h);
    CHECK(replace_term_set(parse_heap("e(x) == e(z)"), ts({"e(x)", "e(z)"}), Term::var("y")) == parse_heap("y == y"));
    CHECK_THROWS_AS(replace_term_set(parse_heap("x == 1"), ts({"x", "x+1"}), Term::var("y")), SyntaxError);
  }

  TEST_CASE("substitution is capture avoiding") {
    auto a = parse_assertion("exists y. x |-> y");
    auto r = substitute(a, "x", Term::var("y"));
    REQUIRE(r.disjuncts.size() == 1);
    CHECK(r.disjuncts[0].vars[0] != "y");
    CHECK(free_vars(r) == std::set<std::string>{"y"});
  }

  TEST_CASE("term set oracle on random terms") {
    gen::Rng g(11);
    for (int i = 0; i < 1000; ++i) {
      Term t = g.term(4);
      CHECK(term_set(t) == subterms(t));
      for (auto& u : term_set(t)) CHECK(is_subterm(u, t));
    }
  }

  TEST_CASE("substitution lemma on random terms") {
    gen::Rng g(12);
    for (int i = 0; i < 1000; ++i) {
      Term t = g.term(3), u = g.prog_term();
      auto s = g.state(6);
      auto x = g.var();
      auto s2 = s;
      s2.store[x] = interp_term(u, s);
      CHECK(interp_term(substitute(t, x, u), s) == interp_term(t, s2));
    }
  }

  TEST_CASE("print/parse round trip on random ASTs") {
    gen::Rng g(13);
    for (int i = 0; i < 1000; ++i) {
      Term t = g.term(4);
      CHECK(parse_term(to_string(t)) == t);
      auto a = g.assertion();
      auto back = parse_assertion(to_string(a));
      CHECK_MESSAGE(back == a, to_string(a));
      auto c = g.command(3);
      CHECK_MESSAGE(parse_command(to_string(c)) == c, to_string(c));
    }
  }

  TEST_CASE("parse errors carry a position") {
    try {
      parse_assertion("x |-> * y");
      FAIL("no error");
    } catch (const SyntaxError& e) {
      CHECK(std::string(e.what()).find("1:") == 0);
    }
    CHECK_THROWS_AS(parse_command("x := alloc("), SyntaxError);
    CHECK_THROWS_AS(parse_assertion("exists x x. emp"), SyntaxError);
  }

  TEST_CASE("local with initializer desugars") {
    Fresh f;
    auto c = desugar(parse_command("local x := x + 1 in { y := x }"), f);
    REQUIRE(c.kind() == CmdKind::Local);
    CHECK(c.first().kind() == CmdKind::Seq);
    CHECK(command_term_set(parse_command("local x := z in { y := x }")) == ts({"y", "z"}));
  }
}
