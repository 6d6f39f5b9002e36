#pragma once
// Random ASTs for property tests.
#include <random>
#include <string>
#include <vector>

#include "islarr/semantics.hpp"
#include "islarr/syntax.hpp"

namespace gen {

using namespace islarr;

struct Rng {
  std::mt19937_64 r;
  explicit Rng(std::uint64_t seed) : r(seed) {}
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(r); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(r); }
  std::string var() { return std::vector<std::string>{"x", "y", "z"}[static_cast<std::size_t>(pick(0, 2))]; }

  // b/e never nest
  Term term(int depth = 3, bool be = true) {
    int k = depth <= 0 ? pick(0, 2) : pick(0, be ? 5 : 3);
    switch (k) {
      case 0: return Term::null();
      case 1: return Term::nat(pick(0, 4));
      case 2: return Term::var(var());
      case 3: return Term::add(term(depth - 1, be), term(depth - 1, be));
      case 4: return Term::base(term(depth - 1, false));
      default: return Term::end(term(depth - 1, false));
    }
  }
  // no b/e, as in programs
  Term prog_term() {
    int k = pick(0, 3);
    if (k == 0) return Term::nat(pick(0, 3));
    if (k == 1) return Term::add(Term::var(var()), Term::nat(pick(1, 2)));
    return Term::var(var());
  }
  PureAtom atom() {
    Term a = term(2), b = term(2);
    switch (pick(0, 3)) {
      case 0: return eq(a, b);
      case 1: return neq(a, b);
      case 2: return le(a, b);
      default: return lt(a, b);
    }
  }
  SpatialAtom spatial() {
    switch (pick(0, 3)) {
      case 0: return emp();
      case 1: return pto(term(2), term(1));
      case 2: return arr(term(2), term(2));
      default: return narr(term(2), term(2));
    }
  }
  SymbolicHeap heap() {
    SymbolicHeap h;
    int ns = pick(0, 2), np = pick(0, 2);
    for (int i = 0; i < ns; ++i) h = h * spatial();
    for (int i = 0; i < np; ++i) h = h * atom();
    if (h.empty()) h = h * emp();
    return h;
  }
  Assertion assertion() {
    Assertion a;
    int n = pick(0, 2);
    for (int i = 0; i < n; ++i) {
      Disjunct d;
      d.body = heap();
      if (coin(0.3)) d.vars.push_back("w" + std::to_string(i));
      a.disjuncts.push_back(d);
    }
    return a;
  }
  Command command(int depth = 3) {
    int k = depth <= 0 ? pick(0, 9) : pick(0, 14);
    switch (k) {
      case 0: return Command::skip();
      case 1: return Command::error();
      case 2: return Command::assign(var(), prog_term());
      case 3: return Command::havoc(var());
      case 4: return Command::assume({atom()});
      case 5: return Command::alloc(var(), prog_term());
      case 6: return Command::free(prog_term());
      case 7: return Command::load(var(), prog_term());
      case 8: return Command::store(prog_term(), prog_term());
      case 9: return Command::skip();
      case 10: return Command::seq(command(depth - 1), command(depth - 1));
      case 11: return Command::choice(command(depth - 1), command(depth - 1));
      case 12: return Command::star(command(depth - 1));
      case 13: return Command::local(var(), command(depth - 1));
      default: return Command::local_init(var(), prog_term(), command(depth - 1));
    }
  }

  // Well-formed state over x, y, z with cells 1..vmax-1.
  ConcreteState state(Value vmax) {
    ConcreteState s;
    for (auto v : {"x", "y", "z"}) s.store[v] = pick(0, static_cast<int>(vmax));
    Value l = 1;
    while (l < vmax) {
      if (coin(0.4)) {
        ++l;
        continue;
      }
      Value hi = std::min<Value>(vmax, l + pick(1, 3));
      s.blocks.push_back({l, hi});
      for (Value c = l; c < hi; ++c)
        if (coin(0.8)) s.heap[c] = pick(0, static_cast<int>(vmax));
      l = hi;
    }
    for (Value c = 1; c < vmax; ++c)
      if (!s.heap.count(c) && s.base(c) == 0 && coin(0.2)) s.heap[c] = std::nullopt;
    return s;
  }
};

}  // namespace gen
