#include <random>

#include "islarr/checker.hpp"

namespace islarr {

namespace {

struct Row {
  const char* name;
  const char* pre;
  const char* prog;
  const char* exit;
  Value vmax;
  const char* covers;
};

// clang-format off
const Row kHand[] = {
  {"skip",              "emp",                                   "skip",                    "ok", 4, ""},
  {"skip-er",           "x |-> 1",                               "skip",                    "er", 4, ""},
  {"error-er",          "x |-> 1",                               "error()",                 "er", 4, ""},
  {"assign",            "x == 0",                                "x := x + 1",              "ok", 4, ""},
  {"havoc-assume",      "emp",                                   "x := *; assume(x < 2)",   "ok", 4, ""},
  {"local",             "x |-> 1",                               "local x in { x := 2 }",   "ok", 4, ""},
  {"choice",            "emp",                                   "{ x := 1 } + { x := 2 }", "ok", 4, ""},
  {"alloc-fresh",       "emp",                                   "x := alloc(2)",           "ok", 5, "Alloc1"},
  {"alloc-er",          "emp",                                   "x := alloc(2)",           "er", 5, "AllocEr"},
  {"alloc-reuse-inner", "narr(y, y+4)",                          "x := alloc(2)",           "ok", 6, "Alloc2"},
  {"alloc-reuse-left",  "narr(y, y+3)",                          "x := alloc(2)",           "ok", 6, "Alloc3"},
  {"alloc-reuse-right", "narr(y, y+2)",                          "x := alloc(2)",           "ok", 6, "Alloc4"},
  {"alloc-reuse-whole", "narr(y, y+1) * narr(z, z+1)",           "x := alloc(3)",           "ok", 5, "Alloc5"},
  {"alloc-two-gaps",    "narr(y, y+1) * narr(z, z+1)",           "x := alloc(1)",           "ok", 5, "Alloc5"},
  {"alloc-beside-cell", "y |-> 0",                               "x := alloc(1)",           "ok", 5, "Alloc1"},
  {"free-inner-block",  "arr(a, a+4) * b(a+1) == a+1 * e(a+1) == a+3", "free(a+1)",          "ok", 6, "FreeArr1"},
  {"free-inner-chain",  "arr(a, a+2) * arr(a+2, a+4) * b(a+1) == a+1 * e(a+1) == a+3", "free(a+1)", "ok", 6, "FreeArr1"},
  {"free-head-split",   "arr(a, a+3) * b(a) == a * e(a) == a+2", "free(a)",                "ok", 5, "FreeArr2"},
  {"free-cell",         "x |-> -",                               "free(x)",                 "ok", 5, "FreeArr3"},
  {"free-array",        "arr(a, a+3)",                           "free(a)",                 "ok", 5, "FreeArr3"},
  {"free-chain",        "arr(a, a+2) * a+2 |-> 1 * b(a) == a * e(a) == a+3", "free(a)",     "ok", 5, "FreeArr3"},
  {"free-tail-split",   "arr(a, a+3) * b(a+1) == a+1 * e(a+1) == a+3", "free(a+1)",        "ok", 5, "FreeArr4"},
  {"free-non-head",     "arr(a, a+3)",                           "free(a+1)",               "er", 5, "FreeEr"},
  {"free-twice",        "x !|->",                                "free(x)",                 "er", 5, "FreeEr"},
  {"free-null",         "emp",                                   "free(x)",                 "er", 4, "FreeEr"},
  {"free-framed",       "arr(x, y) * z |-> 2",                   "free(z)",                 "ok", 5, "FreeArr3"},
  {"load-cell",         "y |-> 3",                               "x := [y]",                "ok", 5, "LoadPtr"},
  {"load-array",        "arr(y, z)",                             "x := [y+1]",              "ok", 5, "LoadArr"},
  {"load-array-head",   "arr(y, z)",                             "x := [y]",                "ok", 5, "LoadArr"},
  {"load-self",         "arr(x, x+2)",                           "x := [x]",                "ok", 5, "LoadArr"},
  {"load-dangling",     "emp",                                   "x := [y]",                "er", 5, "LoadEr"},
  {"load-freed",        "y !|->",                                "x := [y]",                "er", 5, "LoadEr"},
  {"store-cell",        "y |-> 3",                               "[y] := 2",                "ok", 5, "StorePtr"},
  {"store-head",        "arr(y, z)",                             "[y] := x",                "ok", 5, "StoreArr1"},
  {"store-mid",         "arr(y, z)",                             "[y+1] := 2",              "ok", 5, "StoreArr2"},
  {"store-last",        "arr(y, y+2)",                           "[y+1] := 2",              "ok", 5, "StoreArr3"},
  {"store-past-end",    "arr(y, z)",                             "[z] := x",                "er", 5, "StoreEr"},
  {"store-freed",       "y !|->",                                "[y] := 1",                "er", 4, "StoreEr"},
  {"alloc-free",        "emp",                                   "x := alloc(1); free(x)",  "ok", 5, ""},
  {"alloc-free-inner",  "emp",                                   "x := alloc(2); free(x+1)", "er", 5, ""},
  {"alloc-store-load",  "emp",                                   "x := alloc(2); [x+1] := 3; y := [x+1]", "ok", 5, ""},
  {"use-after-free",    "x |-> 1",                               "free(x); y := [x]",       "er", 4, ""},
};
// clang-format on

}  // namespace

std::vector<CorpusEntry> hand_corpus() {
  std::vector<CorpusEntry> out;
  for (auto& r : kHand)
    out.push_back({r.name, parse_assertion(r.pre), parse_command(r.prog), parse_exit(r.exit), r.vmax, r.covers});
  return out;
}

namespace {

class Gen {
 public:
  Gen(std::uint64_t seed, const RandomOptions& opt) : rng_(seed), opt_(opt) {}

  CorpusEntry entry(int i) {
    int nv = pick(1, opt_.max_vars);
    vars_.assign(kNames, kNames + nv);
    CorpusEntry e;
    e.name = "random-" + std::to_string(i);
    e.vmax = pick(static_cast<int>(opt_.min_vmax), static_cast<int>(opt_.max_vmax));
    SymbolicHeap h;
    int ns = pick(0, opt_.max_spatial);
    for (int k = 0; k < ns; ++k) h = h * spatial();
    if (ns == 0) h = h * emp();
    if (coin(0.4)) h = h * pure();
    if (coin(0.15)) {
      Term v = var();
      h = h * eq(Term::base(v), v);
    }
    e.pre = Assertion::of(h);
    int nc = pick(1, opt_.max_commands);
    e.prog = atomic();
    for (int k = 1; k < nc; ++k) e.prog = coin(0.75) ? Command::seq(e.prog, atomic()) : Command::choice(e.prog, atomic());
    e.exit = coin(0.5) ? Exit::Ok : Exit::Er;
    return e;
  }

 private:
  static constexpr const char* kNames[] = {"x", "y", "z"};

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  Term var() { return Term::var(vars_[static_cast<std::size_t>(pick(0, static_cast<int>(vars_.size()) - 1))]); }
  std::string var_name() { return vars_[static_cast<std::size_t>(pick(0, static_cast<int>(vars_.size()) - 1))]; }

  Term term() {
    int r = pick(0, 9);
    if (r < 6) return var();
    if (r < 8) return Term::add(var(), Term::nat(pick(1, 2)));
    return Term::nat(pick(1, 3));
  }

  SpatialAtom spatial() {
    Term lo = var();
    Term hi = coin(0.6) ? Term::add(lo, Term::nat(pick(1, 3))) : var();
    switch (pick(0, 2)) {
      case 0: return pto(lo, coin(0.5) ? Term::nat(pick(0, 3)) : var());
      case 1: return arr(lo, hi);
      default: return narr(lo, hi);
    }
  }

  PureAtom pure() {
    Term a = term(), b = term();
    switch (pick(0, 3)) {
      case 0: return eq(a, b);
      case 1: return neq(a, b);
      case 2: return le(a, b);
      default: return lt(a, b);
    }
  }

  Command atomic() {
    switch (pick(0, 11)) {
      case 0: return Command::skip();
      case 1: return Command::assign(var_name(), term());
      case 2: return Command::havoc(var_name());
      case 3: return Command::assume({pure()});
      case 4:
      case 5: return Command::alloc(var_name(), Term::nat(pick(1, 2)));
      case 6:
      case 7: return Command::free(term());
      case 8:
      case 9: return Command::load(var_name(), term());
      case 10: return Command::store(term(), term());
      default: return coin(0.3) ? Command::error() : Command::store(term(), term());
    }
  }

  std::mt19937_64 rng_;
  RandomOptions opt_;
  std::vector<std::string> vars_;
};

}  // namespace

std::vector<CorpusEntry> random_corpus(std::uint64_t seed, int count, const RandomOptions& opt) {
  Gen g(seed, opt);
  std::vector<CorpusEntry> out;
  for (int i = 0; i < count; ++i) out.push_back(g.entry(i));
  return out;
}

}  // namespace islarr
