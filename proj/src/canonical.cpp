#include "islarr/canonical.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "islarr/entailment.hpp"

namespace islarr {

PureFormula OrderCase::render() const {
  PureFormula out;
  Term prev = Term::null();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.push_back(rels[i] == Rel::Lt ? lt(prev, seq[i]) : eq(prev, seq[i]));
    prev = seq[i];
  }
  return out;
}

std::vector<OrderCase> cases(const TermSet& t, int cap) {
  if (static_cast<int>(t.size()) > cap) throw SizeLimitError(t.size(), cap);
  std::vector<Term> perm(t.begin(), t.end());
  const std::size_t n = perm.size();
  std::vector<OrderCase> out;
  std::set<PureFormula> seen;
  do {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      OrderCase c;
      c.seq = perm;
      for (std::size_t i = 0; i < n; ++i) c.rels.push_back((mask >> i & 1) ? Rel::Eq : Rel::Lt);
      auto key = c.render();
      std::sort(key.begin(), key.end());
      if (seen.insert(key).second) out.push_back(std::move(c));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

PureFormula render_classes(const std::vector<std::vector<Term>>& classes) {
  PureFormula out;
  Term prev = Term::null();
  for (std::size_t k = 0; k < classes.size(); ++k)
    for (std::size_t i = 0; i < classes[k].size(); ++i) {
      bool strict = k > 0 && i == 0;
      out.push_back(strict ? lt(prev, classes[k][i]) : eq(prev, classes[k][i]));
      prev = classes[k][i];
    }
  return out;
}

}  // namespace

bool violates_block_axioms(const std::vector<std::vector<Term>>& classes) {
  std::map<Term, int> rank;
  for (std::size_t k = 0; k < classes.size(); ++k)
    for (auto& t : classes[k]) rank[t] = static_cast<int>(k);

  struct Arg {
    int ra;
    std::optional<int> rb, re;
  };
  std::map<Term, Arg> args;
  for (auto& [t, r] : rank) {
    if (t.kind() != TermKind::Base && t.kind() != TermKind::End) continue;
    auto it = rank.find(t.arg());
    if (it == rank.end()) continue;  // argument not ordered; nothing to check
    auto& a = args.try_emplace(t.arg(), Arg{it->second, {}, {}}).first->second;
    (t.kind() == TermKind::Base ? a.rb : a.re) = r;
  }

  std::vector<const Arg*> live;  // arguments lying in some block
  std::vector<int> zero_pos;     // arguments outside every block
  for (auto& [t, a] : args) {
    bool zb = a.rb && *a.rb == 0, ze = a.re && *a.re == 0;
    if (a.rb && a.re && zb != ze) return true;
    if (zb || ze) {
      zero_pos.push_back(a.ra);
      continue;
    }
    if (a.rb && *a.rb > a.ra) return true;
    if (a.re && *a.re <= a.ra) return true;
    live.push_back(&a);
  }

  // group arguments that must share a block
  std::vector<int> parent(live.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  struct Extent {
    int lo;
    int hi;
    bool hi_exclusive;
    std::optional<int> b, e;
  };
  bool bad = false;
  auto extents = [&] {
    std::map<int, Extent> ext;
    for (std::size_t i = 0; i < live.size(); ++i) {
      const Arg& a = *live[i];
      auto [it, fresh] = ext.try_emplace(find(static_cast<int>(i)), Extent{a.ra, a.ra, false, a.rb, a.re});
      Extent& x = it->second;
      if (fresh) continue;
      x.lo = std::min(x.lo, a.ra);
      x.hi = std::max(x.hi, a.ra);
      if (a.rb) {
        if (x.b && *x.b != *a.rb) bad = true;
        x.b = a.rb;
      }
      if (a.re) {
        if (x.e && *x.e != *a.re) bad = true;
        x.e = a.re;
      }
    }
    for (auto& [g, x] : ext) {
      if (x.b) {
        if (*x.b > x.lo) bad = true;
        x.lo = *x.b;
      }
      if (x.e) {
        if (*x.e <= x.hi) bad = true;
        x.hi = *x.e;
        x.hi_exclusive = true;
      }
    }
    return ext;
  };
  auto below = [](int lo, const Extent& x) { return x.hi_exclusive ? lo < x.hi : lo <= x.hi; };
  while (true) {
    auto ext = extents();
    if (bad) return true;
    bool merged = false;
    for (auto i = ext.begin(); i != ext.end() && !merged; ++i)
      for (auto j = std::next(i); j != ext.end() && !merged; ++j)
        if (below(i->second.lo, j->second) && below(j->second.lo, i->second)) {
          parent[find(j->first)] = find(i->first);
          merged = true;
        }
    if (merged) continue;
    for (int r : zero_pos)
      for (auto& [g, x] : ext)
        if (x.lo <= r && below(r, x)) return true;
    return false;
  }
}

std::vector<SymbolicHeap> cases_sh(const SymbolicHeap& psi, const TermSet& t, const CanoOptions& opt) {
  if (static_cast<int>(t.size()) > opt.case_cap) throw SizeLimitError(t.size(), opt.case_cap);
  std::vector<Term> terms(t.begin(), t.end());
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.size() < b.size(); });
  std::vector<SymbolicHeap> out;
  std::vector<std::vector<Term>> classes(1);
  PureFormula implied = psi.pure;  // facts carried by the spatial atoms
  for (auto& a : psi.spatial) {
    if (a.kind == SpatialKind::PointsTo) implied.push_back(lt(Term::null(), a.a));
    if (a.kind == SpatialKind::Arr || a.kind == SpatialKind::NegArr) implied.push_back(lt(a.a, a.b));
  }
  auto consistent = [&] {
    PureFormula f = implied;
    auto r = render_classes(classes);
    f.insert(f.end(), r.begin(), r.end());
    return satisfiable(f) != Answer::No;
  };

  // feasible relations of each term against null and the others; -1 is null
  enum : std::uint8_t { kLt = 1, kEq = 2, kGt = 4 };
  const int n = static_cast<int>(terms.size());
  std::vector<std::uint8_t> memo(static_cast<std::size_t>((n + 1) * (n + 1)), 0xff);
  auto term_at = [&](int i) { return i < 0 ? Term::null() : terms[static_cast<std::size_t>(i)]; };
  auto feasible = [&](int i, int j) {  // relations r with "term i r term j" satisfiable
    auto& m = memo[static_cast<std::size_t>((i + 1) * (n + 1) + j + 1)];
    if (m == 0xff) {
      m = 0;
      Term a = term_at(i), b = term_at(j);
      for (auto [bit, atom] : {std::pair{kLt, lt(a, b)}, std::pair{kEq, eq(a, b)}, std::pair{kGt, lt(b, a)}}) {
        PureFormula f = implied;
        f.push_back(atom);
        if (satisfiable(f) != Answer::No) m |= bit;
      }
    }
    return m;
  };
  std::map<Term, int> index;
  for (int i = 0; i < n; ++i) index[terms[static_cast<std::size_t>(i)]] = i;
  // 0: some relation infeasible, 1: all forced, 2: needs the solver
  auto placement = [&](int xi, std::size_t cls, bool join) {
    bool forced = true;
    auto rel_to = [&](int yi, std::uint8_t r) {
      auto m = feasible(xi, yi);
      if (!(m & r)) return false;
      if (m != r) forced = false;
      return true;
    };
    if (!rel_to(-1, (cls == 0 && join) ? kEq : kGt)) return 0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      std::uint8_t r = k < cls ? kGt : k > cls ? kLt : join ? kEq : kLt;
      for (auto& y : classes[k])
        if (!rel_to(index.at(y), r)) return 0;
    }
    return forced ? 1 : 2;
  };
  auto verdict = [&](int xi, std::size_t cls, bool join) { return opt.drop_unsat ? placement(xi, cls, join) : 1; };

  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == terms.size()) {
      if (opt.drop_unsat && violates_block_axioms(classes)) return;
      auto cls = classes;
      for (auto& c : cls) std::sort(c.begin(), c.end());
      out.push_back(psi * render_classes(cls));
      return;
    }
    const Term& x = terms[i];
    const int xi = static_cast<int>(i);
    for (std::size_t k = 0; k < classes.size(); ++k) {
      int v = verdict(xi, k, true);
      if (v == 0) continue;
      classes[k].push_back(x);
      if (v == 1 || consistent()) rec(i + 1);
      classes[k].pop_back();
    }
    for (std::size_t k = 1; k <= classes.size(); ++k) {
      int v = verdict(xi, k, false);
      if (v == 0) continue;
      classes.insert(classes.begin() + static_cast<std::ptrdiff_t>(k), std::vector<Term>{x});
      if (v == 1 || consistent()) rec(i + 1);
      classes.erase(classes.begin() + static_cast<std::ptrdiff_t>(k));
    }
  };
  rec(0);
  return out;
}

namespace {

std::set<std::string> vars_of(const TermSet& t) {
  std::set<std::string> out;
  for (auto& x : t) {
    auto v = free_vars(x);
    out.insert(v.begin(), v.end());
  }
  return out;
}

}  // namespace

Assertion cano(const Assertion& p, const Command& c, const CanoOptions& opt) {
  TermSet tc = command_term_set(c);
  auto cvars = vars_of(tc);
  Fresh fresh;
  fresh.reserve(all_vars(c));
  for (auto& d : p.disjuncts) {
    fresh.reserve(free_vars(d.body));
    for (auto& v : d.vars) fresh.reserve(v);
  }
  Assertion out;
  out.truncated = p.truncated;
  out.bound = p.bound;
  for (auto& d : p.disjuncts) {
    Disjunct nd = d;
    for (auto& v : nd.vars)
      if (cvars.count(v)) {
        auto nv = fresh();
        nd.body = substitute(nd.body, v, Term::var(nv));
        v = nv;
      }
    TermSet t = heap_term_set(nd.body);
    t.insert(tc.begin(), tc.end());
    for (auto& sh : cases_sh(nd.body, t, opt)) out.disjuncts.push_back({nd.vars, std::move(sh)});
  }
  return out;
}

bool is_canonical(const SymbolicHeap& psi, const TermSet& t) {
  if (satisfiable(psi.pure) == Answer::No) return true;
  std::vector<Term> xs(t.begin(), t.end());
  xs.push_back(Term::null());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      if (entails_pure(psi.pure, lt(xs[i], xs[j])) == Answer::Yes) continue;
      if (entails_pure(psi.pure, eq(xs[i], xs[j])) == Answer::Yes) continue;
      if (entails_pure(psi.pure, lt(xs[j], xs[i])) == Answer::Yes) continue;
      return false;
    }
  return true;
}

}  // namespace islarr
