#include "islarr/wpo.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include <spdlog/spdlog.h>

#include "islarr/entailment.hpp"

namespace islarr {

namespace {

Term plus1(const Term& t) { return Term::add(t, Term::nat(1)); }

bool holds(const PureFormula& hyp, const PureAtom& a) {
  Answer r = entails_pure(hyp, a);
  if (r == Answer::Unknown) spdlog::warn("wpo: undecided guard {}", to_string(a));
  return r == Answer::Yes;
}

// Arr(lo, hi)_alpha view of a points-to or arr atom
struct Cell {
  std::size_t idx;
  Term lo, hi;
  bool pto;
};

std::vector<Cell> cells_of(const SymbolicHeap& h) {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < h.spatial.size(); ++i) {
    auto& a = h.spatial[i];
    if (a.kind == SpatialKind::PointsTo) out.push_back({i, a.a, plus1(a.a), true});
    if (a.kind == SpatialKind::Arr) out.push_back({i, a.a, a.b, false});
  }
  return out;
}

SymbolicHeap without(const SymbolicHeap& h, const std::set<std::size_t>& drop) {
  SymbolicHeap out;
  out.pure = h.pure;
  for (std::size_t i = 0; i < h.spatial.size(); ++i)
    if (!drop.count(i)) out.spatial.push_back(h.spatial[i]);
  return out;
}

// Sort terms along the order the pure part entails; ties keep their relative order.
std::vector<Term> entailed_chain(const PureFormula& pure, const std::vector<Term>& ts) {
  std::vector<std::pair<int, Term>> ranked;
  for (auto& u : ts) {
    int below = 0;
    for (auto& v : ts)
      if (!(u == v) && holds(pure, lt(v, u))) ++below;
    ranked.emplace_back(below, u);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.first < b.first; });
  std::vector<Term> out;
  for (auto& [r, t] : ranked) out.push_back(t);
  return out;
}

// The part of arr(lo, hi) above cell t: arr(t+1, hi), or nothing when t+1 = hi.
// Both shapes when the pure part decides neither.
std::vector<std::optional<SpatialAtom>> split_tail(const PureFormula& pure, const Term& t, const Term& hi) {
  if (holds(pure, lt(plus1(t), hi))) return {arr(plus1(t), hi)};
  if (holds(pure, eq(plus1(t), hi))) return {std::nullopt};
  return {arr(plus1(t), hi), std::nullopt};
}

std::vector<RuleConclusion> alloc_rules(const SymbolicHeap& psi, const std::string& x, const Term& t, Fresh& fresh) {
  const auto& pure = psi.pure;
  if (satisfiable(pure) == Answer::No) return {};

  // psi = narr(t1,t1') * ... * narr(tm,tm') * psi'
  std::vector<SpatialAtom> gaps;
  SymbolicHeap rest;
  rest.pure = pure;
  for (auto& a : psi.spatial) (a.kind == SpatialKind::NegArr ? gaps : rest.spatial).push_back(a);
  std::vector<Term> los;
  for (auto& g : gaps) los.push_back(g.a);
  std::vector<SpatialAtom> ord;
  for (auto& lo : entailed_chain(pure, los)) {
    auto it = std::find_if(gaps.begin(), gaps.end(), [&](auto& g) { return g.a == lo; });
    ord.push_back(*it);
    gaps.erase(it);
  }
  for (std::size_t i = 0; i + 1 < ord.size(); ++i)
    if (!holds(pure, lt(ord[i].a, ord[i + 1].a))) {
      if (holds(pure, eq(ord[i].a, ord[i + 1].a))) return {};  // overlapping narr
      throw WpoInvariantError("alloc: narr atoms not ordered by the pure part");
    }
  auto tm = heap_term_set_minus(psi);
  auto us = entailed_chain(pure, std::vector<Term>(tm.begin(), tm.end()));

  auto x1 = fresh();
  Term th = Term::var(x1), X = Term::var(x);
  auto sub = [&](const Term& u) { return substitute(u, x, th); };
  Term Xe = Term::add(X, sub(t));
  SymbolicHeap psith = substitute(psi, x, th), restth = substitute(rest, x, th);
  const std::size_t N = us.size(), m = ord.size();
  auto lo = [&](std::size_t i) { return sub(ord[i - 1].a); };  // 1-based
  auto hi = [&](std::size_t i) { return sub(ord[i - 1].b); };

  std::vector<RuleConclusion> out;
  for (std::size_t al = 0; al <= N; ++al)
    for (std::size_t be = al; be <= N; ++be) {
      PureFormula phi{eq(Term::base(X), X), eq(Term::end(X), Xe)};
      if (al > 0) phi.push_back(lt(sub(us[al - 1]), X));
      if (al < N) phi.push_back(le(X, sub(us[al])));
      if (be > 0) phi.push_back(lt(sub(us[be - 1]), Xe));
      if (be < N) phi.push_back(le(Xe, sub(us[be])));
      TermSet rep;
      for (std::size_t i = al + 1; i <= be; ++i) {
        rep.insert(Term::base(sub(us[i - 1])));
        rep.insert(Term::end(sub(us[i - 1])));
      }
      auto emit = [&](int shape, std::size_t j, std::size_t k, SymbolicHeap chi) {
        RuleConclusion rc;
        rc.rule = "Alloc" + std::to_string(shape);
        rc.vars = {x1};
        rc.body = rep.empty() ? std::move(chi) : replace_term_set(chi, rep, Term::null());
        rc.alpha = static_cast<int>(al);
        rc.beta = static_cast<int>(be);
        rc.j = static_cast<int>(j);
        rc.k = static_cast<int>(k);
        out.push_back(std::move(rc));
      };
      emit(1, 0, 0, psith * arr(X, Xe) * phi);
      for (std::size_t j = 1; j <= m; ++j)
        for (std::size_t k = j; k <= m; ++k) {
          SymbolicHeap base = restth;
          for (std::size_t i = 1; i < j; ++i) base = base * narr(lo(i), hi(i));
          base = base * arr(X, Xe);
          for (std::size_t i = k + 1; i <= m; ++i) base = base * narr(lo(i), hi(i));
          PureFormula left_in{lt(lo(j), X), lt(X, hi(j))};
          PureFormula left_gap{le(X, lo(j))};
          if (j > 1) left_gap.insert(left_gap.begin(), le(hi(j - 1), X));
          PureFormula right_in{lt(lo(k), Xe), lt(Xe, hi(k))};
          PureFormula right_gap{le(hi(k), Xe)};
          if (k < m) right_gap.push_back(le(Xe, lo(k + 1)));
          emit(2, j, k, base * narr(lo(j), X) * narr(Xe, hi(k)) * left_in * right_in * phi);
          emit(3, j, k, base * narr(Xe, hi(k)) * left_gap * right_in * phi);
          emit(4, j, k, base * narr(lo(j), X) * left_in * right_gap * phi);
          emit(5, j, k, base * left_gap * right_gap * phi);
        }
    }
  return out;
}

std::vector<RuleConclusion> free_rules(const SymbolicHeap& psi, const Term& t, Exit e, Fresh& fresh) {
  const auto& pure = psi.pure;
  Term bt = Term::base(t), et = Term::end(t);
  if (e == Exit::Er) {
    if (entails_pure(pure, std::vector<PureAtom>{neq(bt, t), eq(bt, Term::null())}) == Answer::Yes)
      return {{"FreeEr", {}, psi}};
    return {};
  }
  if (!holds(pure, eq(bt, t))) return {};
  auto cells = cells_of(psi);

  // the chain of Arr atoms covering [b(t), e(t))
  auto first = std::find_if(cells.begin(), cells.end(),
                            [&](const Cell& c) { return holds(pure, le(c.lo, bt)) && holds(pure, lt(bt, c.hi)); });
  if (first == cells.end()) return {};
  std::vector<Cell> chain{*first};
  while (!holds(pure, le(et, chain.back().hi))) {
    auto next = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
      return std::none_of(chain.begin(), chain.end(), [&](const Cell& d) { return d.idx == c.idx; }) &&
             holds(pure, eq(chain.back().hi, c.lo)) && holds(pure, lt(chain.back().lo, c.lo));
    });
    if (next == cells.end()) return {};
    chain.push_back(*next);
  }
  const Cell &c1 = chain.front(), &ck = chain.back();
  bool left_split = !holds(pure, eq(c1.lo, bt));
  bool right_split = !holds(pure, eq(et, ck.hi));
  if ((left_split && (c1.pto || !holds(pure, lt(c1.lo, bt)))) ||
      (right_split && (ck.pto || !holds(pure, lt(et, ck.hi)))))
    return {};

  std::set<std::size_t> drop;
  for (auto& c : chain) drop.insert(c.idx);
  auto y = fresh();
  Term Y = Term::var(y);
  SymbolicHeap r = without(psi, drop);
  if (left_split) r = r * arr(c1.lo, t);
  r = r * narr(t, Y);
  if (right_split) r = r * arr(Y, ck.hi);

  TermSet tb, te;
  for (auto& u : heap_term_set(psi)) {
    if (u.kind() == TermKind::Base && holds(pure, eq(u, bt))) tb.insert(u);
    if (u.kind() == TermKind::End && holds(pure, eq(u, et))) te.insert(u);
  }
  if (!tb.empty()) r = replace_term_set(r, tb, t);
  if (!te.empty()) r = replace_term_set(r, te, Y);
  int which = left_split ? (right_split ? 1 : 4) : (right_split ? 2 : 3);
  RuleConclusion rc{"FreeArr" + std::to_string(which), {y}, std::move(r)};
  rc.k = static_cast<int>(chain.size());
  return {rc};
}

std::vector<RuleConclusion> load_rules(const SymbolicHeap& psi, const std::string& x, const Term& t, Exit e,
                                       Fresh& fresh) {
  const auto& pure = psi.pure;
  if (e == Exit::Er) {
    if (holds(pure, eq(Term::base(t), Term::null()))) return {{"LoadEr", {}, psi}};
    return {};
  }
  auto x1 = fresh();
  Term th = Term::var(x1), X = Term::var(x);
  auto sub = [&](const Term& u) { return substitute(u, x, th); };
  for (auto& c : cells_of(psi)) {
    if (c.pto && holds(pure, eq(c.lo, t)))
      return {{"LoadPtr", {x1}, substitute(psi, x, th) * eq(X, sub(psi.spatial[c.idx].b))}};
    if (!c.pto && holds(pure, le(c.lo, t)) && holds(pure, lt(t, c.hi))) {
      SymbolicHeap r = substitute(without(psi, {c.idx}), x, th);
      if (!holds(pure, eq(c.lo, t))) r = r * arr(sub(c.lo), sub(t));
      r = r * pto(sub(t), X);
      std::vector<RuleConclusion> out;
      for (auto& tail : split_tail(pure, t, c.hi))
        out.push_back({"LoadArr", {x1}, tail ? r * arr(sub(plus1(t)), sub(c.hi)) : r * eq(sub(plus1(t)), sub(c.hi))});
      return out;
    }
  }
  return {};
}

std::vector<RuleConclusion> store_rules(const SymbolicHeap& psi, const Term& t, const Term& v, Exit e) {
  const auto& pure = psi.pure;
  if (e == Exit::Er) {
    if (holds(pure, eq(Term::base(t), Term::null()))) return {{"StoreEr", {}, psi}};
    return {};
  }
  for (auto& c : cells_of(psi)) {
    if (c.pto && holds(pure, eq(c.lo, t))) return {{"StorePtr", {}, without(psi, {c.idx}) * pto(t, v)}};
    if (!c.pto && holds(pure, le(c.lo, t)) && holds(pure, lt(t, c.hi))) {
      bool head = holds(pure, eq(c.lo, t));
      SymbolicHeap r = without(psi, {c.idx});
      if (!head) r = r * arr(c.lo, t);
      r = r * pto(t, v);
      std::vector<RuleConclusion> out;
      for (auto& tail : split_tail(pure, t, c.hi)) {
        std::string rule = head ? "StoreArr1" : tail ? "StoreArr2" : "StoreArr3";
        out.push_back({rule, {}, tail ? r * *tail : r * eq(plus1(t), c.hi)});
      }
      return out;
    }
  }
  return {};
}

thread_local std::map<std::string, std::size_t> coverage;

class Builder {
 public:
  explicit Builder(int cap) : cap_(cap) {}
  void add(std::vector<std::string> vars, SymbolicHeap body, const std::string& rule = {}) {
    if (satisfiable(body.pure) == Answer::No) return;
    if (!rule.empty()) ++coverage[rule];
    body = body.normalized();
    body.pure.erase(std::unique(body.pure.begin(), body.pure.end()), body.pure.end());
    std::string key;
    for (auto& v : vars) key += v + ",";
    key += to_string(body);
    if (!seen_.insert(key).second) return;
    if (static_cast<int>(out_.disjuncts.size()) >= cap_) {
      out_.truncated = true;
      return;
    }
    out_.disjuncts.push_back({std::move(vars), std::move(body)});
  }
  void add_all(const std::vector<std::string>& prefix, const Assertion& a) {
    for (auto& d : a.disjuncts) {
      auto vars = prefix;
      vars.insert(vars.end(), d.vars.begin(), d.vars.end());
      add(std::move(vars), d.body);
    }
    if (a.truncated) mark(a.bound);
  }
  void mark(int bound) {
    out_.truncated = true;
    out_.bound = std::max(out_.bound, bound);
  }
  Assertion take() { return std::move(out_); }

 private:
  int cap_;
  Assertion out_;
  std::set<std::string> seen_;
};

class Ctx {
 public:
  explicit Ctx(const WpoBudget& b) : b_(b) {}

  void reserve(const Assertion& a) {
    for (auto& d : a.disjuncts) {
      fresh_.reserve(free_vars(d.body));
      for (auto& v : d.vars) fresh_.reserve(v);
    }
  }
  void reserve(const SymbolicHeap& h) { fresh_.reserve(free_vars(h)); }
  void reserve(const Command& c) { fresh_.reserve(all_vars(c)); }

  Assertion wpo(const Assertion& p, const Command& c, Exit e) {
    reserve(p);
    reserve(c);
    CanoOptions opt;
    opt.case_cap = b_.case_cap;
    Assertion cp = cano(p, c, opt);
    reserve(cp);
    Builder out(b_.disjunct_cap);
    if (cp.truncated) out.mark(cp.bound);
    for (auto& d : cp.disjuncts) out.add_all(d.vars, sh(d.body, c, e));
    return out.take();
  }

  Assertion sh(const SymbolicHeap& psi, const Command& c, Exit e) {
    reserve(psi);
    const bool ok = e == Exit::Ok;
    switch (c.kind()) {
      case CmdKind::Skip:
        return ok ? Assertion::of(psi) : Assertion::falsity();
      case CmdKind::Error:
        return ok ? Assertion::falsity() : Assertion::of(psi);
      case CmdKind::Assume:
        return ok ? Assertion::of(psi * c.cond()) : Assertion::falsity();
      case CmdKind::Assign: {
        if (!ok) return Assertion::falsity();
        auto x1 = fresh_();
        Term th = Term::var(x1);
        return Assertion::of({x1}, substitute(psi, c.var(), th) *
                                      eq(Term::var(c.var()), substitute(c.term(), c.var(), th)));
      }
      case CmdKind::Havoc: {
        if (!ok) return Assertion::falsity();
        auto x1 = fresh_();
        return Assertion::of({x1}, substitute(psi, c.var(), Term::var(x1)));
      }
      case CmdKind::Local: {
        auto x1 = fresh_(), x2 = fresh_();
        const auto& x = c.var();
        Assertion inner = wpo(Assertion::of(substitute(psi, x, Term::var(x1))), c.first(), e);
        inner = substitute(inner, x, Term::var(x2));
        inner = substitute(inner, x1, Term::var(x));
        Builder out(b_.disjunct_cap);
        out.add_all({x2}, inner);
        return out.take();
      }
      case CmdKind::LocalInit:
        return sh(psi, desugar(c, fresh_), e);
      case CmdKind::Seq: {
        Assertion mid = sh(psi, c.first(), Exit::Ok);
        if (ok) return wpo(mid, c.second(), Exit::Ok);
        Assertion out = sh(psi, c.first(), Exit::Er);
        out.append(wpo(mid, c.second(), Exit::Er));
        return out;
      }
      case CmdKind::Choice: {
        Assertion out = sh(psi, c.first(), e);
        out.append(sh(psi, c.second(), e));
        return out;
      }
      case CmdKind::Star: {
        Builder out(b_.disjunct_cap);
        Assertion ups = Assertion::of(psi);
        for (int n = 0; n <= b_.loop_bound; ++n) {
          out.add_all({}, ok ? ups : wpo(ups, c.first(), Exit::Er));
          if (n < b_.loop_bound) ups = wpo(ups, c.first(), Exit::Ok);
        }
        out.mark(b_.loop_bound);
        return out.take();
      }
      case CmdKind::Alloc:
      case CmdKind::Free:
      case CmdKind::Load:
      case CmdKind::Store: {
        Builder out(b_.disjunct_cap);
        for (auto& rc : heap_rule_conclusions(psi, c, e, fresh_)) out.add(rc.vars, rc.body, rc.rule);
        return out.take();
      }
    }
    return Assertion::falsity();
  }

 private:
  WpoBudget b_;
  Fresh fresh_;
};

}  // namespace

std::vector<RuleConclusion> heap_rule_conclusions(const SymbolicHeap& psi, const Command& c, Exit e, Fresh& fresh) {
  fresh.reserve(free_vars(psi));
  fresh.reserve(all_vars(c));
  switch (c.kind()) {
    case CmdKind::Alloc:
      return e == Exit::Ok ? alloc_rules(psi, c.var(), c.term(), fresh) : std::vector<RuleConclusion>{};
    case CmdKind::Free:
      return free_rules(psi, c.term(), e, fresh);
    case CmdKind::Load:
      return load_rules(psi, c.var(), c.term(), e, fresh);
    case CmdKind::Store:
      return store_rules(psi, c.term(), c.term2(), e);
    default:
      throw std::invalid_argument("heap_rule_conclusions: not a heap command");
  }
}

std::map<std::string, std::size_t> wpo_coverage() { return coverage; }
void reset_wpo_coverage() { coverage.clear(); }

Assertion wpo(const Assertion& p, const Command& c, Exit e, const WpoBudget& budget) {
  Ctx ctx(budget);
  return ctx.wpo(p, c, e);
}

Assertion wpo_sh(const SymbolicHeap& psi, const Command& c, Exit e, const WpoBudget& budget) {
  Ctx ctx(budget);
  ctx.reserve(c);
  return ctx.sh(psi, c, e);
}

Assertion wpo_sh_alloc(const SymbolicHeap& psi, const std::string& x, const Term& t, Exit e) {
  return wpo_sh(psi, Command::alloc(x, t), e);
}

Assertion wpo_sh_free(const SymbolicHeap& psi, const Term& t, Exit e) { return wpo_sh(psi, Command::free(t), e); }

Assertion wpo_sh_load(const SymbolicHeap& psi, const std::string& x, const Term& t, Exit e) {
  return wpo_sh(psi, Command::load(x, t), e);
}

Assertion wpo_sh_store(const SymbolicHeap& psi, const Term& t, const Term& v, Exit e) {
  return wpo_sh(psi, Command::store(t, v), e);
}

}  // namespace islarr
