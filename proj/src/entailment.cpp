#include "islarr/entailment.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>

namespace islarr {

const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes:
      return "yes";
    case Answer::No:
      return "no";
    case Answer::Unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(EntailStatus s) {
  switch (s) {
    case EntailStatus::Yes:
      return "yes";
    case EntailStatus::No:
      return "no";
    case EntailStatus::BoundedYes:
      return "bounded-yes";
  }
  return "?";
}

std::string LinExpr::key() const {
  std::ostringstream os;
  for (auto& [v, k] : coef)
    if (k != 0) os << k << "*v" << v << "+";
  os << c;
  return os.str();
}

int LinearSystem::fresh(const std::string& name) {
  names_.push_back(name);
  return static_cast<int>(names_.size()) - 1;
}

LinExpr LinearSystem::linearize(const Term& t) {
  LinExpr e;
  switch (t.kind()) {
    case TermKind::Null:
      break;
    case TermKind::Nat:
      e.c = t.nat_value();
      break;
    case TermKind::Var: {
      auto it = prog_.find(t.name());
      int v = it != prog_.end() ? it->second : (prog_[t.name()] = fresh(t.name()));
      e.coef[v] = 1;
      break;
    }
    case TermKind::Add: {
      e = linearize(t.lhs());
      auto r = linearize(t.rhs());
      for (auto& [v, k] : r.coef) e.coef[v] += k;
      e.c += r.c;
      for (auto it = e.coef.begin(); it != e.coef.end();)
        it = it->second == 0 ? e.coef.erase(it) : std::next(it);
      break;
    }
    case TermKind::Base:
    case TermKind::End: {
      bool is_end = t.kind() == TermKind::End;
      LinExpr arg = linearize(t.arg());
      std::string key = (is_end ? "e:" : "b:") + arg.key();
      auto it = block_idx_.find(key);
      int v;
      if (it != block_idx_.end()) {
        v = block_[it->second].var;
      } else {
        v = fresh(to_string(t));
        block_idx_[key] = static_cast<int>(block_.size());
        block_.push_back({is_end, arg, v});
      }
      e.coef[v] = 1;
      break;
    }
  }
  return e;
}

namespace {

// ---------------------------------------------------------------- integer solver

using I128 = __int128;
constexpr Value kCoefLimit = Value{1} << 40;

struct Row {
  std::vector<Value> a;
  Value c = 0;
  bool operator<(const Row& o) const { return a != o.a ? a < o.a : c < o.c; }
  bool operator==(const Row& o) const { return a == o.a && c == o.c; }
  bool zero() const {
    return std::all_of(a.begin(), a.end(), [](Value x) { return x == 0; });
  }
  Value eval(const std::vector<Value>& x) const {
    Value s = c;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * x[i];
    return s;
  }
};

Row negate(Row r) {
  for (auto& v : r.a) v = -v;
  r.c = -r.c;
  return r;
}

struct Cong {
  Row diff;  // arg1 - arg2
  int v1, v2;
};

struct Problem {
  int n = 0;
  std::vector<Row> le;  // row <= 0
  std::vector<Row> eq;  // row == 0
  std::vector<Row> neq;
  std::vector<Cong> cong;
};

enum class Status { Sat, Unsat, Unknown };

struct Result {
  Status status;
  std::vector<Value> model;
};

Value floor_div(Value a, Value b) {
  Value q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Value ceil_div(Value a, Value b) { return -floor_div(-a, b); }

Value row_gcd(const Row& r) {
  Value g = 0;
  for (auto v : r.a) g = std::gcd(g, v < 0 ? -v : v);
  return g;
}

// Normalizes an inequality; false if it is trivially violated.
bool tighten(Row& r, bool& trivial) {
  trivial = false;
  Value g = row_gcd(r);
  if (g == 0) {
    trivial = r.c <= 0;
    return r.c <= 0;
  }
  if (g > 1) {
    for (auto& v : r.a) v /= g;
    r.c = ceil_div(r.c, g);
  }
  return true;
}

class FmSolver {
 public:
  explicit FmSolver(int n) : n_(n) {}

  Result solve(std::vector<Row> le, std::vector<Row> eq) {
    std::vector<Row> orig_le = le, orig_eq = eq;
    // equalities with a unit coefficient are substituted away
    std::vector<std::pair<int, Row>> subst;
    while (!eq.empty()) {
      Row r = eq.back();
      eq.pop_back();
      Value g = row_gcd(r);
      if (g == 0) {
        if (r.c != 0) return {Status::Unsat, {}};
        continue;
      }
      if (r.c % g != 0) return {Status::Unsat, {}};
      for (auto& v : r.a) v /= g;
      r.c /= g;
      int pivot = -1;
      for (int i = 0; i < n_; ++i)
        if (r.a[i] == 1 || r.a[i] == -1) {
          pivot = i;
          break;
        }
      if (pivot < 0) {
        le.push_back(r);
        le.push_back(negate(r));
        continue;
      }
      if (r.a[pivot] == 1) r = negate(r);  // now -x_p + rest = 0, i.e. x_p = rest
      Row rest = r;
      rest.a[pivot] = 0;
      auto apply = [&](Row& q) {
        Value k = q.a[pivot];
        if (k == 0) return;
        q.a[pivot] = 0;
        for (int i = 0; i < n_; ++i) q.a[i] += k * rest.a[i];
        q.c += k * rest.c;
      };
      for (auto& q : eq) apply(q);
      for (auto& q : le) apply(q);
      for (auto& s : subst) apply(s.second);
      subst.emplace_back(pivot, rest);
    }

    std::vector<std::pair<int, std::vector<Row>>> steps;
    std::set<Row> rows;
    for (auto& r : le) {
      bool triv;
      if (!tighten(r, triv)) return {Status::Unsat, {}};
      if (!triv) rows.insert(r);
    }
    std::vector<bool> done(static_cast<std::size_t>(n_), false);
    while (true) {
      int best = -1;
      std::size_t best_cost = 0;
      for (int v = 0; v < n_; ++v) {
        if (done[v]) continue;
        std::size_t pos = 0, neg = 0;
        for (auto& r : rows) {
          if (r.a[v] > 0) ++pos;
          else if (r.a[v] < 0) ++neg;
        }
        if (pos + neg == 0) continue;
        std::size_t cost = pos * neg;
        if (best < 0 || cost < best_cost) {
          best = v;
          best_cost = cost;
        }
      }
      if (best < 0) break;
      done[best] = true;
      std::vector<Row> with, pos, neg;
      std::set<Row> next;
      for (auto& r : rows) {
        if (r.a[best] == 0) next.insert(r);
        else {
          with.push_back(r);
          (r.a[best] > 0 ? pos : neg).push_back(r);
        }
      }
      for (auto& p : pos)
        for (auto& q : neg) {
          Row r;
          r.a.assign(static_cast<std::size_t>(n_), 0);
          Value kp = -q.a[best], kq = p.a[best];
          for (int i = 0; i < n_; ++i) {
            I128 v = static_cast<I128>(kp) * p.a[i] + static_cast<I128>(kq) * q.a[i];
            if (v > kCoefLimit || v < -kCoefLimit) return {Status::Unknown, {}};
            r.a[i] = static_cast<Value>(v);
          }
          I128 c = static_cast<I128>(kp) * p.c + static_cast<I128>(kq) * q.c;
          if (c > kCoefLimit || c < -kCoefLimit) return {Status::Unknown, {}};
          r.c = static_cast<Value>(c);
          bool triv;
          if (!tighten(r, triv)) return {Status::Unsat, {}};
          if (!triv) next.insert(r);
        }
      if (next.size() > 20000) return {Status::Unknown, {}};
      steps.emplace_back(best, std::move(with));
      rows = std::move(next);
    }
    for (auto& r : rows)
      if (r.zero() && r.c > 0) return {Status::Unsat, {}};

    // back-substitution, smallest admissible value first
    std::vector<Value> x(static_cast<std::size_t>(n_), 0);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      int v = it->first;
      Value lo = 0, hi = std::numeric_limits<Value>::max();
      for (auto& r : it->second) {
        Value rest = r.c;
        for (int i = 0; i < n_; ++i)
          if (i != v) rest += r.a[i] * x[i];
        if (r.a[v] > 0) hi = std::min(hi, floor_div(-rest, r.a[v]));
        else lo = std::max(lo, ceil_div(rest, -r.a[v]));
      }
      if (lo > hi) return {Status::Unknown, {}};  // integrality gap
      x[v] = lo;
    }
    for (auto it = subst.rbegin(); it != subst.rend(); ++it) x[it->first] = it->second.eval(x);
    for (auto& r : orig_le)
      if (r.eval(x) > 0) return {Status::Unknown, {}};
    for (auto& r : orig_eq)
      if (r.eval(x) != 0) return {Status::Unknown, {}};
    for (auto v : x)
      if (v < 0) return {Status::Unknown, {}};
    return {Status::Sat, x};
  }

 private:
  int n_;
};

Row lt_row(const Row& r) {  // r < 0  ->  r + 1 <= 0
  Row q = r;
  q.c += 1;
  return q;
}

Result solve(Problem p, int depth) {
  FmSolver fm(p.n);
  Result r = fm.solve(p.le, p.eq);
  if (r.status != Status::Sat) return r;
  if (depth > 14) return {Status::Unknown, {}};
  auto branch = [&](std::vector<Problem> alts) {
    bool unknown = false;
    for (auto& a : alts) {
      Result s = solve(std::move(a), depth + 1);
      if (s.status == Status::Sat) return s;
      if (s.status == Status::Unknown) unknown = true;
    }
    return Result{unknown ? Status::Unknown : Status::Unsat, {}};
  };
  for (std::size_t i = 0; i < p.neq.size(); ++i) {
    if (p.neq[i].eval(r.model) != 0) continue;
    Problem a = p, b = p;
    a.neq.erase(a.neq.begin() + static_cast<std::ptrdiff_t>(i));
    b.neq.erase(b.neq.begin() + static_cast<std::ptrdiff_t>(i));
    a.le.push_back(lt_row(p.neq[i]));
    b.le.push_back(lt_row(negate(p.neq[i])));
    return branch({std::move(a), std::move(b)});
  }
  for (std::size_t i = 0; i < p.cong.size(); ++i) {
    auto& c = p.cong[i];
    if (c.diff.eval(r.model) != 0 || r.model[c.v1] == r.model[c.v2]) continue;
    Problem a = p, b = p, e = p;
    a.le.push_back(lt_row(c.diff));
    b.le.push_back(lt_row(negate(c.diff)));
    e.eq.push_back(c.diff);
    Row same;
    same.a.assign(static_cast<std::size_t>(p.n), 0);
    same.a[c.v1] += 1;
    same.a[c.v2] -= 1;
    e.eq.push_back(same);
    return branch({std::move(a), std::move(b), std::move(e)});
  }
  return r;
}

Row to_row(const LinExpr& e, int n) {
  Row r;
  r.a.assign(static_cast<std::size_t>(n), 0);
  for (auto& [v, k] : e.coef) r.a[v] += k;
  r.c = e.c;
  return r;
}

Row diff_row(LinearSystem& ls, const Term& a, const Term& b, int n) {
  Row ra = to_row(ls.linearize(a), n), rb = to_row(ls.linearize(b), n);
  for (int i = 0; i < n; ++i) ra.a[i] -= rb.a[i];
  ra.c -= rb.c;
  return ra;
}

void add_atom(Problem& p, LinearSystem& ls, const PureAtom& at, bool negated) {
  Row d = diff_row(ls, at.lhs, at.rhs, p.n);  // lhs - rhs
  PureOp op = at.op;
  if (negated) {
    switch (op) {
      case PureOp::Eq:
        p.neq.push_back(d);
        return;
      case PureOp::Neq:
        p.eq.push_back(d);
        return;
      case PureOp::Le:  // not lhs <= rhs  ->  rhs < lhs
        p.le.push_back(lt_row(negate(d)));
        return;
      case PureOp::Lt:  // not lhs < rhs  ->  rhs <= lhs
        p.le.push_back(negate(d));
        return;
    }
  }
  switch (op) {
    case PureOp::Eq:
      p.eq.push_back(d);
      return;
    case PureOp::Neq:
      p.neq.push_back(d);
      return;
    case PureOp::Le:
      p.le.push_back(d);
      return;
    case PureOp::Lt:
      p.le.push_back(lt_row(d));
      return;
  }
}

Problem build(const PureFormula& hyp, const std::vector<PureAtom>& neg, LinearSystem& ls) {
  for (auto& a : hyp) {
    ls.linearize(a.lhs);
    ls.linearize(a.rhs);
  }
  for (auto& a : neg) {
    ls.linearize(a.lhs);
    ls.linearize(a.rhs);
  }
  Problem p;
  p.n = ls.num_vars();
  for (auto& a : hyp) add_atom(p, ls, a, false);
  for (auto& a : neg) add_atom(p, ls, a, true);
  for (int v = 0; v < p.n; ++v) {
    Row r;
    r.a.assign(static_cast<std::size_t>(p.n), 0);
    r.a[v] = -1;
    p.le.push_back(r);
  }
  auto& bv = ls.block_vars();
  for (std::size_t i = 0; i < bv.size(); ++i)
    for (std::size_t j = i + 1; j < bv.size(); ++j) {
      if (bv[i].is_end != bv[j].is_end) continue;
      Row d = to_row(bv[i].arg, p.n), d2 = to_row(bv[j].arg, p.n);
      for (int k = 0; k < p.n; ++k) d.a[k] -= d2.a[k];
      d.c -= d2.c;
      p.cong.push_back({d, bv[i].var, bv[j].var});
    }
  return p;
}

// ---------------------------------------------------------------- cache

struct Cache {
  std::mutex mu;
  std::unordered_map<std::string, Answer> map;
  EntailStats stats;
};

Cache& cache() {
  static Cache c;
  return c;
}

std::string cache_key(const PureFormula& hyp, const std::vector<PureAtom>& concl, char tag) {
  auto h = hyp;
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  std::string k(1, tag);
  for (auto& a : h) k += to_string(a) + ";";
  k += "|";
  for (auto& a : concl) k += to_string(a) + ";";
  return k;
}

Answer reference_impl(const PureFormula& hyp, const std::vector<PureAtom>& concl, int bound) {
  LinearSystem ls;
  Problem p = build(hyp, concl, ls);
  if (bound < 0) {
    Value maxc = 0;
    for (auto* rows : {&p.le, &p.eq, &p.neq})
      for (auto& r : *rows) maxc = std::max(maxc, r.c < 0 ? -r.c : r.c);
    bound = static_cast<int>(maxc) + p.n + 2;
  }
  std::vector<Value> x(static_cast<std::size_t>(p.n), 0);
  auto ok = [&] {
    for (auto& r : p.le)
      if (r.eval(x) > 0) return false;
    for (auto& r : p.eq)
      if (r.eval(x) != 0) return false;
    for (auto& r : p.neq)
      if (r.eval(x) == 0) return false;
    for (auto& c : p.cong)
      if (c.diff.eval(x) == 0 && x[c.v1] != x[c.v2]) return false;
    return true;
  };
  while (true) {
    if (ok()) return Answer::No;  // hyp holds and every conclusion fails
    int i = 0;
    while (i < p.n && x[i] == bound) x[i++] = 0;
    if (i == p.n) break;
    ++x[i];
  }
  return Answer::Yes;
}

Answer decide(const PureFormula& hyp, const std::vector<PureAtom>& concl) {
  auto key = cache_key(hyp, concl, 'E');
  auto& c = cache();
  {
    std::lock_guard<std::mutex> lock(c.mu);
    ++c.stats.queries;
    auto it = c.map.find(key);
    if (it != c.map.end()) {
      ++c.stats.cache_hits;
      return it->second;
    }
  }
  LinearSystem ls;
  Problem p = build(hyp, concl, ls);
  Result r = solve(p, 0);
  Answer a = r.status == Status::Unsat ? Answer::Yes : r.status == Status::Sat ? Answer::No : Answer::Unknown;
  if (a == Answer::Unknown && p.n <= 5) {
    // escalate: a counterexample from enumeration is a definite No
    if (reference_impl(hyp, concl, -1) == Answer::No) a = Answer::No;
  }
  std::lock_guard<std::mutex> lock(c.mu);
  if (a == Answer::Unknown) {
    ++c.stats.unknowns;
    spdlog::debug("entailment unknown: {}", key);
  }
  if (c.map.size() > 2000000) c.map.clear();
  c.map.emplace(std::move(key), a);
  return a;
}

}  // namespace

Answer entails_pure(const PureFormula& hyp, const std::vector<PureAtom>& concl) { return decide(hyp, concl); }

Answer entails_pure(const PureFormula& hyp, const PureAtom& concl) {
  return decide(hyp, std::vector<PureAtom>{concl});
}

Answer entails_pure_all(const PureFormula& hyp, const PureFormula& concl_conj) {
  bool unknown = false;
  for (auto& a : concl_conj) {
    Answer r = entails_pure(hyp, a);
    if (r == Answer::No) return Answer::No;
    if (r == Answer::Unknown) unknown = true;
  }
  return unknown ? Answer::Unknown : Answer::Yes;
}

Answer satisfiable(const PureFormula& p) {
  switch (decide(p, {})) {
    case Answer::Yes:
      return Answer::No;
    case Answer::No:
      return Answer::Yes;
    default:
      return Answer::Unknown;
  }
}

Answer entails_pure_reference(const PureFormula& hyp, const std::vector<PureAtom>& concl, int bound) {
  return reference_impl(hyp, concl, bound);
}

EntailStats entail_stats() {
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  return c.stats;
}

void clear_entail_cache() {
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mu);
  c.map.clear();
  c.stats = {};
}

EntailResult entails_assertion(const Assertion& p, const Assertion& q, const Universe& u, bool exact_only) {
  StateSet mp = models(p, u, exact_only);
  StateSet mq = models(q, u, exact_only);
  StateSet bad = mp.minus(mq);
  EntailResult r;
  if (!bad.empty()) {
    r.status = EntailStatus::No;
    r.counter = minimal_state(bad.states());
    return r;
  }
  r.status = (p.truncated || q.truncated) ? EntailStatus::BoundedYes : EntailStatus::Yes;
  return r;
}

}  // namespace islarr
