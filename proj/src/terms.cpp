#include <algorithm>

#include "islarr/syntax.hpp"

namespace islarr {

namespace {

void collect(const Term& t, TermSet& out) {
  switch (t.kind()) {
    case TermKind::Null:
      return;
    case TermKind::Nat:
    case TermKind::Var:
      out.insert(t);
      return;
    case TermKind::Add:
      out.insert(t);
      collect(t.lhs(), out);
      collect(t.rhs(), out);
      return;
    case TermKind::Base:
    case TermKind::End:
      out.insert(t);
      collect(t.arg(), out);
      return;
  }
}

void collect(const PureAtom& p, TermSet& out) {
  collect(p.lhs, out);
  collect(p.rhs, out);
}

void collect(const SpatialAtom& s, TermSet& out) {
  switch (s.kind) {
    case SpatialKind::Emp:
      return;
    case SpatialKind::PointsTo:
      collect(s.a, out);
      collect(Term::add(s.a, Term::nat(1)), out);
      collect(s.b, out);
      return;
    case SpatialKind::Arr:
    case SpatialKind::NegArr:
      collect(s.a, out);
      collect(s.b, out);
      return;
  }
}

void collect_vars(const Term& t, std::set<std::string>& out) {
  switch (t.kind()) {
    case TermKind::Var:
      out.insert(t.name());
      return;
    case TermKind::Add:
      collect_vars(t.lhs(), out);
      collect_vars(t.rhs(), out);
      return;
    case TermKind::Base:
    case TermKind::End:
      collect_vars(t.arg(), out);
      return;
    default:
      return;
  }
}

}  // namespace

TermSet term_set(const Term& t) {
  TermSet out;
  collect(t, out);
  return out;
}

TermSet pure_term_set(const PureFormula& p) {
  TermSet out;
  for (auto& a : p) collect(a, out);
  return out;
}

TermSet heap_term_set(const SymbolicHeap& h) {
  TermSet out;
  for (auto& s : h.spatial) collect(s, out);
  for (auto& p : h.pure) collect(p, out);
  return out;
}

TermSet heap_term_set_minus(const SymbolicHeap& h) {
  TermSet out;
  for (auto& t : heap_term_set(h))
    if (!t.has_block_ops()) out.insert(t);
  return out;
}

TermSet command_term_set(const Command& c) {
  TermSet out;
  switch (c.kind()) {
    case CmdKind::Skip:
    case CmdKind::Error:
      break;
    case CmdKind::Assign:
    case CmdKind::Alloc:
      out.insert(Term::var(c.var()));
      collect(c.term(), out);
      break;
    case CmdKind::Havoc:
      out.insert(Term::var(c.var()));
      break;
    case CmdKind::Assume:
      out = pure_term_set(c.cond());
      break;
    case CmdKind::Local:
      out = command_term_set(c.first());
      out.erase(Term::var(c.var()));
      break;
    case CmdKind::LocalInit:
      out = command_term_set(c.first());
      out.erase(Term::var(c.var()));
      collect(c.term(), out);
      break;
    case CmdKind::Seq:
    case CmdKind::Choice: {
      out = command_term_set(c.first());
      auto r = command_term_set(c.second());
      out.insert(r.begin(), r.end());
      break;
    }
    case CmdKind::Star:
      out = command_term_set(c.first());
      break;
    case CmdKind::Free:
      collect(c.term(), out);
      collect(Term::base(c.term()), out);
      collect(Term::end(c.term()), out);
      break;
    case CmdKind::Load:
      out.insert(Term::var(c.var()));
      collect(Term::base(c.term()), out);
      break;
    case CmdKind::Store:
      collect(Term::add(c.term(), Term::nat(1)), out);
      collect(Term::base(c.term()), out);
      collect(c.term2(), out);
      break;
  }
  return out;
}

std::set<std::string> modified_vars(const Command& c) {
  switch (c.kind()) {
    case CmdKind::Assign:
    case CmdKind::Havoc:
    case CmdKind::Alloc:
    case CmdKind::Load:
      return {c.var()};
    case CmdKind::Local:
    case CmdKind::LocalInit: {
      auto m = modified_vars(c.first());
      m.erase(c.var());
      return m;
    }
    case CmdKind::Seq:
    case CmdKind::Choice: {
      auto m = modified_vars(c.first());
      auto r = modified_vars(c.second());
      m.insert(r.begin(), r.end());
      return m;
    }
    case CmdKind::Star:
      return modified_vars(c.first());
    default:
      return {};
  }
}

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  collect_vars(t, out);
  return out;
}

std::set<std::string> free_vars(const SymbolicHeap& h) {
  std::set<std::string> out;
  for (auto& s : h.spatial) {
    collect_vars(s.a, out);
    collect_vars(s.b, out);
  }
  for (auto& p : h.pure) {
    collect_vars(p.lhs, out);
    collect_vars(p.rhs, out);
  }
  return out;
}

std::set<std::string> free_vars(const Disjunct& d) {
  auto out = free_vars(d.body);
  for (auto& v : d.vars) out.erase(v);
  return out;
}

std::set<std::string> free_vars(const Assertion& a) {
  std::set<std::string> out;
  for (auto& d : a.disjuncts) {
    auto f = free_vars(d);
    out.insert(f.begin(), f.end());
  }
  return out;
}

namespace {

void command_vars(const Command& c, std::set<std::string>& out, bool binders) {
  switch (c.kind()) {
    case CmdKind::Skip:
    case CmdKind::Error:
      return;
    case CmdKind::Assign:
    case CmdKind::Alloc:
    case CmdKind::Load:
      out.insert(c.var());
      collect_vars(c.term(), out);
      return;
    case CmdKind::Havoc:
      out.insert(c.var());
      return;
    case CmdKind::Assume:
      for (auto& p : c.cond()) {
        collect_vars(p.lhs, out);
        collect_vars(p.rhs, out);
      }
      return;
    case CmdKind::Local:
    case CmdKind::LocalInit: {
      std::set<std::string> inner;
      command_vars(c.first(), inner, binders);
      if (!binders) inner.erase(c.var());
      else inner.insert(c.var());
      out.insert(inner.begin(), inner.end());
      if (c.kind() == CmdKind::LocalInit) collect_vars(c.term(), out);
      return;
    }
    case CmdKind::Seq:
    case CmdKind::Choice:
      command_vars(c.first(), out, binders);
      command_vars(c.second(), out, binders);
      return;
    case CmdKind::Star:
      command_vars(c.first(), out, binders);
      return;
    case CmdKind::Free:
      collect_vars(c.term(), out);
      return;
    case CmdKind::Store:
      collect_vars(c.term(), out);
      collect_vars(c.term2(), out);
      return;
  }
}

}  // namespace

std::set<std::string> free_vars(const Command& c) {
  std::set<std::string> out;
  command_vars(c, out, false);
  return out;
}

std::set<std::string> all_vars(const Command& c) {
  std::set<std::string> out;
  command_vars(c, out, true);
  return out;
}

// ------------------------------------------------------------ substitution

Term substitute(const Term& t, const std::string& x, const Term& u) {
  switch (t.kind()) {
    case TermKind::Var:
      return t.name() == x ? u : t;
    case TermKind::Add: {
      auto l = substitute(t.lhs(), x, u);
      auto r = substitute(t.rhs(), x, u);
      if (l == t.lhs() && r == t.rhs()) return t;
      return Term::add(l, r);
    }
    case TermKind::Base:
      return Term::base(substitute(t.arg(), x, u));
    case TermKind::End:
      return Term::end(substitute(t.arg(), x, u));
    default:
      return t;
  }
}

PureAtom substitute(const PureAtom& p, const std::string& x, const Term& u) {
  return {p.op, substitute(p.lhs, x, u), substitute(p.rhs, x, u)};
}

SymbolicHeap substitute(const SymbolicHeap& h, const std::string& x, const Term& u) {
  SymbolicHeap out;
  out.spatial.reserve(h.spatial.size());
  out.pure.reserve(h.pure.size());
  for (auto& s : h.spatial) out.spatial.push_back({s.kind, substitute(s.a, x, u), substitute(s.b, x, u)});
  for (auto& p : h.pure) out.pure.push_back(substitute(p, x, u));
  return out;
}

Assertion substitute(const Assertion& a, const std::string& x, const Term& u) {
  Assertion out;
  out.truncated = a.truncated;
  out.bound = a.bound;
  auto uvars = free_vars(u);
  for (auto& d : a.disjuncts) {
    if (std::find(d.vars.begin(), d.vars.end(), x) != d.vars.end()) {
      out.disjuncts.push_back(d);
      continue;
    }
    Disjunct nd = d;
    Fresh fresh;
    fresh.reserve(free_vars(d.body));
    fresh.reserve(uvars);
    for (auto& v : d.vars) fresh.reserve(v);
    for (auto& v : nd.vars) {
      if (uvars.count(v)) {
        auto nv = fresh();
        nd.body = substitute(nd.body, v, Term::var(nv));
        v = nv;
      }
    }
    nd.body = substitute(nd.body, x, u);
    out.disjuncts.push_back(std::move(nd));
  }
  return out;
}

bool is_subterm(const Term& small, const Term& big) {
  if (small == big) return true;
  switch (big.kind()) {
    case TermKind::Add:
      return is_subterm(small, big.lhs()) || is_subterm(small, big.rhs());
    case TermKind::Base:
    case TermKind::End:
      return is_subterm(small, big.arg());
    default:
      return false;
  }
}

namespace {

Term replace_rec(const Term& t, const TermSet& T, const Term& u) {
  if (T.count(t)) return u;
  switch (t.kind()) {
    case TermKind::Add:
      return Term::add(replace_rec(t.lhs(), T, u), replace_rec(t.rhs(), T, u));
    case TermKind::Base:
      return Term::base(replace_rec(t.arg(), T, u));
    case TermKind::End:
      return Term::end(replace_rec(t.arg(), T, u));
    default:
      return t;
  }
}

void check_antichain(const TermSet& T) {
  for (auto& a : T)
    for (auto& b : T)
      if (!(a == b) && is_subterm(a, b))
        throw SyntaxError("replacement set has " + to_string(a) + " inside " + to_string(b));
}

}  // namespace

Term replace_term_set(const Term& t, const TermSet& T, const Term& u) {
  check_antichain(T);
  return replace_rec(t, T, u);
}

SymbolicHeap replace_term_set(const SymbolicHeap& h, const TermSet& T, const Term& u) {
  check_antichain(T);
  if (T.empty()) return h;
  SymbolicHeap out;
  for (auto& s : h.spatial) out.spatial.push_back({s.kind, replace_rec(s.a, T, u), replace_rec(s.b, T, u)});
  for (auto& p : h.pure) out.pure.push_back({p.op, replace_rec(p.lhs, T, u), replace_rec(p.rhs, T, u)});
  return out;
}

// ------------------------------------------------------------ fresh names

bool is_reserved_name(const std::string& name) { return !name.empty() && name[0] == '$'; }

void Fresh::reserve(const std::string& name) {
  if (!is_reserved_name(name) || name.size() < 2) return;
  int k = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return;
    k = k * 10 + (name[i] - '0');
    if (k > 100000000) return;
  }
  next_ = std::max(next_, k + 1);
}

Command desugar(const Command& c, Fresh& fresh) {
  switch (c.kind()) {
    case CmdKind::LocalInit: {
      Term t = c.term();
      if (free_vars(t).count(c.var())) {
        // the initializer reads the outer x; route it through a fresh local
        auto tmp = fresh();
        auto body = desugar(c.first(), fresh);
        auto inner = Command::local(
            c.var(), Command::seq(Command::assign(c.var(), Term::var(tmp)), body));
        return Command::local(tmp, Command::seq(Command::assign(tmp, t), inner));
      }
      return Command::local(c.var(), Command::seq(Command::assign(c.var(), t), desugar(c.first(), fresh)));
    }
    case CmdKind::Local:
      return Command::local(c.var(), desugar(c.first(), fresh));
    case CmdKind::Seq:
      return Command::seq(desugar(c.first(), fresh), desugar(c.second(), fresh));
    case CmdKind::Choice:
      return Command::choice(desugar(c.first(), fresh), desugar(c.second(), fresh));
    case CmdKind::Star:
      return Command::star(desugar(c.first(), fresh));
    default:
      return c;
  }
}

}  // namespace islarr
