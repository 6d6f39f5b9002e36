#include "islarr/syntax.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace islarr {

struct Term::Node {
  TermKind kind;
  Value nat = 0;
  std::string name;
  Term l{nullptr}, r{nullptr};
  bool block = false;
  std::size_t hash = 0;
  std::size_t size = 1;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Term::Term() {
  static const std::shared_ptr<const Node> null_node = [] {
    auto n = std::make_shared<Node>();
    n->kind = TermKind::Null;
    n->hash = 0x51ed;
    return n;
  }();
  n_ = null_node;
}

Term Term::nat(Value n) {
  if (n < 0) throw SyntaxError("negative literal");
  auto node = std::make_shared<Node>();
  node->kind = TermKind::Nat;
  node->nat = n;
  node->hash = mix(1, std::hash<Value>{}(n));
  return Term(std::move(node));
}

Term Term::var(const std::string& name) {
  if (name.empty()) throw SyntaxError("empty variable name");
  auto node = std::make_shared<Node>();
  node->kind = TermKind::Var;
  node->name = name;
  node->hash = mix(2, std::hash<std::string>{}(name));
  return Term(std::move(node));
}

Term Term::add(const Term& l, const Term& r) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::Add;
  node->l = l;
  node->r = r;
  node->block = l.has_block_ops() || r.has_block_ops();
  node->hash = mix(mix(3, l.hash()), r.hash());
  node->size = 1 + l.size() + r.size();
  return Term(std::move(node));
}

Term Term::base(const Term& t) {
  if (t.has_block_ops()) throw SyntaxError("b(" + to_string(t) + "): argument contains b or e");
  auto node = std::make_shared<Node>();
  node->kind = TermKind::Base;
  node->l = t;
  node->block = true;
  node->hash = mix(4, t.hash());
  node->size = 1 + t.size();
  return Term(std::move(node));
}

Term Term::end(const Term& t) {
  if (t.has_block_ops()) throw SyntaxError("e(" + to_string(t) + "): argument contains b or e");
  auto node = std::make_shared<Node>();
  node->kind = TermKind::End;
  node->l = t;
  node->block = true;
  node->hash = mix(5, t.hash());
  node->size = 1 + t.size();
  return Term(std::move(node));
}

TermKind Term::kind() const { return n_->kind; }
Value Term::nat_value() const { return n_->nat; }
const std::string& Term::name() const { return n_->name; }
const Term& Term::lhs() const { return n_->l; }
const Term& Term::rhs() const { return n_->r; }
const Term& Term::arg() const { return n_->l; }
bool Term::has_block_ops() const { return n_->block; }
std::size_t Term::hash() const { return n_->hash; }
std::size_t Term::size() const { return n_->size; }

int compare(const Term& a, const Term& b) {
  if (a.n_ == b.n_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case TermKind::Null:
      return 0;
    case TermKind::Nat:
      return a.nat_value() < b.nat_value() ? -1 : (a.nat_value() > b.nat_value() ? 1 : 0);
    case TermKind::Var:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case TermKind::Add: {
      int c = compare(a.lhs(), b.lhs());
      return c != 0 ? c : compare(a.rhs(), b.rhs());
    }
    case TermKind::Base:
    case TermKind::End:
      return compare(a.arg(), b.arg());
  }
  return 0;
}

int compare(const PureAtom& a, const PureAtom& b) {
  if (a.op != b.op) return a.op < b.op ? -1 : 1;
  int c = compare(a.lhs, b.lhs);
  return c != 0 ? c : compare(a.rhs, b.rhs);
}

int compare(const SpatialAtom& x, const SpatialAtom& y) {
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  int c = compare(x.a, y.a);
  return c != 0 ? c : compare(x.b, y.b);
}

SymbolicHeap SymbolicHeap::normalized() const {
  SymbolicHeap h = *this;
  std::sort(h.spatial.begin(), h.spatial.end());
  std::sort(h.pure.begin(), h.pure.end());
  return h;
}

bool operator==(const SymbolicHeap& a, const SymbolicHeap& b) { return compare(a, b) == 0; }

int compare(const SymbolicHeap& a, const SymbolicHeap& b) {
  auto na = a.normalized(), nb = b.normalized();
  if (na.spatial.size() != nb.spatial.size()) return na.spatial.size() < nb.spatial.size() ? -1 : 1;
  if (na.pure.size() != nb.pure.size()) return na.pure.size() < nb.pure.size() ? -1 : 1;
  for (std::size_t i = 0; i < na.spatial.size(); ++i)
    if (int c = compare(na.spatial[i], nb.spatial[i])) return c;
  for (std::size_t i = 0; i < na.pure.size(); ++i)
    if (int c = compare(na.pure[i], nb.pure[i])) return c;
  return 0;
}

SymbolicHeap operator*(SymbolicHeap a, const SymbolicHeap& b) {
  a.spatial.insert(a.spatial.end(), b.spatial.begin(), b.spatial.end());
  a.pure.insert(a.pure.end(), b.pure.begin(), b.pure.end());
  return a;
}

SymbolicHeap operator*(SymbolicHeap a, const SpatialAtom& s) {
  a.spatial.push_back(s);
  return a;
}

SymbolicHeap operator*(SymbolicHeap a, const PureAtom& p) {
  a.pure.push_back(p);
  return a;
}

SymbolicHeap operator*(SymbolicHeap a, const PureFormula& p) {
  a.pure.insert(a.pure.end(), p.begin(), p.end());
  return a;
}

bool operator==(const Disjunct& a, const Disjunct& b) { return a.vars == b.vars && a.body == b.body; }

void Assertion::append(const Assertion& other) {
  disjuncts.insert(disjuncts.end(), other.disjuncts.begin(), other.disjuncts.end());
  if (other.truncated) {
    truncated = true;
    bound = std::max(bound, other.bound);
  }
}

bool operator==(const Assertion& a, const Assertion& b) {
  return a.disjuncts == b.disjuncts && a.truncated == b.truncated;
}

// ---------------------------------------------------------------- commands

struct Command::Node {
  CmdKind kind;
  std::string x;
  Term t, t2;
  PureFormula cond;
  std::vector<Command> kids;
};

std::shared_ptr<Command::Node> Command::make_node(CmdKind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

namespace {

void check_program_term(const Term& t) {
  if (t.has_block_ops()) throw SyntaxError("program term " + to_string(t) + " contains b or e");
}

}  // namespace

Command Command::skip() { return Command(make_node(CmdKind::Skip)); }
Command Command::error() { return Command(make_node(CmdKind::Error)); }

Command Command::assign(const std::string& x, const Term& t) {
  check_program_term(t);
  auto n = make_node(CmdKind::Assign);
  n->x = x;
  n->t = t;
  return Command(n);
}

Command Command::havoc(const std::string& x) {
  auto n = make_node(CmdKind::Havoc);
  n->x = x;
  return Command(n);
}

Command Command::assume(PureFormula p) {
  auto n = make_node(CmdKind::Assume);
  n->cond = std::move(p);
  return Command(n);
}

Command Command::local(const std::string& x, const Command& body) {
  auto n = make_node(CmdKind::Local);
  n->x = x;
  n->kids = {body};
  return Command(n);
}

Command Command::local_init(const std::string& x, const Term& t, const Command& body) {
  check_program_term(t);
  auto n = make_node(CmdKind::LocalInit);
  n->x = x;
  n->t = t;
  n->kids = {body};
  return Command(n);
}

Command Command::seq(const Command& a, const Command& b) {
  auto n = make_node(CmdKind::Seq);
  n->kids = {a, b};
  return Command(n);
}

Command Command::choice(const Command& a, const Command& b) {
  auto n = make_node(CmdKind::Choice);
  n->kids = {a, b};
  return Command(n);
}

Command Command::star(const Command& body) {
  auto n = make_node(CmdKind::Star);
  n->kids = {body};
  return Command(n);
}

Command Command::alloc(const std::string& x, const Term& t) {
  check_program_term(t);
  auto n = make_node(CmdKind::Alloc);
  n->x = x;
  n->t = t;
  return Command(n);
}

Command Command::free(const Term& t) {
  check_program_term(t);
  auto n = make_node(CmdKind::Free);
  n->t = t;
  return Command(n);
}

Command Command::load(const std::string& x, const Term& t) {
  check_program_term(t);
  auto n = make_node(CmdKind::Load);
  n->x = x;
  n->t = t;
  return Command(n);
}

Command Command::store(const Term& t, const Term& v) {
  check_program_term(t);
  check_program_term(v);
  auto n = make_node(CmdKind::Store);
  n->t = t;
  n->t2 = v;
  return Command(n);
}

CmdKind Command::kind() const { return n_->kind; }
const std::string& Command::var() const { return n_->x; }
const Term& Command::term() const { return n_->t; }
const Term& Command::term2() const { return n_->t2; }
const PureFormula& Command::cond() const { return n_->cond; }

const Command& Command::first() const { return n_->kids.at(0); }
const Command& Command::second() const { return n_->kids.at(1); }

bool operator==(const Command& a, const Command& b) {
  if (a.n_ == b.n_) return true;
  if (a.kind() != b.kind()) return false;
  const auto& x = *a.n_;
  const auto& y = *b.n_;
  if (x.x != y.x || !(x.t == y.t) || !(x.t2 == y.t2)) return false;
  if (x.cond.size() != y.cond.size()) return false;
  auto cx = x.cond, cy = y.cond;
  std::sort(cx.begin(), cx.end());
  std::sort(cy.begin(), cy.end());
  if (cx != cy) return false;
  if (x.kids.size() != y.kids.size()) return false;
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (!(x.kids[i] == y.kids[i])) return false;
  return true;
}

const char* to_string(Exit e) { return e == Exit::Ok ? "ok" : "er"; }

}  // namespace islarr
