#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace islarr {

using Value = std::int64_t;

class SyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TermKind : std::uint8_t { Null, Nat, Var, Add, Base, End };

class Term {
 public:
  Term();  // null

  static Term null() { return Term(); }
  static Term nat(Value n);
  static Term var(const std::string& name);
  static Term add(const Term& l, const Term& r);
  static Term base(const Term& t);
  static Term end(const Term& t);

  TermKind kind() const;
  Value nat_value() const;
  const std::string& name() const;
  const Term& lhs() const;
  const Term& rhs() const;
  const Term& arg() const;

  bool is_null() const { return kind() == TermKind::Null; }
  bool is_var() const { return kind() == TermKind::Var; }
  bool has_block_ops() const;
  std::size_t hash() const;
  std::size_t size() const;

  friend int compare(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

using TermSet = std::set<Term>;

enum class PureOp : std::uint8_t { Eq, Neq, Le, Lt };

struct PureAtom {
  PureOp op = PureOp::Eq;
  Term lhs, rhs;

  friend int compare(const PureAtom& a, const PureAtom& b);
  friend bool operator==(const PureAtom& a, const PureAtom& b) { return compare(a, b) == 0; }
  friend bool operator<(const PureAtom& a, const PureAtom& b) { return compare(a, b) < 0; }
};

inline PureAtom eq(Term a, Term b) { return {PureOp::Eq, std::move(a), std::move(b)}; }
inline PureAtom neq(Term a, Term b) { return {PureOp::Neq, std::move(a), std::move(b)}; }
inline PureAtom le(Term a, Term b) { return {PureOp::Le, std::move(a), std::move(b)}; }
inline PureAtom lt(Term a, Term b) { return {PureOp::Lt, std::move(a), std::move(b)}; }

enum class SpatialKind : std::uint8_t { Emp, PointsTo, Arr, NegArr };

// PointsTo uses (a, b) = (addr, val); Arr/NegArr use (a, b) = (lo, hi).
struct SpatialAtom {
  SpatialKind kind = SpatialKind::Emp;
  Term a, b;

  friend int compare(const SpatialAtom& x, const SpatialAtom& y);
  friend bool operator==(const SpatialAtom& x, const SpatialAtom& y) { return compare(x, y) == 0; }
  friend bool operator<(const SpatialAtom& x, const SpatialAtom& y) { return compare(x, y) < 0; }
};

inline SpatialAtom emp() { return {SpatialKind::Emp, Term(), Term()}; }
inline SpatialAtom pto(Term a, Term v) { return {SpatialKind::PointsTo, std::move(a), std::move(v)}; }
inline SpatialAtom arr(Term lo, Term hi) { return {SpatialKind::Arr, std::move(lo), std::move(hi)}; }
inline SpatialAtom narr(Term lo, Term hi) { return {SpatialKind::NegArr, std::move(lo), std::move(hi)}; }

using PureFormula = std::vector<PureAtom>;

// Multiset of atoms; equality ignores order.
struct SymbolicHeap {
  std::vector<SpatialAtom> spatial;
  PureFormula pure;

  const PureFormula& pure_part() const { return pure; }
  SymbolicHeap normalized() const;
  bool empty() const { return spatial.empty() && pure.empty(); }

  friend bool operator==(const SymbolicHeap& a, const SymbolicHeap& b);
  friend int compare(const SymbolicHeap& a, const SymbolicHeap& b);
};

SymbolicHeap operator*(SymbolicHeap a, const SymbolicHeap& b);
SymbolicHeap operator*(SymbolicHeap a, const SpatialAtom& s);
SymbolicHeap operator*(SymbolicHeap a, const PureAtom& p);
SymbolicHeap operator*(SymbolicHeap a, const PureFormula& p);

struct Disjunct {
  std::vector<std::string> vars;
  SymbolicHeap body;

  friend bool operator==(const Disjunct& a, const Disjunct& b);
};

struct Assertion {
  std::vector<Disjunct> disjuncts;
  bool truncated = false;
  int bound = 0;  // unroll depth at which the stream was cut

  static Assertion falsity() { return {}; }
  static Assertion of(SymbolicHeap h) { return Assertion{{Disjunct{{}, std::move(h)}}}; }
  static Assertion of(std::vector<std::string> vars, SymbolicHeap h) {
    return Assertion{{Disjunct{std::move(vars), std::move(h)}}};
  }
  bool is_false() const { return disjuncts.empty(); }
  void append(const Assertion& other);

  friend bool operator==(const Assertion& a, const Assertion& b);
};

enum class CmdKind : std::uint8_t {
  Skip, Assign, Havoc, Assume, Local, LocalInit, Seq, Choice, Star, Error, Alloc, Free, Load, Store
};

class Command {
 public:
  static Command skip();
  static Command error();
  static Command assign(const std::string& x, const Term& t);
  static Command havoc(const std::string& x);
  static Command assume(PureFormula p);
  static Command local(const std::string& x, const Command& body);
  static Command local_init(const std::string& x, const Term& t, const Command& body);
  static Command seq(const Command& a, const Command& b);
  static Command choice(const Command& a, const Command& b);
  static Command star(const Command& body);
  static Command alloc(const std::string& x, const Term& t);
  static Command free(const Term& t);
  static Command load(const std::string& x, const Term& t);
  static Command store(const Term& t, const Term& v);

  CmdKind kind() const;
  const std::string& var() const;
  const Term& term() const;   // Assign/LocalInit/Alloc/Free/Load value, Store address
  const Term& term2() const;  // Store value
  const PureFormula& cond() const;
  const Command& first() const;   // Seq/Choice left, Local/Star body
  const Command& second() const;

  friend bool operator==(const Command& a, const Command& b);

 private:
  struct Node;
  static std::shared_ptr<Node> make_node(CmdKind k);
  explicit Command(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

enum class Exit : std::uint8_t { Ok, Er };
const char* to_string(Exit e);

// Term collection (Defs. of term, termS, termS-, termC, mod).
TermSet term_set(const Term& t);
TermSet pure_term_set(const PureFormula& p);
TermSet heap_term_set(const SymbolicHeap& h);
TermSet heap_term_set_minus(const SymbolicHeap& h);
TermSet command_term_set(const Command& c);
std::set<std::string> modified_vars(const Command& c);

std::set<std::string> free_vars(const Term& t);
std::set<std::string> free_vars(const SymbolicHeap& h);
std::set<std::string> free_vars(const Disjunct& d);
std::set<std::string> free_vars(const Assertion& a);
std::set<std::string> free_vars(const Command& c);
std::set<std::string> all_vars(const Command& c);  // including local binders

Term substitute(const Term& t, const std::string& x, const Term& u);
PureAtom substitute(const PureAtom& p, const std::string& x, const Term& u);
SymbolicHeap substitute(const SymbolicHeap& h, const std::string& x, const Term& u);
// Capture-avoiding: a bound variable clashing with u's variables is renamed first.
Assertion substitute(const Assertion& a, const std::string& x, const Term& u);

// psi[T := u]; throws SyntaxError if two members of T are in the subterm relation.
Term replace_term_set(const Term& t, const TermSet& T, const Term& u);
SymbolicHeap replace_term_set(const SymbolicHeap& h, const TermSet& T, const Term& u);

bool is_subterm(const Term& small, const Term& big);

// LocalInit(x, t, C) => Local(x, Seq(Assign(x, t'), C)) where t' has x renamed to fresh.
Command desugar(const Command& c, class Fresh& fresh);

// Fresh identifiers live in the reserved `$k` namespace.
class Fresh {
 public:
  explicit Fresh(int start = 0) : next_(start) {}
  std::string operator()() { return "$" + std::to_string(next_++); }
  int peek() const { return next_; }
  void reserve(const std::string& name);
  void reserve(const std::set<std::string>& names) {
    for (auto& n : names) reserve(n);
  }

 private:
  int next_;
};
bool is_reserved_name(const std::string& name);

// Printing in the concrete text syntax.
std::string to_string(const Term& t);
std::string to_string(const PureAtom& p);
std::string to_string(const PureFormula& p);
std::string to_string(const SpatialAtom& s);
std::string to_string(const SymbolicHeap& h);
std::string to_string(const Disjunct& d);
std::string to_string(const Assertion& a);
std::string to_string(const Command& c);

// Parsing; errors carry line:column.
Term parse_term(const std::string& src);
PureFormula parse_pure(const std::string& src);
SymbolicHeap parse_heap(const std::string& src);
Assertion parse_assertion(const std::string& src);
Command parse_command(const std::string& src);

}  // namespace islarr
