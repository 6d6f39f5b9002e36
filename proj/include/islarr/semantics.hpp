#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "islarr/syntax.hpp"

namespace islarr {

class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (s, h, B). Heap cells map to a value or to nullopt for a deallocated cell.
struct ConcreteState {
  std::map<std::string, Value> store;
  std::map<Value, std::optional<Value>> heap;
  std::vector<std::pair<Value, Value>> blocks;  // sorted, half-open

  bool well_formed(std::string* why = nullptr) const;
  bool exact() const;
  Value base(Value l) const;  // b_B(l), 0 outside every block
  Value end(Value l) const;
  Value lookup(const std::string& x) const;  // unknown variables read as 0

  friend bool operator==(const ConcreteState&, const ConcreteState&) = default;
  friend auto operator<=>(const ConcreteState&, const ConcreteState&) = default;
};

std::string to_string(const ConcreteState& s);
nlohmann::json to_json(const ConcreteState& s);
ConcreteState state_from_json(const nlohmann::json& j);

// Val = {0..vmax}; heap cells are 1..vmax-1 and every block ends at or before vmax,
// so e(t) always denotes a value of the universe.
struct Universe {
  std::vector<std::string> vars;
  Value vmax = 4;
  int heap_cap = -1;  // max |dom(h)|; negative means vmax - 1
  int loop_bound = 2;

  int cap() const { return heap_cap < 0 ? static_cast<int>(vmax - 1) : heap_cap; }
  Value max_cell() const { return vmax - 1; }
  void validate() const;

  // vars = free variables of everything given, sorted
  static Universe over(const std::vector<std::set<std::string>>& var_sets, Value vmax, int heap_cap = -1,
                       int loop_bound = 2);
};

Value interp_term(const Term& t, const ConcreteState& s);

enum class Truth : std::uint8_t { False, True, Unknown };
const char* to_string(Truth t);

// Existential witnesses range over {0..vmax}.
Truth satisfies(const ConcreteState& s, const Assertion& a, const Universe& u);
bool satisfies(const ConcreteState& s, const SymbolicHeap& h);
bool satisfies(const ConcreteState& s, const PureFormula& p);

// A set of states over a fixed universe, stored as packed byte strings.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(const Universe& u);

  const Universe& universe() const { return u_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  bool complete = true;

  void insert(const ConcreteState& s);
  void insert_key(std::string k) { keys_.insert(std::move(k)); }
  bool contains(const ConcreteState& s) const;
  bool contains_key(const std::string& k) const { return keys_.count(k) > 0; }
  const std::set<std::string>& keys() const { return keys_; }

  ConcreteState decode(const std::string& key) const;
  std::string encode(const ConcreteState& s) const;  // throws if s lies outside the universe
  bool in_universe(const ConcreteState& s) const;
  std::vector<ConcreteState> states() const;

  void merge(const StateSet& other);
  StateSet minus(const StateSet& other) const;
  friend bool operator==(const StateSet& a, const StateSet& b) { return a.keys_ == b.keys_; }

 private:
  Universe u_;
  std::set<std::string> keys_;
};

// Smallest |dom(h)|, then smallest sum of values.
ConcreteState minimal_state(const std::vector<ConcreteState>& states);

// Every well-formed state of the universe; the naive reference enumerator.
StateSet all_states(const Universe& u, bool exact_only = true);

// Models of an assertion within the universe.
StateSet models(const Assertion& a, const Universe& u, bool exact_only = true);
StateSet models(const SymbolicHeap& h, const Universe& u, bool exact_only = true);
// Stops after limit models, in enumeration order (small store and cell values first).
StateSet some_models(const Assertion& a, const Universe& u, std::size_t limit, bool exact_only = true);

// {s' | (s, s') in [[C]]eps}; s must be exact. Star runs at most u.loop_bound iterations.
StateSet denote(const Command& c, Exit e, const ConcreteState& s, const Universe& u);

// WPO[[P, C, eps]] restricted to the universe.
StateSet wpo_semantic(const Assertion& p, const Command& c, Exit e, const Universe& u);

}  // namespace islarr
