#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "islarr/semantics.hpp"
#include "islarr/syntax.hpp"

namespace islarr {

enum class Answer : std::uint8_t { Yes, No, Unknown };
const char* to_string(Answer a);

// Linear form sum(coef[i] * v_i) + c over the system's variables.
struct LinExpr {
  std::map<int, Value> coef;
  Value c = 0;
  std::string key() const;
};

// Variables: one per program variable, one per b(.) and e(.) keyed by the
// linear form of the argument.
class LinearSystem {
 public:
  struct BlockVar {
    bool is_end;
    LinExpr arg;
    int var;
  };

  LinExpr linearize(const Term& t);
  int num_vars() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<BlockVar>& block_vars() const { return block_; }

 private:
  int fresh(const std::string& name);
  std::map<std::string, int> prog_;
  std::map<std::string, int> block_idx_;
  std::vector<BlockVar> block_;
  std::vector<std::string> names_;
};

// hyp |= concl_1 \/ ... \/ concl_n over natural-number assignments, with b and e
// uninterpreted but congruent. An empty conclusion means false.
Answer entails_pure(const PureFormula& hyp, const std::vector<PureAtom>& concl);
Answer entails_pure(const PureFormula& hyp, const PureAtom& concl);
Answer entails_pure_all(const PureFormula& hyp, const PureFormula& concl_conj);

// Yes: satisfiable, No: unsatisfiable.
Answer satisfiable(const PureFormula& p);

// Reference engine: enumeration with every variable in {0..bound}. Its Yes is
// only bounded; the bound defaults to max constant + #vars + 2.
Answer entails_pure_reference(const PureFormula& hyp, const std::vector<PureAtom>& concl, int bound = -1);

struct EntailStats {
  std::size_t queries = 0, cache_hits = 0, unknowns = 0;
};
EntailStats entail_stats();
void clear_entail_cache();

enum class EntailStatus : std::uint8_t { Yes, No, BoundedYes };
const char* to_string(EntailStatus s);

struct EntailResult {
  EntailStatus status = EntailStatus::Yes;
  std::optional<ConcreteState> counter;  // a model of P that is not a model of Q
};

// P |= Q decided by enumeration over the universe. exact_only restricts to exact states.
EntailResult entails_assertion(const Assertion& p, const Assertion& q, const Universe& u, bool exact_only = false);

}  // namespace islarr
