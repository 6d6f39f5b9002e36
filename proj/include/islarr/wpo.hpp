#pragma once

#include <map>
#include <string>
#include <vector>

#include "islarr/canonical.hpp"
#include "islarr/syntax.hpp"

namespace islarr {

struct WpoBudget {
  int loop_bound = 2;
  int disjunct_cap = 50000;
  int case_cap = 7;
};

// Thrown when a canonical input does not determine an order the rules rely on.
class WpoInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// wpo(P, C, eps): canonicalize P for C, then apply wpo_sh under each prefix.
Assertion wpo(const Assertion& p, const Command& c, Exit e, const WpoBudget& budget = {});

// psi must be canonical for termS(psi) u termC(C).
Assertion wpo_sh(const SymbolicHeap& psi, const Command& c, Exit e, const WpoBudget& budget = {});

// One disjunct of a heap rule's conclusion, labeled with the rule that produced it
// (Alloc1..5, FreeArr1..4, FreeEr, LoadPtr, LoadArr, LoadEr, StorePtr, StoreArr1..3, StoreEr).
struct RuleConclusion {
  std::string rule;
  std::vector<std::string> vars;
  SymbolicHeap body;
  int alpha = 0, beta = 0, j = 0, k = 0;  // alloc indices; k is the chain length for FreeArr
};

// psi canonical for the command; unsatisfiable conclusions are kept.
std::vector<RuleConclusion> heap_rule_conclusions(const SymbolicHeap& psi, const Command& c, Exit e, Fresh& fresh);

// Heap rules that produced a satisfiable wpo disjunct on this thread since the last reset.
std::map<std::string, std::size_t> wpo_coverage();
void reset_wpo_coverage();

Assertion wpo_sh_alloc(const SymbolicHeap& psi, const std::string& x, const Term& t, Exit e);
Assertion wpo_sh_free(const SymbolicHeap& psi, const Term& t, Exit e);
Assertion wpo_sh_load(const SymbolicHeap& psi, const std::string& x, const Term& t, Exit e);
Assertion wpo_sh_store(const SymbolicHeap& psi, const Term& t, const Term& v, Exit e);

}  // namespace islarr
