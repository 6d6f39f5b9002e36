#pragma once

#include <stdexcept>
#include <vector>

#include "islarr/syntax.hpp"

namespace islarr {

class SizeLimitError : public std::runtime_error {
 public:
  SizeLimitError(std::size_t size, int cap)
      : std::runtime_error("term set of size " + std::to_string(size) + " exceeds the case cap " +
                           std::to_string(cap)),
        size(size) {}
  std::size_t size;
};

enum class Rel : std::uint8_t { Lt, Eq };

// null R0 t1 R1 t2 ... t_n
struct OrderCase {
  std::vector<Term> seq;
  std::vector<Rel> rels;  // rels[0] relates null and seq[0]
  PureFormula render() const;
};

// Every permutation of T with every relation vector, deduplicated by atom multiset.
std::vector<OrderCase> cases(const TermSet& t, int cap = 7);

struct CanoOptions {
  int case_cap = 7;
  bool drop_unsat = true;  // drop disjuncts whose pure part is inconsistent
};

// pi * psi for every ordering pi of T, one representative per weak order
// (permuting terms inside an equality class gives an equivalent formula).
std::vector<SymbolicHeap> cases_sh(const SymbolicHeap& psi, const TermSet& t, const CanoOptions& opt = {});

Assertion cano(const Assertion& p, const Command& c, const CanoOptions& opt = {});

// psi_pure entails some case over T; an inconsistent pure part counts as canonical.
bool is_canonical(const SymbolicHeap& psi, const TermSet& t);

// Weak order over T (class 0 is the class of null) that no state can realize
// because of how b and e describe disjoint blocks.
bool violates_block_axioms(const std::vector<std::vector<Term>>& classes);

}  // namespace islarr
