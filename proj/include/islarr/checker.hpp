#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "islarr/semantics.hpp"
#include "islarr/syntax.hpp"
#include "islarr/wpo.hpp"

namespace islarr {

struct Triple {
  Assertion pre;
  Command prog = Command::skip();
  Exit exit = Exit::Ok;
  Assertion post;
};

Triple make_triple(const std::string& pre, const std::string& prog, Exit e, const std::string& post);
Exit parse_exit(const std::string& s);
std::string to_string(const Triple& t);

enum class Status : std::uint8_t { Valid, Invalid, BoundedValid, Unknown };
const char* to_string(Status s);
int exit_code(Status s);  // 0 Valid, 1 Invalid, 2 otherwise

struct Verdict {
  Status status = Status::Unknown;
  std::optional<ConcreteState> witness;  // a model of the post not reachable from the pre
  std::vector<std::string> notes;
  bool truncated = false;
};

// All post-states of Q in U must lie in WPO[[P, C, eps]].
Verdict check_triple_semantic(const Triple& tr, const Universe& u);
// Q |= wpo(P, C, eps) over the exact states of U.
Verdict check_triple_logical(const Triple& tr, const Universe& u, const WpoBudget& budget = {});
// Same, against an already computed wpo(P, C, eps).
Verdict check_triple_logical(const Triple& tr, const Universe& u, const Assertion& w);

// Universe over every variable of the triple.
Universe universe_for(const Triple& tr, Value vmax, int heap_cap = -1, int loop_bound = 2);

struct SideConditions {
  std::optional<SymbolicHeap> frame;  // Frame-Ok
  std::string var;                    // Exist, Local
  int alpha = -1, beta = -1, j = -1, k = -1;  // alloc indices, -1 leaves them free
  Value vmax = 4;                     // universe for the Cons entailments
};

struct RuleCheck {
  bool accepted = false;
  std::vector<std::string> diagnostics;
  explicit operator bool() const { return accepted; }
};

const std::vector<std::string>& rule_names();

// Schema match plus side conditions; no proof search.
RuleCheck check_rule_instance(const std::string& rule, const std::vector<Triple>& premises, const SideConditions& side,
                              const Triple& conclusion);

struct BugReport {
  std::vector<Disjunct> er_disjuncts;
  std::vector<ConcreteState> witness_states;
  std::vector<std::string> source_command;  // empty when not derivable
  bool truncated = false;
  bool empty() const { return er_disjuncts.empty(); }
};

BugReport find_bugs(const Assertion& p, const Command& c, const Universe& u, const WpoBudget& budget = {});

struct DiffReport {
  Status status = Status::Unknown;  // Valid: empty diff; BoundedValid: empty up to the loop bound
  Assertion wpo;
  std::size_t wpo_disjuncts = 0, wpo_models = 0, semantic_models = 0;
  std::size_t only_wpo_count = 0, only_semantic_count = 0;
  std::vector<ConcreteState> only_wpo, only_semantic;  // a few minimal samples
  bool truncated = false;
};

DiffReport expressiveness_diff(const Assertion& p, const Command& c, Exit e, const Universe& u,
                               const WpoBudget& budget = {});

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const BugReport& r);
nlohmann::json to_json(const DiffReport& d);
nlohmann::json to_json(const Assertion& a);

// Corpora of (P, C, eps) instances.
struct CorpusEntry {
  std::string name;
  Assertion pre;
  Command prog = Command::skip();
  Exit exit = Exit::Ok;
  Value vmax = 5;
  std::string covers;  // heap rule this entry is meant to exercise, if any
};

std::vector<CorpusEntry> hand_corpus();

struct RandomOptions {
  int max_vars = 3;
  int max_spatial = 2;
  int max_commands = 2;
  Value min_vmax = 4, max_vmax = 6;
};
std::vector<CorpusEntry> random_corpus(std::uint64_t seed, int count, const RandomOptions& opt = {});

}  // namespace islarr
