#include "islarr/checker.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

#include <spdlog/spdlog.h>

#include "islarr/canonical.hpp"
#include "islarr/entailment.hpp"

namespace islarr {

Triple make_triple(const std::string& pre, const std::string& prog, Exit e, const std::string& post) {
  return Triple{parse_assertion(pre), parse_command(prog), e, parse_assertion(post)};
}

Exit parse_exit(const std::string& s) {
  if (s == "ok") return Exit::Ok;
  if (s == "er") return Exit::Er;
  throw std::invalid_argument("exit condition must be ok or er, got '" + s + "'");
}

std::string to_string(const Triple& t) {
  return "[" + to_string(t.pre) + "] " + to_string(t.prog) + " [" + to_string(t.exit) + ": " + to_string(t.post) + "]";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Valid: return "Valid";
    case Status::Invalid: return "Invalid";
    case Status::BoundedValid: return "BoundedValid";
    case Status::Unknown: return "Unknown";
  }
  return "?";
}

int exit_code(Status s) {
  switch (s) {
    case Status::Valid: return 0;
    case Status::Invalid: return 1;
    default: return 2;
  }
}

Universe universe_for(const Triple& tr, Value vmax, int heap_cap, int loop_bound) {
  return Universe::over({free_vars(tr.pre), free_vars(tr.post), free_vars(tr.prog)}, vmax, heap_cap, loop_bound);
}

Verdict check_triple_semantic(const Triple& tr, const Universe& u) {
  StateSet w = wpo_semantic(tr.pre, tr.prog, tr.exit, u);
  StateSet q = models(tr.post, u, true);
  StateSet bad = q.minus(w);
  Verdict v;
  v.truncated = !w.complete || tr.pre.truncated || tr.post.truncated;
  if (!w.complete) v.notes.push_back("loop unrolled at most " + std::to_string(u.loop_bound) + " times");
  if (!bad.empty()) {
    v.witness = minimal_state(bad.states());
    v.status = w.complete ? Status::Invalid : Status::Unknown;
    return v;
  }
  v.status = v.truncated ? Status::BoundedValid : Status::Valid;
  return v;
}

Verdict check_triple_logical(const Triple& tr, const Universe& u, const WpoBudget& budget) {
  return check_triple_logical(tr, u, wpo(tr.pre, tr.prog, tr.exit, budget));
}

Verdict check_triple_logical(const Triple& tr, const Universe& u, const Assertion& w) {
  auto r = entails_assertion(tr.post, w, u, true);
  Verdict v;
  v.truncated = w.truncated || tr.pre.truncated || tr.post.truncated;
  if (w.truncated) v.notes.push_back("wpo stream cut at loop bound " + std::to_string(w.bound));
  if (r.status == EntailStatus::No) {
    v.witness = r.counter;
    v.status = w.truncated ? Status::Unknown : Status::Invalid;
    return v;
  }
  v.status = (v.truncated || r.status == EntailStatus::BoundedYes) ? Status::BoundedValid : Status::Valid;
  return v;
}

// ---------------------------------------------------------------------------
// rule instances

namespace {

const std::vector<std::string> kRules = {
    "Skip",     "Error",     "Seq1",      "Seq2",      "Loop-zero", "Loop-non-zero", "Cons",     "Disj",
    "Choice",   "Exist",     "Assign",    "Havoc",     "Assume",    "Local",         "Frame-Ok", "Alloc1",
    "Alloc2",   "Alloc3",    "Alloc4",    "Alloc5",    "AllocEr",   "FreeArr1",      "FreeArr2", "FreeArr3",
    "FreeArr4", "FreeEr",    "LoadPtr",   "LoadArr",   "LoadEr",    "StorePtr",      "StoreArr1", "StoreArr2",
    "StoreArr3", "StoreEr"};

std::string squash(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (std::isalnum(static_cast<unsigned char>(ch))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

std::string disjunct_key(const Disjunct& d) {
  SymbolicHeap b = d.body;
  for (std::size_t i = 0; i < d.vars.size(); ++i) b = substitute(b, d.vars[i], Term::var("#" + std::to_string(i)));
  b = b.normalized();
  b.pure.erase(std::unique(b.pure.begin(), b.pure.end()), b.pure.end());
  return std::to_string(d.vars.size()) + "|" + to_string(b);
}

std::set<std::string> keys(const Assertion& a) {
  std::set<std::string> out;
  for (auto& d : a.disjuncts) out.insert(disjunct_key(d));
  return out;
}

// Equal up to atom order, duplicate atoms and disjuncts, and bound-variable names.
bool same(const Assertion& a, const Assertion& b) { return keys(a) == keys(b); }

Assertion prefixed(const std::string& x, const Assertion& a) {
  Assertion out = a;
  for (auto& d : out.disjuncts) d.vars.insert(d.vars.begin(), x);
  return out;
}

bool single_heap(const Assertion& a, SymbolicHeap& out) {
  if (a.disjuncts.size() != 1 || !a.disjuncts[0].vars.empty()) return false;
  out = a.disjuncts[0].body;
  return true;
}

class Check {
 public:
  RuleCheck r;
  bool need(bool cond, const std::string& why) {
    if (!cond) r.diagnostics.push_back(why);
    return cond;
  }
  RuleCheck done() {
    r.accepted = r.diagnostics.empty();
    return r;
  }
};

bool is_heap_rule(const std::string& rule) {
  for (const char* p : {"Alloc", "FreeArr", "FreeEr", "Load", "Store"})
    if (rule.rfind(p, 0) == 0) return true;
  return false;
}

CmdKind heap_kind(const std::string& rule) {
  if (rule.rfind("Alloc", 0) == 0) return CmdKind::Alloc;
  if (rule.rfind("Free", 0) == 0) return CmdKind::Free;
  if (rule.rfind("Load", 0) == 0) return CmdKind::Load;
  return CmdKind::Store;
}

RuleCheck check_heap_rule(const std::string& rule, const SideConditions& side, const Triple& c) {
  Check ck;
  SymbolicHeap psi;
  if (!ck.need(single_heap(c.pre, psi), "precondition must be a single quantifier-free symbolic heap")) return ck.done();
  if (!ck.need(c.prog.kind() == heap_kind(rule), "command does not match " + rule)) return ck.done();
  TermSet t = heap_term_set(psi);
  auto tc = command_term_set(c.prog);
  t.insert(tc.begin(), tc.end());
  if (!ck.need(is_canonical(psi, t), "precondition is not in canonical form for termS u termC")) return ck.done();

  if (rule == "AllocEr") {
    ck.need(c.exit == Exit::Er && c.post.is_false(), "AllocEr concludes [er: false]");
    return ck.done();
  }
  Fresh fresh;
  fresh.reserve(free_vars(c.post));
  const bool er_rule = rule.size() > 2 && rule.compare(rule.size() - 2, 2, "Er") == 0;
  auto concl = heap_rule_conclusions(psi, c.prog, er_rule ? Exit::Er : Exit::Ok, fresh);
  std::vector<RuleConclusion> mine;
  for (auto& rc : concl) {
    if (rc.rule != rule) continue;
    if (side.alpha >= 0 && rc.alpha != side.alpha) continue;
    if (side.beta >= 0 && rc.beta != side.beta) continue;
    if (side.j >= 0 && rc.j != side.j) continue;
    if (side.k >= 0 && rule.rfind("Alloc", 0) == 0 && rc.k != side.k) continue;
    mine.push_back(rc);
  }
  if (!ck.need(!mine.empty(), "premises of " + rule + " do not hold for this precondition")) return ck.done();

  Exit own = er_rule ? Exit::Er : Exit::Ok;
  if (c.exit != own) {
    ck.need(c.post.is_false(), rule + " concludes [" + to_string(c.exit) + ": false]");
    return ck.done();
  }
  if (rule.rfind("Alloc", 0) == 0) {
    // one instance per choice of alpha, beta, j, k
    bool any = std::any_of(mine.begin(), mine.end(), [&](const RuleConclusion& rc) {
      return same(c.post, Assertion::of(rc.vars, rc.body));
    });
    ck.need(any, "postcondition is not an instance of " + rule);
    return ck.done();
  }
  Assertion expect;
  for (auto& rc : mine) expect.disjuncts.push_back({rc.vars, rc.body});
  ck.need(same(c.post, expect), "postcondition differs from " + rule + ": expected " + to_string(expect));
  return ck.done();
}

std::string canonical_rule(const std::string& name) {
  for (auto& r : kRules)
    if (squash(r) == squash(name)) return r;
  return {};
}

}  // namespace

const std::vector<std::string>& rule_names() { return kRules; }

RuleCheck check_rule_instance(const std::string& name, const std::vector<Triple>& prem, const SideConditions& side,
                              const Triple& c) {
  Check ck;
  const std::string rule = canonical_rule(name);
  if (rule.empty()) throw std::invalid_argument("unknown rule '" + name + "'");
  auto arity = [&](std::size_t n) { return ck.need(prem.size() == n, rule + " takes " + std::to_string(n) + " premise(s)"); };
  const bool ok = c.exit == Exit::Ok;

  if (is_heap_rule(rule)) {
    if (!arity(0)) return ck.done();
    return check_heap_rule(rule, side, c);
  }

  if (rule == "Skip" || rule == "Error" || rule == "Loop-zero") {
    if (!arity(0)) return ck.done();
    CmdKind k = rule == "Error" ? CmdKind::Error : rule == "Skip" ? CmdKind::Skip : CmdKind::Star;
    ck.need(c.prog.kind() == k, "command does not match " + rule);
    bool passes = (rule == "Error") ? !ok : ok;
    if (passes) ck.need(same(c.post, c.pre), "postcondition must equal the precondition");
    else ck.need(c.post.is_false(), "postcondition must be false");
    return ck.done();
  }

  if (rule == "Assign" || rule == "Havoc" || rule == "Assume") {
    if (!arity(0)) return ck.done();
    CmdKind k = rule == "Assign" ? CmdKind::Assign : rule == "Havoc" ? CmdKind::Havoc : CmdKind::Assume;
    SymbolicHeap psi;
    if (!ck.need(c.prog.kind() == k, "command does not match " + rule)) return ck.done();
    if (!ck.need(single_heap(c.pre, psi), "precondition must be a single quantifier-free symbolic heap"))
      return ck.done();
    if (!ok) {
      ck.need(c.post.is_false(), rule + " concludes [er: false]");
      return ck.done();
    }
    Assertion expect;
    if (k == CmdKind::Assume) {
      expect = Assertion::of(psi * c.prog.cond());
    } else {
      Fresh fresh;
      fresh.reserve(free_vars(psi));
      fresh.reserve(all_vars(c.prog));
      auto x1 = fresh();
      Term th = Term::var(x1);
      SymbolicHeap body = substitute(psi, c.prog.var(), th);
      if (k == CmdKind::Assign) body = body * eq(Term::var(c.prog.var()), substitute(c.prog.term(), c.prog.var(), th));
      expect = Assertion::of({x1}, body);
    }
    ck.need(same(c.post, expect), "postcondition differs from " + rule + ": expected " + to_string(expect));
    return ck.done();
  }

  if (rule == "Seq1") {
    if (!arity(1)) return ck.done();
    auto& p = prem[0];
    ck.need(c.prog.kind() == CmdKind::Seq && c.prog.first() == p.prog, "conclusion must run the premise first");
    ck.need(p.exit == Exit::Er && c.exit == Exit::Er, "Seq1 is for er only");
    ck.need(same(p.pre, c.pre) && same(p.post, c.post), "pre/post must carry over");
    return ck.done();
  }
  if (rule == "Seq2") {
    if (!arity(2)) return ck.done();
    auto &p1 = prem[0], &p2 = prem[1];
    ck.need(c.prog.kind() == CmdKind::Seq && c.prog.first() == p1.prog && c.prog.second() == p2.prog,
            "conclusion must be the sequence of the premises' commands");
    ck.need(p1.exit == Exit::Ok, "first premise must be ok");
    ck.need(same(p1.post, p2.pre), "midcondition mismatch");
    ck.need(p2.exit == c.exit, "exit mismatch");
    ck.need(same(p1.pre, c.pre) && same(p2.post, c.post), "pre/post must carry over");
    return ck.done();
  }
  if (rule == "Loop-non-zero") {
    if (!arity(1)) return ck.done();
    auto& p = prem[0];
    ck.need(c.prog.kind() == CmdKind::Star, "conclusion must be a loop");
    if (c.prog.kind() == CmdKind::Star)
      ck.need(p.prog == Command::seq(c.prog, c.prog.first()), "premise must run C*; C");
    ck.need(p.exit == c.exit && same(p.pre, c.pre) && same(p.post, c.post), "pre/post/exit must carry over");
    return ck.done();
  }
  if (rule == "Cons") {
    if (!arity(1)) return ck.done();
    auto& p = prem[0];
    ck.need(p.prog == c.prog && p.exit == c.exit, "command/exit must carry over");
    Universe u = Universe::over({free_vars(p.pre), free_vars(p.post), free_vars(c.pre), free_vars(c.post),
                                 free_vars(c.prog)},
                                side.vmax);
    auto e1 = entails_assertion(p.pre, c.pre, u);
    auto e2 = entails_assertion(c.post, p.post, u);
    ck.need(e1.status != EntailStatus::No, "premise precondition does not entail the conclusion's");
    ck.need(e2.status != EntailStatus::No, "conclusion postcondition does not entail the premise's");
    return ck.done();
  }
  if (rule == "Disj") {
    if (!ck.need(!prem.empty(), "Disj needs premises")) return ck.done();
    Assertion pre, post;
    for (auto& p : prem) {
      ck.need(p.prog == c.prog && p.exit == c.exit, "command/exit must agree");
      pre.append(p.pre);
      post.append(p.post);
    }
    ck.need(same(pre, c.pre) && same(post, c.post), "conclusion must be the disjunction of the premises");
    return ck.done();
  }
  if (rule == "Choice") {
    if (!arity(2)) return ck.done();
    auto &p1 = prem[0], &p2 = prem[1];
    ck.need(c.prog.kind() == CmdKind::Choice && c.prog.first() == p1.prog && c.prog.second() == p2.prog,
            "conclusion must choose between the premises' commands");
    ck.need(p1.exit == c.exit && p2.exit == c.exit, "exit mismatch");
    ck.need(same(p1.pre, c.pre) && same(p2.pre, c.pre) && same(p1.post, c.post) && same(p2.post, c.post),
            "pre/post must agree");
    return ck.done();
  }
  if (rule == "Exist") {
    if (!arity(1)) return ck.done();
    auto& p = prem[0];
    std::string x = side.var;
    if (x.empty() && !c.pre.disjuncts.empty() && !c.pre.disjuncts[0].vars.empty()) x = c.pre.disjuncts[0].vars[0];
    if (!ck.need(!x.empty(), "Exist needs the quantified variable")) return ck.done();
    std::set<std::string> cvars;
    for (auto& t : command_term_set(c.prog)) {
      auto v = free_vars(t);
      cvars.insert(v.begin(), v.end());
    }
    ck.need(!cvars.count(x), x + " occurs in termC of the command");
    ck.need(p.prog == c.prog && p.exit == c.exit, "command/exit must carry over");
    ck.need(same(prefixed(x, p.pre), c.pre) && same(prefixed(x, p.post), c.post), "conclusion must quantify " + x);
    return ck.done();
  }
  if (rule == "Local") {
    if (!arity(1)) return ck.done();
    auto& p = prem[0];
    if (!ck.need(c.prog.kind() == CmdKind::Local, "conclusion must be a local block")) return ck.done();
    const std::string& x = c.prog.var();
    ck.need(p.prog == c.prog.first() && p.exit == c.exit, "premise must run the block body");
    ck.need(!free_vars(p.pre).count(x), x + " occurs in the precondition");
    ck.need(same(p.pre, c.pre) && same(prefixed(x, p.post), c.post), "conclusion must quantify " + x);
    return ck.done();
  }
  if (rule == "Frame-Ok") {
    if (!arity(1)) return ck.done();
    auto& p = prem[0];
    if (!ck.need(side.frame.has_value(), "Frame-Ok needs the frame")) return ck.done();
    if (!ck.need(ok && p.exit == Exit::Ok, "there is no frame rule for er")) return ck.done();
    const SymbolicHeap& f = *side.frame;
    auto fv = free_vars(f);
    for (auto& m : modified_vars(c.prog)) ck.need(!fv.count(m), "frame mentions modified variable " + m);
    ck.need(p.prog == c.prog, "command must carry over");
    Assertion pre = p.pre, post = p.post;
    for (auto& d : pre.disjuncts) {
      for (auto& v : d.vars) ck.need(!fv.count(v), "frame would capture bound " + v);
      d.body = d.body * f;
    }
    for (auto& d : post.disjuncts) {
      for (auto& v : d.vars) ck.need(!fv.count(v), "frame would capture bound " + v);
      d.body = d.body * f;
    }
    ck.need(same(pre, c.pre) && same(post, c.post), "conclusion must add the frame to both sides");
    return ck.done();
  }
  throw std::logic_error("rule without a checker: " + rule);
}

// ---------------------------------------------------------------------------
// bugs and diffs

namespace {

void atomic_commands(const Command& c, std::vector<Command>& out) {
  switch (c.kind()) {
    case CmdKind::Seq:
    case CmdKind::Choice:
      atomic_commands(c.first(), out);
      atomic_commands(c.second(), out);
      break;
    case CmdKind::Local:
    case CmdKind::LocalInit:
    case CmdKind::Star:
      atomic_commands(c.first(), out);
      break;
    case CmdKind::Free:
    case CmdKind::Load:
    case CmdKind::Store:
    case CmdKind::Error:
      out.push_back(c);
      break;
    default:
      break;
  }
}

// The command whose error guard the disjunct entails.
std::string fault_source(const SymbolicHeap& h, const std::vector<Command>& atoms) {
  bool has_error = false;
  for (auto& c : atoms) {
    if (c.kind() == CmdKind::Error) {
      has_error = true;
      continue;
    }
    Term t = c.term(), bt = Term::base(t);
    std::vector<PureAtom> guard{eq(bt, Term::null())};
    if (c.kind() == CmdKind::Free) guard.push_back(neq(bt, t));
    if (entails_pure(h.pure, guard) == Answer::Yes) return to_string(c);
  }
  return has_error ? "error()" : "";
}

std::vector<ConcreteState> samples(const StateSet& s, std::size_t n) {
  auto all = s.states();
  std::vector<ConcreteState> out;
  while (out.size() < n && !all.empty()) {
    auto m = minimal_state(all);
    out.push_back(m);
    all.erase(std::find(all.begin(), all.end(), m));
  }
  return out;
}

}  // namespace

// witnesses are minimal among the first few models found, not over the whole universe
constexpr std::size_t kWitnessPool = 256;

BugReport find_bugs(const Assertion& p, const Command& c, const Universe& u, const WpoBudget& budget) {
  BugReport r;
  Assertion w = wpo(p, c, Exit::Er, budget);
  r.truncated = w.truncated;
  std::vector<Command> atoms;
  atomic_commands(c, atoms);
  for (auto& d : w.disjuncts) {
    Assertion one{{d}};
    StateSet m = some_models(one, u, kWitnessPool, true);
    if (m.empty()) continue;
    r.er_disjuncts.push_back(d);
    r.witness_states.push_back(minimal_state(m.states()));
    r.source_command.push_back(fault_source(d.body, atoms));
  }
  return r;
}

DiffReport expressiveness_diff(const Assertion& p, const Command& c, Exit e, const Universe& u,
                               const WpoBudget& budget) {
  DiffReport d;
  Assertion w = wpo(p, c, e, budget);
  StateSet mw = models(w, u, true);
  StateSet ms = wpo_semantic(p, c, e, u);
  d.wpo = w;
  d.wpo_disjuncts = w.disjuncts.size();
  d.wpo_models = mw.size();
  d.semantic_models = ms.size();
  StateSet a = mw.minus(ms), b = ms.minus(mw);
  d.only_wpo_count = a.size();
  d.only_semantic_count = b.size();
  d.only_wpo = samples(a, 3);
  d.only_semantic = samples(b, 3);
  d.truncated = w.truncated || !ms.complete;
  if (!a.empty() || !b.empty()) d.status = Status::Invalid;
  else d.status = d.truncated ? Status::BoundedValid : Status::Valid;
  return d;
}

// ---------------------------------------------------------------------------
// json

namespace {

nlohmann::json states_json(const std::vector<ConcreteState>& v) {
  auto j = nlohmann::json::array();
  for (auto& s : v) j.push_back(to_json(s));
  return j;
}

}  // namespace

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["kind"] = "verdict";
  j["status"] = to_string(v.status);
  j["witness"] = v.witness ? to_json(*v.witness) : nlohmann::json(nullptr);
  j["truncated"] = v.truncated;
  j["notes"] = v.notes;
  return j;
}

nlohmann::json to_json(const BugReport& r) {
  nlohmann::json j;
  j["kind"] = "bug_report";
  j["status"] = r.empty() ? (r.truncated ? "NoBugsWithinBound" : "NoBugs") : "BugsFound";
  j["truncated"] = r.truncated;
  auto ds = nlohmann::json::array();
  for (std::size_t i = 0; i < r.er_disjuncts.size(); ++i) {
    nlohmann::json d;
    d["formula"] = to_string(r.er_disjuncts[i]);
    d["witness"] = to_json(r.witness_states[i]);
    d["source_command"] = r.source_command[i].empty() ? nlohmann::json(nullptr) : nlohmann::json(r.source_command[i]);
    ds.push_back(d);
  }
  j["er_disjuncts"] = ds;
  return j;
}

nlohmann::json to_json(const DiffReport& d) {
  nlohmann::json j;
  j["kind"] = "diff_report";
  j["status"] = to_string(d.status);
  j["truncated"] = d.truncated;
  j["wpo_disjuncts"] = d.wpo_disjuncts;
  j["wpo_models"] = d.wpo_models;
  j["semantic_models"] = d.semantic_models;
  j["only_wpo_count"] = d.only_wpo_count;
  j["only_semantic_count"] = d.only_semantic_count;
  j["only_wpo"] = states_json(d.only_wpo);
  j["only_semantic"] = states_json(d.only_semantic);
  j["witness"] = !d.only_wpo.empty()        ? to_json(d.only_wpo[0])
                 : !d.only_semantic.empty() ? to_json(d.only_semantic[0])
                                            : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const Assertion& a) {
  nlohmann::json j;
  j["kind"] = "assertion";
  j["status"] = a.is_false() ? "False" : "Ok";
  j["truncated"] = a.truncated;
  j["bound"] = a.bound;
  auto ds = nlohmann::json::array();
  for (auto& d : a.disjuncts) ds.push_back(to_string(d));
  j["disjuncts"] = ds;
  j["text"] = to_string(a);
  return j;
}

}  // namespace islarr
