#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "islarr/checker.hpp"

using namespace islarr;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string pre = "emp", post, prog = "skip", exit = "ok";
  Value vmax = 4;
  int heap_cap = -1;
  int loop_bound = 2;
  int case_cap = 7;
  std::string method = "semantic";
  std::string format = "text";
  std::uint64_t seed = 42;
  int count = 200;
  int jobs = 0;
  std::string corpus;  // oracle-diff: "hand", "random" or empty for a single triple
  std::string config;
  // check-rule
  std::string rule, instance, frame, var;
  std::vector<std::string> premises;
  int alpha = -1, beta = -1, j = -1, k = -1;
};

// Exit codes besides the verdict ones.
constexpr int kUsage = 2;

std::string slurp_or_text(const std::string& s) {
  std::error_code ec;
  if (!s.empty() && s.find('\n') == std::string::npos && std::filesystem::is_regular_file(s, ec)) {
    std::ifstream in(s);
    std::stringstream b;
    b << in.rdbuf();
    return b.str();
  }
  return s;
}

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Assertion assertion_arg(const std::string& flag, const std::string& v) {
  try {
    return parse_assertion(slurp_or_text(v));
  } catch (const SyntaxError& e) {
    throw InputError("parse error in " + flag + " at " + e.what());
  }
}

Command command_arg(const std::string& v) {
  try {
    return parse_command(slurp_or_text(v));
  } catch (const SyntaxError& e) {
    throw InputError(std::string("parse error in --prog at ") + e.what());
  }
}

Exit exit_arg(const std::string& v) {
  try {
    return parse_exit(v);
  } catch (const std::exception&) {
    throw InputError("--exit must be ok or er, got '" + v + "'");
  }
}

WpoBudget budget_of(const RunConfig& c) {
  WpoBudget b;
  b.loop_bound = c.loop_bound;
  b.case_cap = c.case_cap;
  return b;
}

void validate(const RunConfig& c) {
  if (c.vmax < 2) throw InputError("--vmax must be at least 2");
  if (c.loop_bound < 0) throw InputError("--loop-bound must be non-negative");
  if (c.case_cap < 1) throw InputError("--case-cap must be positive");
  if (c.count < 0) throw InputError("--count must be non-negative");
}

// Values from --config fill in whatever the command line left unset.
void apply_config(CLI::App& sub, RunConfig& c) {
  if (c.config.empty()) return;
  std::ifstream in(c.config);
  if (!in) throw InputError("cannot read config " + c.config);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("config " + c.config + ": " + e.what());
  }
  auto set = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    auto* o = sub.get_option_no_throw(std::string("--") + key);
    if (o && o->count() > 0) return;
    try {
      field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    } catch (const json::exception& e) {
      throw InputError(std::string("config key ") + key + ": " + e.what());
    }
  };
  set("pre", c.pre);
  set("post", c.post);
  set("prog", c.prog);
  set("exit", c.exit);
  set("vmax", c.vmax);
  set("heap-cap", c.heap_cap);
  set("loop-bound", c.loop_bound);
  set("case-cap", c.case_cap);
  set("method", c.method);
  set("format", c.format);
  set("seed", c.seed);
  set("count", c.count);
  set("jobs", c.jobs);
  set("corpus", c.corpus);
  set("rule", c.rule);
  set("frame", c.frame);
  set("var", c.var);
}

void print(const RunConfig& c, const json& j, const std::string& text) {
  if (c.format == "json") std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

std::string state_line(const ConcreteState& s) { return to_string(s); }

// ---------------------------------------------------------------- subcommands

int cmd_wpo(const RunConfig& c) {
  auto p = assertion_arg("--pre", c.pre);
  auto prog = command_arg(c.prog);
  auto e = exit_arg(c.exit);
  auto w = wpo(p, prog, e, budget_of(c));
  std::string text = to_string(w) + "\n";
  if (w.truncated) text += "(truncated at loop bound " + std::to_string(w.bound) + ")\n";
  print(c, to_json(w), text);
  return 0;
}

std::string verdict_text(const Verdict& v) {
  std::string t = to_string(v.status);
  t += "\n";
  if (v.witness) t += "witness: " + state_line(*v.witness) + "\n";
  for (auto& n : v.notes) t += "note: " + n + "\n";
  return t;
}

int cmd_check(const RunConfig& c) {
  if (c.post.empty()) throw InputError("check needs --post");
  Triple tr{assertion_arg("--pre", c.pre), command_arg(c.prog), exit_arg(c.exit), assertion_arg("--post", c.post)};
  Universe u = universe_for(tr, c.vmax, c.heap_cap, c.loop_bound);
  Verdict v;
  if (c.method == "semantic") {
    v = check_triple_semantic(tr, u);
  } else if (c.method == "logical") {
    v = check_triple_logical(tr, u, budget_of(c));
  } else {
    auto s = check_triple_semantic(tr, u);
    auto l = check_triple_logical(tr, u, budget_of(c));
    v = s;
    v.truncated = s.truncated || l.truncated;
    for (auto& n : l.notes) v.notes.push_back(n);
    if (s.status != l.status) {
      // a bounded logical answer on a cut loop is not a disagreement
      bool bounded = l.truncated && l.status == Status::BoundedValid &&
                     (s.status == Status::Valid || s.status == Status::BoundedValid);
      if (!bounded) {
        v.status = Status::Unknown;
        v.notes.push_back(std::string("tool bug: semantic says ") + to_string(s.status) + ", logical says " +
                          to_string(l.status));
        spdlog::error("semantic and logical checks disagree on {}", to_string(tr));
      } else {
        v.status = Status::BoundedValid;
      }
    }
    if (!v.witness) v.witness = l.witness;
  }
  print(c, to_json(v), verdict_text(v));
  return exit_code(v.status);
}

int cmd_find_bugs(const RunConfig& c) {
  auto p = assertion_arg("--pre", c.pre);
  auto prog = command_arg(c.prog);
  Universe u = Universe::over({free_vars(p), free_vars(prog)}, c.vmax, c.heap_cap, c.loop_bound);
  auto r = find_bugs(p, prog, u, budget_of(c));
  std::string text;
  if (r.empty()) text = r.truncated ? "no bugs within the loop bound\n" : "no bugs\n";
  for (std::size_t i = 0; i < r.er_disjuncts.size(); ++i) {
    text += "bug " + std::to_string(i + 1);
    if (!r.source_command[i].empty()) text += " at " + r.source_command[i];
    text += "\n  " + to_string(r.er_disjuncts[i]) + "\n  witness: " + state_line(r.witness_states[i]) + "\n";
  }
  print(c, to_json(r), text);
  return r.empty() ? 0 : 1;
}

std::string diff_text(const DiffReport& d) {
  std::ostringstream o;
  o << to_string(d.status) << ": wpo " << d.wpo_disjuncts << " disjuncts / " << d.wpo_models << " models, semantic "
    << d.semantic_models << " models\n";
  for (auto& s : d.only_wpo) o << "  only in wpo: " << to_string(s) << "\n";
  for (auto& s : d.only_semantic) o << "  only in semantics: " << to_string(s) << "\n";
  return o.str();
}

int cmd_oracle_diff(const RunConfig& c) {
  if (c.corpus.empty()) {
    auto p = assertion_arg("--pre", c.pre);
    auto prog = command_arg(c.prog);
    Universe u = Universe::over({free_vars(p), free_vars(prog)}, c.vmax, c.heap_cap, c.loop_bound);
    auto d = expressiveness_diff(p, prog, exit_arg(c.exit), u, budget_of(c));
    print(c, to_json(d), diff_text(d));
    return exit_code(d.status);
  }
  std::vector<CorpusEntry> entries;
  if (c.corpus == "hand") entries = hand_corpus();
  else if (c.corpus == "random") entries = random_corpus(c.seed, c.count);
  else throw InputError("--corpus must be hand or random");

  std::vector<json> results(entries.size());
  std::vector<Status> status(entries.size(), Status::Unknown);
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      auto& e = entries[i];
      json j;
      try {
        Universe u = Universe::over({free_vars(e.pre), free_vars(e.prog)}, e.vmax, c.heap_cap, c.loop_bound);
        auto d = expressiveness_diff(e.pre, e.prog, e.exit, u, budget_of(c));
        j = to_json(d);
        status[i] = d.status;
      } catch (const std::exception& ex) {
        j = {{"kind", "diff_report"}, {"status", "Unknown"}, {"truncated", false}, {"witness", nullptr},
             {"error", ex.what()}};
      }
      j["name"] = e.name;
      j["pre"] = to_string(e.pre);
      j["prog"] = to_string(e.prog);
      j["exit"] = to_string(e.exit);
      j["vmax"] = e.vmax;
      results[i] = std::move(j);
      std::lock_guard<std::mutex> lock(log_mu);
      spdlog::info("{} {}", e.name, to_string(status[i]));
    }
  };
  unsigned n = c.jobs > 0 ? static_cast<unsigned>(c.jobs) : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::size_t pass = 0, bounded = 0, fail = 0, unknown = 0;
  for (auto s : status) {
    if (s == Status::Valid) ++pass;
    else if (s == Status::BoundedValid) ++bounded;
    else if (s == Status::Invalid) ++fail;
    else ++unknown;
  }
  Status overall = fail ? Status::Invalid : unknown ? Status::Unknown : bounded ? Status::BoundedValid : Status::Valid;
  json j{{"kind", "corpus_summary"}, {"status", to_string(overall)}, {"truncated", bounded > 0},
         {"corpus", c.corpus},       {"count", entries.size()},          {"valid", pass},
         {"bounded_valid", bounded}, {"invalid", fail},                  {"unknown", unknown},
         {"entries", results}};
  std::ostringstream t;
  for (auto& r : results)
    if (r["status"] != "Valid") t << r["name"].get<std::string>() << ": " << r["status"].get<std::string>() << "\n";
  t << entries.size() << " entries: " << pass << " valid, " << bounded << " bounded, " << fail << " invalid, "
    << unknown << " unknown\n";
  print(c, j, t.str());
  return exit_code(overall);
}

Triple triple_from_json(const json& j) {
  auto get = [&](const char* k) {
    if (!j.contains(k)) throw InputError(std::string("triple is missing '") + k + "'");
    return j.at(k).get<std::string>();
  };
  return Triple{assertion_arg("pre", get("pre")), command_arg(get("prog")), exit_arg(get("exit")),
                assertion_arg("post", get("post"))};
}

int cmd_check_rule(const RunConfig& c) {
  std::string rule = c.rule;
  std::vector<Triple> premises;
  SideConditions side;
  side.vmax = c.vmax;
  side.alpha = c.alpha;
  side.beta = c.beta;
  side.j = c.j;
  side.k = c.k;
  side.var = c.var;
  if (!c.frame.empty()) {
    try {
      side.frame = parse_heap(c.frame);
    } catch (const SyntaxError& e) {
      throw InputError(std::string("parse error in --frame at ") + e.what());
    }
  }
  Triple concl;
  if (!c.instance.empty()) {
    std::ifstream in(c.instance);
    if (!in) throw InputError("cannot read " + c.instance);
    json j = json::parse(in);
    if (rule.empty()) rule = j.value("rule", "");
    for (auto& p : j.value("premises", json::array())) premises.push_back(triple_from_json(p));
    concl = triple_from_json(j.at("conclusion"));
    if (j.contains("side")) {
      auto& s = j["side"];
      if (s.contains("frame")) side.frame = parse_heap(s["frame"].get<std::string>());
      side.var = s.value("var", side.var);
      side.alpha = s.value("alpha", side.alpha);
      side.beta = s.value("beta", side.beta);
      side.j = s.value("j", side.j);
      side.k = s.value("k", side.k);
    }
  } else {
    if (c.post.empty()) throw InputError("check-rule needs --post or --instance");
    concl = Triple{assertion_arg("--pre", c.pre), command_arg(c.prog), exit_arg(c.exit), assertion_arg("--post", c.post)};
    for (auto& p : c.premises) {
      json pj;
      try {
        pj = json::parse(slurp_or_text(p));
      } catch (const json::exception& e) {
        throw InputError(std::string("--premise must be a JSON object: ") + e.what());
      }
      premises.push_back(triple_from_json(pj));
    }
  }
  if (rule.empty()) throw InputError("check-rule needs --rule");
  RuleCheck r;
  try {
    r = check_rule_instance(rule, premises, side, concl);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  Status s = r.accepted ? Status::Valid : Status::Invalid;
  json j{{"kind", "rule_check"},   {"status", to_string(s)},       {"rule", rule},
         {"accepted", r.accepted}, {"diagnostics", r.diagnostics}, {"truncated", false}};
  std::string text = std::string(r.accepted ? "accepted" : "rejected") + "\n";
  for (auto& d : r.diagnostics) text += "  " + d + "\n";
  print(c, j, text);
  return exit_code(s);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("islarr");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* lv = std::getenv("ISLARR_LOG")) spdlog::set_level(spdlog::level::from_str(lv));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"islarr: incorrectness separation logic with arrays"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* s, bool post) {
    s->add_option("--pre", cfg.pre, "precondition (text or file)");
    if (post) s->add_option("--post", cfg.post, "postcondition (text or file)");
    s->add_option("--prog", cfg.prog, "program (text or file)");
    s->add_option("--exit", cfg.exit, "exit condition")->check(CLI::IsMember({"ok", "er"}));
    s->add_option("--vmax", cfg.vmax, "largest value of the universe");
    s->add_option("--heap-cap", cfg.heap_cap, "max heap cells per state (-1: vmax-1)");
    s->add_option("--loop-bound", cfg.loop_bound, "star unrolling depth");
    s->add_option("--case-cap", cfg.case_cap, "max |T| for canonicalization");
    s->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
    s->add_option("--config", cfg.config, "JSON file with default option values");
  };

  auto* w = app.add_subcommand("wpo", "print wpo(P, C, eps)");
  common(w, false);
  auto* ch = app.add_subcommand("check", "check validity of [P] C [eps: Q]");
  common(ch, true);
  ch->add_option("--method", cfg.method, "checking method")->check(CLI::IsMember({"semantic", "logical", "both"}));
  auto* fb = app.add_subcommand("find-bugs", "report er-reachable states");
  common(fb, false);
  auto* od = app.add_subcommand("oracle-diff", "compare wpo with the semantic oracle");
  common(od, false);
  od->add_option("--corpus", cfg.corpus, "run a corpus instead of one triple")->check(CLI::IsMember({"hand", "random"}));
  od->add_option("--seed", cfg.seed, "random corpus seed");
  od->add_option("--count", cfg.count, "random corpus size");
  od->add_option("--jobs", cfg.jobs, "worker threads (0: logical cores)");
  auto* cr = app.add_subcommand("check-rule", "check one proof rule instance");
  common(cr, true);
  cr->add_option("--rule", cfg.rule, "rule name");
  cr->add_option("--premise", cfg.premises, "premise triple as JSON {pre, prog, exit, post}");
  cr->add_option("--instance", cfg.instance, "JSON file with rule, premises, side and conclusion");
  cr->add_option("--frame", cfg.frame, "frame for Frame-Ok");
  cr->add_option("--var", cfg.var, "quantified variable for Exist");
  cr->add_option("--alpha", cfg.alpha);
  cr->add_option("--beta", cfg.beta);
  cr->add_option("--j", cfg.j);
  cr->add_option("--k", cfg.k);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    apply_config(*sub, cfg);
    validate(cfg);
    if (sub == w) return cmd_wpo(cfg);
    if (sub == ch) return cmd_check(cfg);
    if (sub == fb) return cmd_find_bugs(cfg);
    if (sub == od) return cmd_oracle_diff(cfg);
    return cmd_check_rule(cfg);
  } catch (const std::exception& e) {
    // parse errors, size limits, bad input
    if (cfg.format == "json")
      std::cout << json{{"kind", "error"}, {"status", "Error"}, {"message", e.what()}}.dump(2) << "\n";
    std::cerr << "islarr: " << e.what() << "\n";
    return kUsage;
  }
}
