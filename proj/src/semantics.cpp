#include "islarr/semantics.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "state_codec.hpp"

namespace islarr {

// ---------------------------------------------------------------- states

Value ConcreteState::base(Value l) const {
  for (auto& [lo, hi] : blocks)
    if (lo <= l && l < hi) return lo;
  return 0;
}

Value ConcreteState::end(Value l) const {
  for (auto& [lo, hi] : blocks)
    if (lo <= l && l < hi) return hi;
  return 0;
}

Value ConcreteState::lookup(const std::string& x) const {
  auto it = store.find(x);
  return it == store.end() ? 0 : it->second;
}

bool ConcreteState::well_formed(std::string* why) const {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    auto [lo, hi] = blocks[i];
    if (lo < 1 || hi <= lo) return fail("bad block [" + std::to_string(lo) + "," + std::to_string(hi) + ")");
    if (i > 0 && blocks[i - 1].second > lo) return fail("overlapping or unsorted blocks");
  }
  for (auto& [l, v] : heap) {
    bool in = base(l) != 0;
    if (v && !in) return fail("allocated cell " + std::to_string(l) + " outside every block");
    if (!v && in) return fail("deallocated cell " + std::to_string(l) + " inside a block");
  }
  return true;
}

bool ConcreteState::exact() const {
  if (!well_formed()) return false;
  for (auto& [lo, hi] : blocks)
    for (Value l = lo; l < hi; ++l) {
      auto it = heap.find(l);
      if (it == heap.end() || !it->second) return false;
    }
  return true;
}

std::string to_string(const ConcreteState& s) {
  std::ostringstream os;
  os << "s={";
  bool first = true;
  for (auto& [x, v] : s.store) {
    os << (first ? "" : ", ") << x << ":" << v;
    first = false;
  }
  os << "} h={";
  first = true;
  for (auto& [l, v] : s.heap) {
    os << (first ? "" : ", ") << l << ":" << (v ? std::to_string(*v) : "bot");
    first = false;
  }
  os << "} B={";
  first = true;
  for (auto& [lo, hi] : s.blocks) {
    os << (first ? "" : ", ") << "[" << lo << "," << hi << ")";
    first = false;
  }
  os << "}";
  return os.str();
}

nlohmann::json to_json(const ConcreteState& s) {
  nlohmann::json j;
  j["store"] = nlohmann::json::object();
  for (auto& [x, v] : s.store) j["store"][x] = v;
  j["heap"] = nlohmann::json::object();
  for (auto& [l, v] : s.heap) {
    if (v) j["heap"][std::to_string(l)] = *v;
    else j["heap"][std::to_string(l)] = "bot";
  }
  j["blocks"] = nlohmann::json::array();
  for (auto& [lo, hi] : s.blocks) j["blocks"].push_back({lo, hi});
  return j;
}

ConcreteState state_from_json(const nlohmann::json& j) {
  ConcreteState s;
  try {
    for (auto& [x, v] : j.at("store").items()) s.store[x] = v.get<Value>();
    for (auto& [l, v] : j.at("heap").items()) {
      Value loc = std::stoll(l);
      if (v.is_string()) {
        if (v.get<std::string>() != "bot") throw SemanticError("heap cell " + l + ": expected a number or \"bot\"");
        s.heap[loc] = std::nullopt;
      } else {
        s.heap[loc] = v.get<Value>();
      }
    }
    for (auto& b : j.at("blocks")) s.blocks.emplace_back(b.at(0).get<Value>(), b.at(1).get<Value>());
  } catch (const nlohmann::json::exception& e) {
    throw SemanticError(std::string("bad state json: ") + e.what());
  }
  std::sort(s.blocks.begin(), s.blocks.end());
  std::string why;
  if (!s.well_formed(&why)) throw SemanticError("ill-formed state: " + why);
  return s;
}

void Universe::validate() const {
  if (vmax < 1) throw SemanticError("vmax must be at least 1");
  if (vmax > 120) throw SemanticError("vmax too large for enumeration");
  if (heap_cap > vmax) throw SemanticError("heap_cap must not exceed vmax");
  if (loop_bound < 0) throw SemanticError("loop_bound must be non-negative");
  std::set<std::string> seen(vars.begin(), vars.end());
  if (seen.size() != vars.size()) throw SemanticError("duplicate universe variable");
}

Universe Universe::over(const std::vector<std::set<std::string>>& var_sets, Value vmax, int heap_cap,
                        int loop_bound) {
  std::set<std::string> all;
  for (auto& s : var_sets) all.insert(s.begin(), s.end());
  Universe u;
  u.vars.assign(all.begin(), all.end());
  u.vmax = vmax;
  u.heap_cap = heap_cap;
  u.loop_bound = loop_bound;
  u.validate();
  return u;
}

Value interp_term(const Term& t, const ConcreteState& s) {
  switch (t.kind()) {
    case TermKind::Null:
      return 0;
    case TermKind::Nat:
      return t.nat_value();
    case TermKind::Var:
      return s.lookup(t.name());
    case TermKind::Add:
      return interp_term(t.lhs(), s) + interp_term(t.rhs(), s);
    case TermKind::Base:
      return s.base(interp_term(t.arg(), s));
    case TermKind::End:
      return s.end(interp_term(t.arg(), s));
  }
  return 0;
}

const char* to_string(Truth t) {
  switch (t) {
    case Truth::True:
      return "true";
    case Truth::False:
      return "false";
    case Truth::Unknown:
      return "unknown";
  }
  return "?";
}

namespace {

bool holds(PureOp op, Value a, Value b) {
  switch (op) {
    case PureOp::Eq:
      return a == b;
    case PureOp::Neq:
      return a != b;
    case PureOp::Le:
      return a <= b;
    case PureOp::Lt:
      return a < b;
  }
  return false;
}

}  // namespace

bool satisfies(const ConcreteState& s, const PureFormula& p) {
  for (auto& a : p)
    if (!holds(a.op, interp_term(a.lhs, s), interp_term(a.rhs, s))) return false;
  return true;
}

bool satisfies(const ConcreteState& s, const SymbolicHeap& h) {
  if (!satisfies(s, h.pure)) return false;
  std::set<Value> used;
  Value budget = static_cast<Value>(s.heap.size());
  for (auto& a : h.spatial) {
    switch (a.kind) {
      case SpatialKind::Emp:
        break;
      case SpatialKind::PointsTo: {
        Value l = interp_term(a.a, s);
        auto it = s.heap.find(l);
        if (it == s.heap.end() || !it->second || *it->second != interp_term(a.b, s)) return false;
        if (!used.insert(l).second) return false;
        break;
      }
      case SpatialKind::Arr:
      case SpatialKind::NegArr: {
        Value lo = interp_term(a.a, s), hi = interp_term(a.b, s);
        if (lo >= hi || hi - lo > budget) return false;
        for (Value l = lo; l < hi; ++l) {
          auto it = s.heap.find(l);
          if (it == s.heap.end()) return false;
          if (it->second.has_value() != (a.kind == SpatialKind::Arr)) return false;
          if (!used.insert(l).second) return false;
        }
        break;
      }
    }
  }
  return used.size() == s.heap.size();
}

Truth satisfies(const ConcreteState& s, const Assertion& a, const Universe& u) {
  for (auto& d : a.disjuncts) {
    ConcreteState ext = s;
    std::vector<Value> w(d.vars.size(), 0);
    bool found = false;
    while (true) {
      for (std::size_t i = 0; i < w.size(); ++i) ext.store[d.vars[i]] = w[i];
      if (satisfies(ext, d.body)) {
        found = true;
        break;
      }
      std::size_t i = 0;
      while (i < w.size() && w[i] == u.vmax) w[i++] = 0;
      if (i == w.size()) break;
      ++w[i];
    }
    if (found) return Truth::True;
  }
  return a.truncated ? Truth::Unknown : Truth::False;
}

// ---------------------------------------------------------------- packed sets

StateSet::StateSet(const Universe& u) : u_(u) {}

std::string StateSet::encode(const ConcreteState& s) const {
  if (!in_universe(s)) throw SemanticError("state outside the universe: " + to_string(s));
  return codec::Codec(u_).encode(s);
}

bool StateSet::in_universe(const ConcreteState& s) const { return codec::Codec(u_).fits(s); }

ConcreteState StateSet::decode(const std::string& key) const { return codec::Codec(u_).decode(key); }

void StateSet::insert(const ConcreteState& s) { keys_.insert(encode(s)); }

bool StateSet::contains(const ConcreteState& s) const {
  codec::Codec c(u_);
  return c.fits(s) && keys_.count(c.encode(s)) > 0;
}

std::vector<ConcreteState> StateSet::states() const {
  std::vector<ConcreteState> out;
  out.reserve(keys_.size());
  codec::Codec c(u_);
  for (auto& k : keys_) out.push_back(c.decode(k));
  return out;
}

void StateSet::merge(const StateSet& other) {
  keys_.insert(other.keys_.begin(), other.keys_.end());
  complete = complete && other.complete;
}

StateSet StateSet::minus(const StateSet& other) const {
  StateSet out(u_);
  std::set_difference(keys_.begin(), keys_.end(), other.keys_.begin(), other.keys_.end(),
                      std::inserter(out.keys_, out.keys_.end()));
  out.complete = complete && other.complete;
  return out;
}

ConcreteState minimal_state(const std::vector<ConcreteState>& states) {
  if (states.empty()) throw SemanticError("minimal_state of an empty list");
  auto weight = [](const ConcreteState& s) {
    Value sum = 0;
    for (auto& [x, v] : s.store) sum += v;
    for (auto& [l, v] : s.heap) sum += l + (v ? *v : 0);
    for (auto& [lo, hi] : s.blocks) sum += lo + hi;
    return std::make_pair(s.heap.size(), sum);
  };
  return *std::min_element(states.begin(), states.end(), [&](const ConcreteState& a, const ConcreteState& b) {
    auto wa = weight(a), wb = weight(b);
    return wa != wb ? wa < wb : a < b;
  });
}

// ---------------------------------------------------------------- enumeration

namespace {

using codec::kAbsent;
using codec::kBot;

// All mark vectors (index 1..vmax-1) describing a block set.
const std::vector<std::vector<std::uint8_t>>& all_block_sets(Value vmax) {
  static std::map<Value, std::vector<std::vector<std::uint8_t>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(vmax);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<std::uint8_t>> out;
  std::vector<std::uint8_t> marks(static_cast<std::size_t>(vmax), 0);
  std::function<void(Value)> rec = [&](Value c) {
    if (c >= vmax) {
      out.push_back(marks);
      return;
    }
    for (std::uint8_t m = 0; m < 3; ++m) {
      if (m == 2 && (c == 1 || marks[c - 1] == 0)) continue;
      marks[c] = m;
      rec(c + 1);
    }
    marks[c] = 0;
  };
  rec(1);
  return cache.emplace(vmax, std::move(out)).first->second;
}

}  // namespace

StateSet all_states(const Universe& u, bool exact_only) {
  u.validate();
  StateSet out(u);
  codec::Codec c(u);
  const Value nc = u.vmax - 1;
  std::vector<Value> store(u.vars.size(), 0);
  std::vector<std::int32_t> cells(static_cast<std::size_t>(u.vmax), kAbsent);
  for (auto& marks : all_block_sets(u.vmax)) {
    // per cell options: inside a block it is allocated (or absent if not exact); outside absent or bot
    std::vector<Value> free_cells;
    std::function<void(Value, int)> rec = [&](Value l, int dom) {
      if (dom > u.cap()) return;
      if (l > nc) {
        // store and values
        std::function<void(std::size_t)> vals = [&](std::size_t i) {
          if (i == free_cells.size()) {
            std::function<void(std::size_t)> st = [&](std::size_t k) {
              if (k == store.size()) {
                out.insert_key(c.encode_raw(store.data(), cells.data(), marks.data()));
                return;
              }
              for (Value v = 0; v <= u.vmax; ++v) {
                store[k] = v;
                st(k + 1);
              }
            };
            st(0);
            return;
          }
          for (Value v = 0; v <= u.vmax; ++v) {
            cells[free_cells[i]] = static_cast<std::int32_t>(v);
            vals(i + 1);
          }
        };
        vals(0);
        return;
      }
      if (marks[l] != 0) {
        free_cells.push_back(l);
        rec(l + 1, dom + 1);
        free_cells.pop_back();
        if (!exact_only) {
          cells[l] = kAbsent;
          rec(l + 1, dom);
        }
      } else {
        cells[l] = kAbsent;
        rec(l + 1, dom);
        cells[l] = kBot;
        rec(l + 1, dom + 1);
      }
      cells[l] = kAbsent;
    };
    rec(1, 0);
  }
  return out;
}

// ---------------------------------------------------------------- model generation

namespace {

struct CNode {
  TermKind op;
  Value k = 0;
  int slot = -1;
  int l = -1, r = -1;
};

// A term compiled against a slot layout.
struct CTerm {
  std::vector<CNode> nodes;
  bool block = false;
  int max_slot = -1;
};

struct BlockMap {
  std::vector<Value> base, end;  // indexed by location 0..vmax-1
  Value b(Value l) const { return l >= 0 && l < static_cast<Value>(base.size()) ? base[l] : 0; }
  Value e(Value l) const { return l >= 0 && l < static_cast<Value>(end.size()) ? end[l] : 0; }
};

BlockMap block_map(const std::uint8_t* marks, Value vmax) {
  BlockMap m;
  m.base.assign(static_cast<std::size_t>(vmax), 0);
  m.end.assign(static_cast<std::size_t>(vmax), 0);
  Value l = 1;
  while (l < vmax) {
    if (marks[l] == 1) {
      Value hi = l + 1;
      while (hi < vmax && marks[hi] == 2) ++hi;
      for (Value c = l; c < hi; ++c) {
        m.base[c] = l;
        m.end[c] = hi;
      }
      l = hi;
    } else {
      ++l;
    }
  }
  return m;
}

class SlotMap {
 public:
  int slot(const std::string& x) const {
    auto it = idx_.find(x);
    if (it == idx_.end()) throw SemanticError("variable " + x + " is not in the universe");
    return it->second;
  }
  int add(const std::string& x) {
    int i = static_cast<int>(names_.size());
    idx_[x] = i;
    names_.push_back(x);
    return i;
  }
  bool has(const std::string& x) const { return idx_.count(x) > 0; }
  std::size_t size() const { return names_.size(); }

 private:
  std::map<std::string, int> idx_;
  std::vector<std::string> names_;
};

int compile_into(const Term& t, const SlotMap& slots, CTerm& out) {
  CNode n{t.kind()};
  switch (t.kind()) {
    case TermKind::Null:
      break;
    case TermKind::Nat:
      n.k = t.nat_value();
      break;
    case TermKind::Var:
      n.slot = slots.slot(t.name());
      out.max_slot = std::max(out.max_slot, n.slot);
      break;
    case TermKind::Add:
      n.l = compile_into(t.lhs(), slots, out);
      n.r = compile_into(t.rhs(), slots, out);
      break;
    case TermKind::Base:
    case TermKind::End:
      n.l = compile_into(t.arg(), slots, out);
      out.block = true;
      break;
  }
  out.nodes.push_back(n);
  return static_cast<int>(out.nodes.size()) - 1;
}

CTerm compile(const Term& t, const SlotMap& slots) {
  CTerm c;
  compile_into(t, slots, c);
  return c;
}

Value eval_node(const CTerm& t, int i, const Value* s, const BlockMap* bm) {
  const CNode& n = t.nodes[i];
  switch (n.op) {
    case TermKind::Null:
      return 0;
    case TermKind::Nat:
      return n.k;
    case TermKind::Var:
      return s[n.slot];
    case TermKind::Add:
      return eval_node(t, n.l, s, bm) + eval_node(t, n.r, s, bm);
    case TermKind::Base:
      return bm->b(eval_node(t, n.l, s, bm));
    case TermKind::End:
      return bm->e(eval_node(t, n.l, s, bm));
  }
  return 0;
}

Value eval(const CTerm& t, const Value* s, const BlockMap* bm = nullptr) {
  return eval_node(t, static_cast<int>(t.nodes.size()) - 1, s, bm);
}

struct CPure {
  PureOp op;
  CTerm l, r;
  bool block() const { return l.block || r.block; }
  int level() const { return std::max(l.max_slot, r.max_slot); }
  bool check(const Value* s, const BlockMap* bm = nullptr) const { return holds(op, eval(l, s, bm), eval(r, s, bm)); }
};

struct CSpatial {
  SpatialKind kind;
  CTerm a, b;
  bool block() const { return a.block || b.block; }
};

constexpr std::int32_t kFree = -3;  // allocated cell whose value is unconstrained

class ModelGen {
 public:
  ModelGen(const Disjunct& d, const Universe& u, bool exact, StateSet& out, std::size_t limit = SIZE_MAX)
      : u_(u), exact_(exact), out_(out), codec_(u), limit_(limit) {
    nslots_ = u.vars.size() + d.vars.size();
    // a bound name shadowing a universe variable gets its own slot
    SlotMap m;
    std::set<std::string> bound(d.vars.begin(), d.vars.end());
    for (std::size_t i = 0; i < u.vars.size(); ++i) {
      if (bound.count(u.vars[i])) m.add("\x01shadowed" + std::to_string(i));
      else m.add(u.vars[i]);
    }
    for (auto& x : d.vars) m.add(x);
    for (auto& fv : free_vars(d.body))
      if (!m.has(fv)) throw SemanticError("variable " + fv + " is not in the universe");
    for (auto& p : d.body.pure) {
      CPure c{p.op, compile(p.lhs, m), compile(p.rhs, m)};
      if (c.block()) block_pure_.push_back(std::move(c));
      else plain_pure_.push_back(std::move(c));
    }
    for (auto& s : d.body.spatial) {
      if (s.kind == SpatialKind::Emp) continue;
      CSpatial c{s.kind, compile(s.a, m), compile(s.b, m)};
      any_block_spatial_ = any_block_spatial_ || c.block();
      spatial_.push_back(std::move(c));
    }
    by_level_.assign(nslots_ + 1, {});
    for (auto& p : plain_pure_) by_level_[static_cast<std::size_t>(p.level() + 1)].push_back(&p);
  }

  void run() {
    store_.assign(nslots_, 0);
    for (auto* p : by_level_[0])
      if (!p->check(store_.data())) return;
    assign(0);
  }

 private:
  void assign(std::size_t i) {
    if (i == nslots_) {
      with_store();
      return;
    }
    for (Value v = 0; v <= u_.vmax && !full(); ++v) {
      store_[i] = v;
      bool ok = true;
      for (auto* p : by_level_[i + 1])
        if (!p->check(store_.data())) {
          ok = false;
          break;
        }
      if (ok) assign(i + 1);
    }
  }

  // Fills cells_ from the spatial atoms; false on overlap or out-of-range cells.
  bool footprint(const BlockMap* bm, int& dom) {
    const Value nc = u_.vmax - 1;
    std::fill(cells_.begin(), cells_.end(), kAbsent);
    dom = 0;
    for (auto& s : spatial_) {
      Value a = eval(s.a, store_.data(), bm), b = eval(s.b, store_.data(), bm);
      if (s.kind == SpatialKind::PointsTo) {
        if (a < 1 || a > nc || b > u_.vmax || cells_[a] != kAbsent) return false;
        cells_[a] = static_cast<std::int32_t>(b);
        ++dom;
      } else {
        if (a >= b || a < 1 || b - 1 > nc) return false;
        for (Value l = a; l < b; ++l) {
          if (cells_[l] != kAbsent) return false;
          cells_[l] = s.kind == SpatialKind::Arr ? kFree : kBot;
          ++dom;
        }
      }
      if (dom > u_.cap()) return false;
    }
    return true;
  }

  void with_store() {
    const Value vmax = u_.vmax;
    cells_.assign(static_cast<std::size_t>(vmax), kAbsent);
    int dom = 0;
    if (!any_block_spatial_) {
      if (!footprint(nullptr, dom)) return;
      // blocks: cut each run of covered cells into consecutive intervals
      std::vector<std::uint8_t> covered(static_cast<std::size_t>(vmax), 0);
      for (Value l = 1; l < vmax; ++l) covered[l] = cells_[l] >= 0 || cells_[l] == kFree;
      if (exact_) {
        blocks_over(covered);
      } else {
        std::vector<Value> absent;
        for (Value l = 1; l < vmax; ++l)
          if (cells_[l] == kAbsent) absent.push_back(l);
        for (std::size_t mask = 0; mask < (std::size_t{1} << absent.size()); ++mask) {
          auto cov = covered;
          for (std::size_t i = 0; i < absent.size(); ++i)
            if (mask >> i & 1) cov[absent[i]] = 1;
          blocks_over(cov);
        }
      }
      return;
    }
    for (auto& marks : all_block_sets(vmax)) {
      if (full()) return;
      BlockMap bm = block_map(marks.data(), vmax);
      if (!footprint(&bm, dom)) continue;
      bool ok = true;
      for (Value l = 1; l < vmax && ok; ++l) {
        bool plus = cells_[l] >= 0 || cells_[l] == kFree;
        bool in = marks[l] != 0;
        if (plus && !in) ok = false;
        if (cells_[l] == kBot && in) ok = false;
        if (exact_ && in && !plus) ok = false;
      }
      if (ok) with_blocks(marks, bm);
    }
  }

  void blocks_over(const std::vector<std::uint8_t>& covered) {
    const Value vmax = u_.vmax;
    std::vector<Value> inner;  // covered cells whose left neighbour is covered: may start a block or not
    std::vector<std::uint8_t> marks(static_cast<std::size_t>(vmax), 0);
    for (Value l = 1; l < vmax; ++l) {
      if (!covered[l]) continue;
      if (l > 1 && covered[l - 1]) {
        inner.push_back(l);
        marks[l] = 2;
      } else {
        marks[l] = 1;
      }
    }
    for (std::size_t mask = 0; mask < (std::size_t{1} << inner.size()) && !full(); ++mask) {
      for (std::size_t i = 0; i < inner.size(); ++i) marks[inner[i]] = (mask >> i & 1) ? 1 : 2;
      with_blocks(marks, block_map(marks.data(), vmax));
    }
  }

  void with_blocks(const std::vector<std::uint8_t>& marks, const BlockMap& bm) {
    for (auto& p : block_pure_)
      if (!p.check(store_.data(), &bm)) return;
    std::vector<Value> free_cells;
    for (Value l = 1; l < u_.vmax; ++l)
      if (cells_[l] == kFree) free_cells.push_back(l);
    auto cells = cells_;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == free_cells.size()) {
        out_.insert_key(codec_.encode_raw(store_.data(), cells.data(), marks.data()));
        return;
      }
      for (Value v = 0; v <= u_.vmax && !full(); ++v) {
        cells[free_cells[i]] = static_cast<std::int32_t>(v);
        rec(i + 1);
      }
    };
    rec(0);
  }

  bool full() const { return out_.size() >= limit_; }

  const Universe& u_;
  bool exact_;
  StateSet& out_;
  codec::Codec codec_;
  std::size_t limit_;
  std::size_t nslots_ = 0;
  std::vector<CPure> plain_pure_, block_pure_;
  std::vector<std::vector<const CPure*>> by_level_;
  std::vector<CSpatial> spatial_;
  bool any_block_spatial_ = false;
  std::vector<Value> store_;
  std::vector<std::int32_t> cells_;
};

}  // namespace

StateSet models(const Assertion& a, const Universe& u, bool exact_only) {
  u.validate();
  StateSet out(u);
  for (auto& d : a.disjuncts) ModelGen(d, u, exact_only, out).run();
  out.complete = !a.truncated;
  return out;
}

StateSet some_models(const Assertion& a, const Universe& u, std::size_t limit, bool exact_only) {
  u.validate();
  StateSet out(u);
  for (auto& d : a.disjuncts) {
    if (out.size() >= limit) break;
    ModelGen(d, u, exact_only, out, limit).run();
  }
  out.complete = !a.truncated && out.size() < limit;
  return out;
}

StateSet models(const SymbolicHeap& h, const Universe& u, bool exact_only) {
  return models(Assertion::of(h), u, exact_only);
}

// ---------------------------------------------------------------- execution

namespace {

// store slots, then cells 1..vmax-1 (index 0 unused), then marks
using Exec = std::vector<std::int32_t>;
using ExecSet = std::set<Exec>;

struct CCmd {
  CmdKind kind;
  int x = -1;
  CTerm t, t2;
  std::vector<CPure> cond;
  std::vector<CCmd> kids;
};

class Runner {
 public:
  Runner(const Command& c, const Universe& u) : u_(u), codec_(u) {
    for (auto& x : u.vars) slots_.add(x);
    for (auto& fv : free_vars(c))
      if (!slots_.has(fv)) throw SemanticError("program variable " + fv + " is not in the universe");
    Fresh fresh;
    fresh.reserve(all_vars(c));
    fresh.reserve(std::set<std::string>(u.vars.begin(), u.vars.end()));
    Command plain = desugar(c, fresh);
    for (auto& x : all_vars(plain))
      if (!slots_.has(x)) slots_.add(x);
    ns_ = slots_.size();
    cmd_ = build(plain);
  }

  Exec from_key(const std::string& key) const {
    Exec s(ns_ + 2 * static_cast<std::size_t>(u_.vmax), 0);
    std::vector<Value> store(u_.vars.size());
    std::vector<std::int32_t> cells(static_cast<std::size_t>(u_.vmax));
    std::vector<std::uint8_t> marks(static_cast<std::size_t>(u_.vmax));
    codec_.decode_raw(key, store.data(), cells.data(), marks.data());
    for (std::size_t i = 0; i < store.size(); ++i) s[i] = static_cast<std::int32_t>(store[i]);
    for (Value l = 1; l < u_.vmax; ++l) {
      cell(s, l) = cells[l];
      mark(s, l) = marks[l];
    }
    return s;
  }

  // Projects to the universe; false when a cell value left Val or dom exceeds the cap.
  bool to_key(const Exec& s, std::string& key) const {
    std::vector<Value> store(u_.vars.size());
    std::vector<std::int32_t> cells(static_cast<std::size_t>(u_.vmax), kAbsent);
    std::vector<std::uint8_t> marks(static_cast<std::size_t>(u_.vmax), 0);
    for (std::size_t i = 0; i < store.size(); ++i) store[i] = s[i];
    int dom = 0;
    for (Value l = 1; l < u_.vmax; ++l) {
      cells[l] = cell(s, l);
      marks[l] = static_cast<std::uint8_t>(mark(s, l));
      if (cells[l] > u_.vmax) return false;
      if (cells[l] != kAbsent) ++dom;
    }
    if (dom > u_.cap()) return false;
    key = codec_.encode_raw(store.data(), cells.data(), marks.data());
    return true;
  }

  void run(const Exec& s, ExecSet& ok, ExecSet& er) { exec(cmd_, s, ok, er); }
  bool truncated() const { return truncated_; }

 private:
  std::int32_t& cell(Exec& s, Value l) const { return s[ns_ + static_cast<std::size_t>(l)]; }
  std::int32_t cell(const Exec& s, Value l) const { return s[ns_ + static_cast<std::size_t>(l)]; }
  std::int32_t& mark(Exec& s, Value l) const { return s[ns_ + static_cast<std::size_t>(u_.vmax + l)]; }
  std::int32_t mark(const Exec& s, Value l) const { return s[ns_ + static_cast<std::size_t>(u_.vmax + l)]; }

  CCmd build(const Command& c) {
    CCmd out;
    out.kind = c.kind();
    switch (c.kind()) {
      case CmdKind::Assign:
      case CmdKind::Alloc:
      case CmdKind::Load:
        out.x = slots_.slot(c.var());
        out.t = compile(c.term(), slots_);
        break;
      case CmdKind::Havoc:
      case CmdKind::Local:
        out.x = slots_.slot(c.var());
        break;
      case CmdKind::Free:
        out.t = compile(c.term(), slots_);
        break;
      case CmdKind::Store:
        out.t = compile(c.term(), slots_);
        out.t2 = compile(c.term2(), slots_);
        break;
      case CmdKind::Assume:
        for (auto& p : c.cond()) out.cond.push_back({p.op, compile(p.lhs, slots_), compile(p.rhs, slots_)});
        break;
      case CmdKind::LocalInit:
        throw SemanticError("internal: local initializer not desugared");
      default:
        break;
    }
    switch (c.kind()) {
      case CmdKind::Local:
      case CmdKind::Star:
        out.kids.push_back(build(c.first()));
        break;
      case CmdKind::Seq:
      case CmdKind::Choice:
        out.kids.push_back(build(c.first()));
        out.kids.push_back(build(c.second()));
        break;
      default:
        break;
    }
    return out;
  }

  Value value(const CTerm& t, const Exec& s) const {
    std::vector<Value> st(ns_);
    for (std::size_t i = 0; i < ns_; ++i) st[i] = s[i];
    return eval(t, st.data());
  }

  Value base_of(const Exec& s, Value l) const {
    if (l < 1 || l >= u_.vmax || mark(s, l) == 0) return 0;
    while (mark(s, l) == 2) --l;
    return l;
  }

  Value end_of(const Exec& s, Value l) const {
    ++l;
    while (l < u_.vmax && mark(s, l) == 2) ++l;
    return l;
  }

  int dom_size(const Exec& s) const {
    int n = 0;
    for (Value l = 1; l < u_.vmax; ++l) n += cell(s, l) != kAbsent;
    return n;
  }

  void exec(const CCmd& c, const Exec& s, ExecSet& ok, ExecSet& er) {
    switch (c.kind) {
      case CmdKind::Skip:
        ok.insert(s);
        return;
      case CmdKind::Error:
        er.insert(s);
        return;
      case CmdKind::Assign: {
        Value v = value(c.t, s);
        if (v > u_.vmax) return;  // store values stay in Val
        Exec n = s;
        n[c.x] = static_cast<std::int32_t>(v);
        ok.insert(std::move(n));
        return;
      }
      case CmdKind::Havoc:
        for (Value v = 0; v <= u_.vmax; ++v) {
          Exec n = s;
          n[c.x] = static_cast<std::int32_t>(v);
          ok.insert(std::move(n));
        }
        return;
      case CmdKind::Assume: {
        std::vector<Value> st(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(ns_));
        for (auto& p : c.cond)
          if (!p.check(st.data())) return;
        ok.insert(s);
        return;
      }
      case CmdKind::Local: {
        std::int32_t outer = s[c.x];
        ExecSet iok, ier;
        for (Value v = 0; v <= u_.vmax; ++v) {
          Exec n = s;
          n[c.x] = static_cast<std::int32_t>(v);
          exec(c.kids[0], n, iok, ier);
        }
        for (auto n : iok) {
          n[c.x] = outer;
          ok.insert(std::move(n));
        }
        for (auto n : ier) {
          n[c.x] = outer;
          er.insert(std::move(n));
        }
        return;
      }
      case CmdKind::Seq: {
        ExecSet mid;
        exec(c.kids[0], s, mid, er);
        for (auto& m : mid) exec(c.kids[1], m, ok, er);
        return;
      }
      case CmdKind::Choice:
        exec(c.kids[0], s, ok, er);
        exec(c.kids[1], s, ok, er);
        return;
      case CmdKind::Star: {
        ExecSet seen{s}, frontier{s};
        ok.insert(s);
        for (int i = 0; i <= u_.loop_bound && !frontier.empty(); ++i) {
          ExecSet next, ier;
          for (auto& f : frontier) exec(c.kids[0], f, next, ier);
          er.insert(ier.begin(), ier.end());
          if (i == u_.loop_bound) {
            for (auto& n : next)
              if (!seen.count(n)) truncated_ = true;
            break;
          }
          frontier.clear();
          for (auto& n : next)
            if (seen.insert(n).second) {
              frontier.insert(n);
              ok.insert(n);
            }
        }
        return;
      }
      case CmdKind::Alloc: {
        Value n = value(c.t, s);
        if (n <= 0) return;
        int dom = dom_size(s);
        for (Value l = 1; l + n <= u_.vmax; ++l) {
          bool fresh = true;
          int added = 0;
          for (Value k = l; k < l + n; ++k) {
            if (mark(s, k) != 0) fresh = false;
            added += cell(s, k) == kAbsent;
          }
          if (!fresh || dom + added > u_.cap()) continue;
          Exec base = s;
          base[c.x] = static_cast<std::int32_t>(l);
          for (Value k = l; k < l + n; ++k) mark(base, k) = k == l ? 1 : 2;
          std::function<void(Value)> fill = [&](Value k) {
            if (k == l + n) {
              ok.insert(base);
              return;
            }
            for (Value v = 0; v <= u_.vmax; ++v) {
              cell(base, k) = static_cast<std::int32_t>(v);
              fill(k + 1);
            }
          };
          fill(l);
        }
        return;
      }
      case CmdKind::Free: {
        Value l = value(c.t, s);
        Value b = base_of(s, l);
        if (b == 0 || b != l) {
          er.insert(s);
          return;
        }
        Exec n = s;
        Value e = end_of(s, b);
        for (Value k = b; k < e; ++k) {
          cell(n, k) = kBot;
          mark(n, k) = 0;
        }
        ok.insert(std::move(n));
        return;
      }
      case CmdKind::Load: {
        Value l = value(c.t, s);
        if (base_of(s, l) == 0) {
          er.insert(s);
          return;
        }
        std::int32_t v = cell(s, l);
        if (v < 0 || v > u_.vmax) return;
        Exec n = s;
        n[c.x] = v;
        ok.insert(std::move(n));
        return;
      }
      case CmdKind::Store: {
        Value l = value(c.t, s);
        if (base_of(s, l) == 0) {
          er.insert(s);
          return;
        }
        Value v = value(c.t2, s);
        Exec n = s;
        cell(n, l) = static_cast<std::int32_t>(std::min<Value>(v, 1 << 30));
        ok.insert(std::move(n));
        return;
      }
      case CmdKind::LocalInit:
        return;
    }
  }

  const Universe& u_;
  codec::Codec codec_;
  SlotMap slots_;
  std::size_t ns_ = 0;
  CCmd cmd_;
  bool truncated_ = false;
};

}  // namespace

StateSet denote(const Command& c, Exit e, const ConcreteState& s, const Universe& u) {
  u.validate();
  if (!s.exact()) throw SemanticError("denote needs an exact state: " + to_string(s));
  StateSet out(u);
  std::string key = out.encode(s);
  Runner r(c, u);
  ExecSet ok, er;
  r.run(r.from_key(key), ok, er);
  for (auto& x : e == Exit::Ok ? ok : er) {
    std::string k;
    if (r.to_key(x, k)) out.insert_key(std::move(k));
  }
  out.complete = !r.truncated();
  return out;
}

StateSet wpo_semantic(const Assertion& p, const Command& c, Exit e, const Universe& u) {
  StateSet pre = models(p, u, true);
  StateSet out(u);
  Runner r(c, u);
  for (auto& key : pre.keys()) {
    ExecSet ok, er;
    r.run(r.from_key(key), ok, er);
    for (auto& x : e == Exit::Ok ? ok : er) {
      std::string k;
      if (r.to_key(x, k)) out.insert_key(std::move(k));
    }
  }
  out.complete = pre.complete && !r.truncated();
  return out;
}

}  // namespace islarr
