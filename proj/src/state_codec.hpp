#pragma once

#include <cstdint>
#include <string>

#include "islarr/semantics.hpp"

namespace islarr::codec {

constexpr std::int32_t kAbsent = -2;
constexpr std::int32_t kBot = -1;

// Byte layout: one byte per universe variable, one per cell 1..vmax-1
// (0 absent, 1 deallocated, 2+v allocated with value v), one block mark per cell
// (0 outside, 1 block start, 2 continuation).
class Codec {
 public:
  explicit Codec(const Universe& u) : u_(u), nv_(u.vars.size()), nc_(static_cast<std::size_t>(u.vmax - 1)) {}

  std::size_t size() const { return nv_ + 2 * nc_; }

  std::string encode_raw(const Value* store, const std::int32_t* cells, const std::uint8_t* marks) const {
    std::string k(size(), '\0');
    for (std::size_t i = 0; i < nv_; ++i) k[i] = static_cast<char>(store[i]);
    for (std::size_t c = 0; c < nc_; ++c) {
      std::int32_t v = cells[c + 1];
      k[nv_ + c] = static_cast<char>(v == kAbsent ? 0 : v == kBot ? 1 : v + 2);
      k[nv_ + nc_ + c] = static_cast<char>(marks[c + 1]);
    }
    return k;
  }

  void decode_raw(const std::string& k, Value* store, std::int32_t* cells, std::uint8_t* marks) const {
    for (std::size_t i = 0; i < nv_; ++i) store[i] = static_cast<unsigned char>(k[i]);
    cells[0] = kAbsent;
    marks[0] = 0;
    for (std::size_t c = 0; c < nc_; ++c) {
      int b = static_cast<unsigned char>(k[nv_ + c]);
      cells[c + 1] = b == 0 ? kAbsent : b == 1 ? kBot : b - 2;
      marks[c + 1] = static_cast<std::uint8_t>(k[nv_ + nc_ + c]);
    }
  }

  bool fits(const ConcreteState& s) const {
    if (s.store.size() != nv_) return false;
    for (auto& x : u_.vars) {
      auto it = s.store.find(x);
      if (it == s.store.end() || it->second < 0 || it->second > u_.vmax) return false;
    }
    if (static_cast<int>(s.heap.size()) > u_.cap()) return false;
    for (auto& [l, v] : s.heap) {
      if (l < 1 || l >= u_.vmax) return false;
      if (v && (*v < 0 || *v > u_.vmax)) return false;
    }
    for (auto& [lo, hi] : s.blocks)
      if (lo < 1 || hi > u_.vmax) return false;
    return s.well_formed();
  }

  std::string encode(const ConcreteState& s) const {
    std::vector<Value> store(nv_);
    for (std::size_t i = 0; i < nv_; ++i) store[i] = s.store.at(u_.vars[i]);
    std::vector<std::int32_t> cells(nc_ + 1, kAbsent);
    std::vector<std::uint8_t> marks(nc_ + 1, 0);
    for (auto& [l, v] : s.heap) cells[static_cast<std::size_t>(l)] = v ? static_cast<std::int32_t>(*v) : kBot;
    for (auto& [lo, hi] : s.blocks)
      for (Value l = lo; l < hi; ++l) marks[static_cast<std::size_t>(l)] = l == lo ? 1 : 2;
    return encode_raw(store.data(), cells.data(), marks.data());
  }

  ConcreteState decode(const std::string& k) const {
    std::vector<Value> store(nv_);
    std::vector<std::int32_t> cells(nc_ + 1);
    std::vector<std::uint8_t> marks(nc_ + 1);
    decode_raw(k, store.data(), cells.data(), marks.data());
    ConcreteState s;
    for (std::size_t i = 0; i < nv_; ++i) s.store[u_.vars[i]] = store[i];
    for (std::size_t c = 1; c <= nc_; ++c) {
      if (cells[c] == kBot) s.heap[static_cast<Value>(c)] = std::nullopt;
      else if (cells[c] != kAbsent) s.heap[static_cast<Value>(c)] = cells[c];
    }
    for (std::size_t c = 1; c <= nc_; ++c) {
      if (marks[c] != 1) continue;
      std::size_t hi = c + 1;
      while (hi <= nc_ && marks[hi] == 2) ++hi;
      s.blocks.emplace_back(static_cast<Value>(c), static_cast<Value>(hi));
    }
    return s;
  }

 private:
  const Universe& u_;
  std::size_t nv_, nc_;
};

}  // namespace islarr::codec
