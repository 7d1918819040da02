#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace apify {

/// Index of a DataItem inside its SourceUnit.
enum class ItemId : std::uint32_t {};
/// Index of a Statement inside its SourceUnit (source pre-order).
enum class StmtId : std::uint32_t {};

constexpr std::size_t index(ItemId id) { return static_cast<std::size_t>(id); }
constexpr std::size_t index(StmtId id) { return static_cast<std::size_t>(id); }

/// Dense bit set over ItemIds. Iteration is in ascending id order, which keeps
/// every derived output deterministic.
class ItemSet {
public:
  ItemSet() = default;
  ItemSet(std::initializer_list<ItemId> ids) {
    for (auto id : ids) insert(id);
  }

  static ItemSet all(std::size_t universe) {
    ItemSet s;
    for (std::size_t i = 0; i < universe; ++i) s.insert(ItemId(i));
    return s;
  }

  void insert(ItemId id) {
    const auto i = index(id);
    if (i / 64 >= words_.size()) words_.resize(i / 64 + 1, 0);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }

  void erase(ItemId id) {
    const auto i = index(id);
    if (i / 64 < words_.size()) words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  bool contains(ItemId id) const {
    const auto i = index(id);
    return i / 64 < words_.size() && ((words_[i / 64] >> (i % 64)) & 1U) != 0;
  }

  bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  ItemSet &operator|=(const ItemSet &other) {
    if (other.words_.size() > words_.size()) words_.resize(other.words_.size(), 0);
    for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  ItemSet &operator-=(const ItemSet &other) {
    const auto n = std::min(words_.size(), other.words_.size());
    for (std::size_t i = 0; i < n; ++i) words_[i] &= ~other.words_[i];
    return *this;
  }

  ItemSet &operator&=(const ItemSet &other) {
    for (std::size_t i = 0; i < words_.size(); ++i)
      words_[i] &= i < other.words_.size() ? other.words_[i] : 0;
    return *this;
  }

  friend ItemSet operator|(ItemSet a, const ItemSet &b) { return a |= b; }
  friend ItemSet operator-(ItemSet a, const ItemSet &b) { return a -= b; }
  friend ItemSet operator&(ItemSet a, const ItemSet &b) { return a &= b; }

  /// True when every member of `other` is in this set.
  bool includes(const ItemSet &other) const {
    for (std::size_t i = 0; i < other.words_.size(); ++i) {
      const auto mine = i < words_.size() ? words_[i] : 0;
      if ((other.words_[i] & ~mine) != 0) return false;
    }
    return true;
  }

  friend bool operator==(const ItemSet &a, const ItemSet &b) {
    const auto n = std::max(a.words_.size(), b.words_.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = i < a.words_.size() ? a.words_[i] : 0;
      const auto y = i < b.words_.size() ? b.words_[i] : 0;
      if (x != y) return false;
    }
    return true;
  }

  std::vector<ItemId> to_vector() const {
    std::vector<ItemId> out;
    for_each([&](ItemId id) { out.push_back(id); });
    return out;
  }

  template <typename F> void for_each(F &&f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits != 0) {
        const auto b = static_cast<std::size_t>(std::countr_zero(bits));
        f(ItemId(w * 64 + b));
        bits &= bits - 1;
      }
    }
  }

private:
  std::vector<std::uint64_t> words_;
};

} // namespace apify
