#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

namespace hbcm {

using node_id = std::uint32_t;

/// A hyperedge in canonical form: distinct node ids, sorted ascending, at
/// least two members.
class Hyperedge {
 public:
  Hyperedge() = default;

  explicit Hyperedge(std::vector<node_id> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
      throw std::invalid_argument("hyperedge has repeated node ids");
    if (members_.size() < 2) throw std::invalid_argument("hyperedge needs at least two nodes");
  }

  Hyperedge(std::initializer_list<node_id> members)
      : Hyperedge(std::vector<node_id>(members)) {}

  /// Wraps ids that are already canonical (sorted, distinct, size >= 2).
  static Hyperedge from_canonical(std::vector<node_id> members) {
    Hyperedge e;
    e.members_ = std::move(members);
    return e;
  }

  std::size_t size() const noexcept { return members_.size(); }
  std::span<const node_id> members() const noexcept { return members_; }
  node_id operator[](std::size_t i) const { return members_[i]; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
  friend auto operator<=>(const Hyperedge&, const Hyperedge&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Hyperedge& e) {
    os << '{';
    for (std::size_t i = 0; i < e.size(); ++i) os << (i ? "," : "") << e[i];
    return os << '}';
  }

 private:
  std::vector<node_id> members_;
};

inline std::size_t hash_members(std::span<const node_id> members) noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (node_id v : members) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

struct HyperedgeHash {
  std::size_t operator()(const Hyperedge& e) const noexcept { return hash_members(e.members()); }
};

}  // namespace hbcm
