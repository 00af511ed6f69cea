#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbcm/combinatorics.hpp"
#include "hbcm/hyperedge.hpp"
#include "hbcm/random.hpp"

namespace hbcm {

enum class Representation { explicit_edges, complete, block };

/// Which inter-community hyperedges a block hypergraph contains.
struct MixedRule {
  enum class Kind { none, bounded, unbounded };
  Kind kind = Kind::none;
  std::uint32_t max_size = 0;  // bounded only; >= 2

  static MixedRule none() { return {}; }
  static MixedRule bounded(std::uint32_t m) { return {Kind::bounded, m}; }
  static MixedRule unbounded() { return {Kind::unbounded, 0}; }
};

/// A hypergraph on nodes 0..N-1.
///
/// Three representations share one interface:
///  - explicit: a deduplicated list of canonical hyperedges (CSR storage);
///  - complete: every subset of size >= 2, never materialized;
///  - block: a partition into communities where every community is a
///    hyperclique and inter-community hyperedges follow a MixedRule.
///
/// Values are immutable after construction; sampling only reads state, so a
/// Hypergraph may be shared across threads as long as each thread owns its
/// random stream.
class Hypergraph {
 public:
  static Hypergraph from_edges(std::size_t node_count, std::vector<Hyperedge> edges) {
    Hypergraph h(node_count, Representation::explicit_edges);
    h.offsets_.reserve(edges.size() + 1);
    h.offsets_.push_back(0);
    for (const auto& e : edges) {
      if (e.size() < 2) throw std::invalid_argument("hyperedge needs at least two nodes");
      if (e.size() > node_count) throw std::invalid_argument("hyperedge larger than node count");
      if (e.members().back() >= node_count)
        throw std::invalid_argument("node id " + std::to_string(e.members().back()) +
                                    " out of range [0, " + std::to_string(node_count) + ")");
      h.nodes_.insert(h.nodes_.end(), e.begin(), e.end());
      h.offsets_.push_back(h.nodes_.size());
    }
    h.lex_order_.resize(edges.size());
    std::iota(h.lex_order_.begin(), h.lex_order_.end(), 0u);
    std::sort(h.lex_order_.begin(), h.lex_order_.end(),
              [&](std::uint32_t a, std::uint32_t b) { return h.lex_less(h.edge(a), h.edge(b)); });
    for (std::size_t i = 1; i < h.lex_order_.size(); ++i) {
      auto a = h.edge(h.lex_order_[i - 1]);
      auto b = h.edge(h.lex_order_[i]);
      if (std::equal(a.begin(), a.end(), b.begin(), b.end()))
        throw std::invalid_argument("duplicate hyperedge in edge list");
    }
    h.total_ = edges.size();
    return h;
  }

  static Hypergraph complete(std::size_t node_count) {
    if (node_count < 2) throw std::invalid_argument("complete hypergraph needs N >= 2");
    Hypergraph h(node_count, Representation::complete);
    h.total_ = subsets_of_size_two_or_more(node_count);
    return h;
  }

  /// `community_of[i]` is the 0-based community of node i; every index in
  /// [0, k) must be used.
  static Hypergraph block(std::vector<std::uint32_t> community_of, MixedRule mixed) {
    if (community_of.size() < 2) throw std::invalid_argument("block hypergraph needs N >= 2");
    if (mixed.kind == MixedRule::Kind::bounded && mixed.max_size < 2)
      throw std::invalid_argument("maximum inter-community hyperedge size must be >= 2");
    const std::size_t n = community_of.size();
    std::uint32_t k = *std::max_element(community_of.begin(), community_of.end()) + 1;
    Hypergraph h(n, Representation::block);
    h.members_.assign(k, {});
    for (std::size_t i = 0; i < n; ++i) h.members_[community_of[i]].push_back(static_cast<node_id>(i));
    for (const auto& m : h.members_)
      if (m.empty()) throw std::invalid_argument("every community must be non-empty");
    h.community_ = std::move(community_of);
    h.mixed_ = mixed;
    if (k == 1) h.mixed_ = MixedRule::none();

    for (std::uint32_t c = 0; c < k; ++c) {
      big_count cnt = subsets_of_size_two_or_more(h.members_[c].size());
      if (cnt > 0) h.categories_.push_back({Category::Kind::intra, c, cnt});
    }
    if (h.mixed_.kind == MixedRule::Kind::bounded) {
      std::uint32_t top = std::min<std::uint32_t>(h.mixed_.max_size, static_cast<std::uint32_t>(n));
      for (std::uint32_t s = 2; s <= top; ++s) {
        big_count cnt = binomial(n, s);
        for (const auto& m : h.members_) cnt -= binomial(m.size(), s);
        if (cnt > 0) h.categories_.push_back({Category::Kind::mixed_size, s, cnt});
      }
    } else if (h.mixed_.kind == MixedRule::Kind::unbounded) {
      big_count cnt = subsets_of_size_two_or_more(n);
      for (const auto& m : h.members_) cnt -= subsets_of_size_two_or_more(m.size());
      if (cnt > 0) h.categories_.push_back({Category::Kind::mixed_any, 0, cnt});
    }
    big_count running = 0;
    for (const auto& cat : h.categories_) {
      running += cat.count;
      h.cumulative_.push_back(running);
    }
    h.total_ = running;
    return h;
  }

  std::size_t node_count() const noexcept { return n_; }
  Representation representation() const noexcept { return repr_; }
  bool is_explicit() const noexcept { return repr_ == Representation::explicit_edges; }

  /// |E|, exact.
  const big_count& edge_count() const noexcept { return total_; }

  // -- explicit access ------------------------------------------------------

  std::size_t explicit_edge_count() const noexcept {
    return offsets_.empty() ? 0 : offsets_.size() - 1;
  }
  std::span<const node_id> edge(std::size_t i) const {
    return {nodes_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::vector<Hyperedge> edges() const {
    require_explicit("edges");
    std::vector<Hyperedge> out;
    out.reserve(explicit_edge_count());
    for (std::size_t i = 0; i < explicit_edge_count(); ++i) {
      auto e = edge(i);
      out.push_back(Hyperedge::from_canonical({e.begin(), e.end()}));
    }
    return out;
  }
  /// Sum of hyperedge sizes over the explicit list.
  std::size_t total_incidence() const noexcept { return nodes_.size(); }

  // -- block access ---------------------------------------------------------

  std::size_t community_count() const noexcept {
    return repr_ == Representation::block ? members_.size() : 1;
  }
  std::uint32_t community_of(node_id v) const {
    return repr_ == Representation::block ? community_[v] : 0;
  }
  std::span<const node_id> community_members(std::uint32_t c) const { return members_.at(c); }
  const MixedRule& mixed_rule() const noexcept { return mixed_; }

  // -- queries ----------------------------------------------------------------

  bool contains(std::span<const node_id> e) const {
    if (e.size() < 2 || e.back() >= n_) return false;
    switch (repr_) {
      case Representation::complete:
        return true;
      case Representation::block: {
        if (is_single_community(e)) return true;
        switch (mixed_.kind) {
          case MixedRule::Kind::none: return false;
          case MixedRule::Kind::bounded: return e.size() <= mixed_.max_size;
          case MixedRule::Kind::unbounded: return true;
        }
        return false;
      }
      case Representation::explicit_edges: {
        auto it = std::lower_bound(lex_order_.begin(), lex_order_.end(), e,
                                   [&](std::uint32_t idx, std::span<const node_id> key) {
                                     return lex_less(edge(idx), key);
                                   });
        if (it == lex_order_.end()) return false;
        auto f = edge(*it);
        return std::equal(f.begin(), f.end(), e.begin(), e.end());
      }
    }
    return false;
  }
  bool contains(const Hyperedge& e) const { return contains(e.members()); }

  /// Draws a hyperedge uniformly from E into `out` (canonical order).
  template <typename Rng>
  void sample_into(Rng& rng, std::vector<node_id>& out) const {
    if (total_ == 0) throw std::runtime_error("no hyperedges");
    switch (repr_) {
      case Representation::explicit_edges: {
        auto i = std::uniform_int_distribution<std::size_t>(0, explicit_edge_count() - 1)(rng);
        auto e = edge(i);
        out.assign(e.begin(), e.end());
        return;
      }
      case Representation::complete:
        do {
          bernoulli_half_all(rng, out);
        } while (out.size() < 2);
        return;
      case Representation::block:
        sample_block(rng, out);
        return;
    }
  }

  template <typename Rng>
  Hyperedge sample(Rng& rng) const {
    std::vector<node_id> out;
    sample_into(rng, out);
    return Hyperedge::from_canonical(std::move(out));
  }

 private:
  struct Category {
    enum class Kind { intra, mixed_size, mixed_any };
    Kind kind;
    std::uint32_t index;  // community for intra, size for mixed_size
    big_count count;
  };

  Hypergraph(std::size_t n, Representation r) : n_(n), repr_(r) {}

  static bool lex_less(std::span<const node_id> a, std::span<const node_id> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  void require_explicit(const char* what) const {
    if (!is_explicit())
      throw std::logic_error(std::string(what) + ": requires an explicit hypergraph");
  }

  bool is_single_community(std::span<const node_id> e) const {
    auto c = community_[e[0]];
    return std::all_of(e.begin(), e.end(), [&](node_id v) { return community_[v] == c; });
  }

  template <typename Rng>
  void bernoulli_half_all(Rng& rng, std::vector<node_id>& out) const {
    out.clear();
    for (std::size_t base = 0; base < n_; base += 64) {
      std::uint64_t bits = rng();
      std::size_t lim = std::min<std::size_t>(64, n_ - base);
      for (std::size_t b = 0; b < lim; ++b)
        if ((bits >> b) & 1u) out.push_back(static_cast<node_id>(base + b));
    }
  }

  template <typename Rng>
  static void bernoulli_half_of(Rng& rng, std::span<const node_id> nodes, std::vector<node_id>& out) {
    out.clear();
    for (std::size_t base = 0; base < nodes.size(); base += 64) {
      std::uint64_t bits = rng();
      std::size_t lim = std::min<std::size_t>(64, nodes.size() - base);
      for (std::size_t b = 0; b < lim; ++b)
        if ((bits >> b) & 1u) out.push_back(nodes[base + b]);
    }
  }

  template <typename Rng>
  std::size_t pick_category(Rng& rng) const {
    big_count u = uniform_below(total_, rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

  template <typename Rng>
  void sample_block(Rng& rng, std::vector<node_id>& out) const {
    const auto& cat = categories_.size() == 1 ? categories_[0] : categories_[pick_category(rng)];
    switch (cat.kind) {
      case Category::Kind::intra:
        do {
          bernoulli_half_of(rng, members_[cat.index], out);
        } while (out.size() < 2);
        // members_ lists are ascending, so out is canonical
        return;
      case Category::Kind::mixed_size:
        do {
          floyd_sample_into(static_cast<std::uint32_t>(n_), cat.index, rng, out);
        } while (is_single_community(out));
        return;
      case Category::Kind::mixed_any:
        do {
          bernoulli_half_all(rng, out);
        } while (out.size() < 2 || is_single_community(out));
        return;
    }
  }

  std::size_t n_ = 0;
  Representation repr_ = Representation::explicit_edges;
  big_count total_ = 0;

  std::vector<std::size_t> offsets_;
  std::vector<node_id> nodes_;
  std::vector<std::uint32_t> lex_order_;

  std::vector<std::uint32_t> community_;
  std::vector<std::vector<node_id>> members_;
  MixedRule mixed_;
  std::vector<Category> categories_;
  std::vector<big_count> cumulative_;
};

}  // namespace hbcm
