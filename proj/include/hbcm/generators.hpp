#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "hbcm/combinatorics.hpp"
#include "hbcm/hypergraph.hpp"

namespace hbcm {

/// G(N, m): for every size i, m[i] hyperedges of size i chosen uniformly
/// without replacement (capped at C(N, i)). Entries 0 and 1 are ignored.
struct GnmParams {
  std::uint32_t node_count = 0;
  std::vector<std::uint64_t> counts_by_size;

  std::uint64_t requested(std::uint32_t size) const {
    return size < counts_by_size.size() ? counts_by_size[size] : 0;
  }
};

/// Node -> community assignment with every community non-empty.
class Partition {
 public:
  explicit Partition(std::vector<std::uint32_t> community_of) : community_of_(std::move(community_of)) {
    if (community_of_.empty()) throw std::invalid_argument("partition of zero nodes");
    std::uint32_t k = 0;
    for (auto c : community_of_) k = std::max(k, c + 1);
    sizes_.assign(k, 0);
    for (auto c : community_of_) ++sizes_[c];
    for (std::size_t c = 0; c < k; ++c)
      if (sizes_[c] == 0)
        throw std::invalid_argument("community " + std::to_string(c) + " is empty");
  }

  /// Consecutive blocks: the first sizes[0] nodes form community 0, etc.
  static Partition from_sizes(const std::vector<std::uint32_t>& sizes) {
    std::vector<std::uint32_t> assign;
    for (std::uint32_t c = 0; c < sizes.size(); ++c) assign.insert(assign.end(), sizes[c], c);
    return Partition(std::move(assign));
  }

  std::size_t node_count() const noexcept { return community_of_.size(); }
  std::size_t community_count() const noexcept { return sizes_.size(); }
  std::uint32_t community_of(std::size_t node) const { return community_of_.at(node); }
  const std::vector<std::uint32_t>& assignment() const noexcept { return community_of_; }
  const std::vector<std::uint32_t>& sizes() const noexcept { return sizes_; }

 private:
  std::vector<std::uint32_t> community_of_;
  std::vector<std::uint32_t> sizes_;
};

/// (p,q)-HSBM when max_mixed_size is empty, (p,q,M)-HSBM otherwise.
struct HsbmParams {
  Partition partition;
  double p = 1.0;
  double q = 0.0;
  std::optional<std::uint32_t> max_mixed_size;
};

enum class HsbmMode { explicit_edges, implicit };

inline constexpr std::uint32_t default_enumeration_cap = 20;

inline Hypergraph gen_complete(std::size_t node_count) { return Hypergraph::complete(node_count); }

namespace detail {

template <typename Rng>
void sample_size_class_sparse(std::uint32_t n, std::uint32_t size, std::uint64_t count, Rng& rng,
                              std::vector<Hyperedge>& out) {
  std::unordered_set<Hyperedge, HyperedgeHash> seen;
  seen.reserve(count * 2);
  std::vector<node_id> buf;
  while (seen.size() < count) {
    floyd_sample_into(n, size, rng, buf);
    auto e = Hyperedge::from_canonical(buf);
    if (seen.insert(e).second) out.push_back(std::move(e));
  }
}

template <typename Rng>
void sample_size_class_dense(std::uint32_t n, std::uint32_t size, std::uint64_t total,
                             std::uint64_t count, Rng& rng, std::vector<Hyperedge>& out) {
  for (auto rank : floyd_sample(total, count, rng))
    out.push_back(Hyperedge::from_canonical(unrank_combination(rank, n, size)));
}

}  // namespace detail

template <typename Rng>
Hypergraph gen_gnm(const GnmParams& params, Rng& rng) {
  const std::uint32_t n = params.node_count;
  if (n < 2) throw std::invalid_argument("G(N,m) needs N >= 2");
  std::vector<Hyperedge> edges;
  for (std::uint32_t size = 2; size <= n; ++size) {
    std::uint64_t want = params.requested(size);
    if (want == 0) continue;
    std::uint64_t avail = binomial_u64(n, size);  // 0 means "does not fit in 64 bits"
    if (avail != 0) want = std::min(want, avail);
    // Dense classes are enumerated by rank; sparse ones by rejection.
    if (avail != 0 && want * 4 >= avail)
      detail::sample_size_class_dense(n, size, avail, want, rng, edges);
    else
      detail::sample_size_class_sparse(n, size, want, rng, edges);
  }
  return Hypergraph::from_edges(n, std::move(edges));
}

template <typename Rng>
Hypergraph gen_hsbm(const HsbmParams& params, Rng& rng, HsbmMode mode,
                    std::uint32_t enumeration_cap = default_enumeration_cap) {
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw std::invalid_argument("HSBM: p must lie in [0,1]");
  if (!(params.q >= 0.0 && params.q <= 1.0)) throw std::invalid_argument("HSBM: q must lie in [0,1]");
  if (params.max_mixed_size && *params.max_mixed_size < 2)
    throw std::invalid_argument("HSBM: M must be >= 2");
  const auto& part = params.partition;
  const std::size_t n = part.node_count();
  if (n < 2) throw std::invalid_argument("HSBM needs N >= 2");

  if (mode == HsbmMode::implicit) {
    if (params.p != 1.0)
      throw std::invalid_argument("implicit HSBM requires p = 1 (communities must be hypercliques)");
    if (params.q != 0.0 && params.q != 1.0)
      throw std::invalid_argument("implicit HSBM requires q in {0, 1}");
    MixedRule rule = MixedRule::none();
    if (params.q == 1.0)
      rule = params.max_mixed_size ? MixedRule::bounded(*params.max_mixed_size) : MixedRule::unbounded();
    return Hypergraph::block(part.assignment(), rule);
  }

  if (n > enumeration_cap)
    throw std::invalid_argument("explicit HSBM requires N <= " + std::to_string(enumeration_cap) +
                                " (got " + std::to_string(n) + "); use implicit mode");
  std::bernoulli_distribution keep_intra(params.p), keep_mixed(params.q);
  std::vector<Hyperedge> edges;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    auto size = static_cast<std::uint32_t>(std::popcount(mask));
    if (size < 2) continue;
    std::vector<node_id> members;
    members.reserve(size);
    for (std::uint32_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) members.push_back(i);
    bool intra = true;
    for (auto v : members) intra = intra && part.community_of(v) == part.community_of(members[0]);
    bool include;
    if (intra)
      include = keep_intra(rng);
    else if (params.max_mixed_size && size > *params.max_mixed_size)
      include = false;
    else
      include = keep_mixed(rng);
    if (include) edges.push_back(Hyperedge::from_canonical(std::move(members)));
  }
  return Hypergraph::from_edges(n, std::move(edges));
}

}  // namespace hbcm
