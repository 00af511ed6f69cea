#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "hbcm/stats.hpp"

namespace hbcm {

inline constexpr double default_cluster_tol = 1e-9;

/// Opinion clusters of a state, ordered by value.
struct ClusterSet {
  std::vector<double> values;
  std::vector<std::size_t> sizes;
  double tolerance = default_cluster_tol;
  /// cluster index of every node
  std::vector<std::uint32_t> assignment;
  /// max - min of the member opinions, per cluster
  std::vector<double> spread;

  std::size_t count() const noexcept { return values.size(); }
  bool is_consensus() const noexcept { return values.size() == 1; }
  /// True when every member lies within `tolerance` of its cluster value.
  bool is_tight() const noexcept {
    return std::all_of(spread.begin(), spread.end(), [&](double s) { return s <= tolerance; });
  }
};

/// Sorts opinions and splits at gaps larger than `tol`; each cluster's value
/// is the mean of its members.
inline ClusterSet extract_clusters(std::span<const double> x, double tol = default_cluster_tol) {
  ClusterSet cs;
  cs.tolerance = tol;
  cs.assignment.assign(x.size(), 0);
  if (x.empty()) return cs;
  std::vector<std::uint32_t> order(x.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });

  std::size_t start = 0;
  auto close = [&](std::size_t end) {
    KahanSum s;
    for (std::size_t i = start; i < end; ++i) {
      s.add(x[order[i]]);
      cs.assignment[order[i]] = static_cast<std::uint32_t>(cs.values.size());
    }
    cs.values.push_back(s.value() / static_cast<double>(end - start));
    cs.sizes.push_back(end - start);
    cs.spread.push_back(x[order[end - 1]] - x[order[start]]);
    start = end;
  };
  for (std::size_t i = 1; i < order.size(); ++i)
    if (x[order[i]] - x[order[i - 1]] > tol) close(i);
  close(order.size());
  return cs;
}

}  // namespace hbcm
