#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hbcm/clusters.hpp"
#include "hbcm/hypergraph.hpp"
#include "hbcm/random.hpp"
#include "hbcm/stats.hpp"

namespace hbcm {

inline constexpr double default_zero_tol = 1e-12;

struct OpinionState {
  std::vector<double> opinions;
  std::uint64_t time = 0;

  std::size_t size() const noexcept { return opinions.size(); }
  double mean() const { return kahan_mean(opinions); }
};

class InitialDistribution {
 public:
  enum class Kind { uniform, normal };

  static InitialDistribution uniform(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("uniform distribution needs a < b");
    return {Kind::uniform, a, b};
  }
  static InitialDistribution normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("normal distribution needs sigma > 0");
    return {Kind::normal, mu, sigma};
  }

  Kind kind() const noexcept { return kind_; }
  /// (a, b) for uniform, (mu, sigma) for normal.
  std::pair<double, double> params() const noexcept { return {p1_, p2_}; }
  double mean() const noexcept { return kind_ == Kind::uniform ? 0.5 * (p1_ + p2_) : p1_; }
  double variance() const noexcept {
    return kind_ == Kind::uniform ? (p2_ - p1_) * (p2_ - p1_) / 12.0 : p2_ * p2_;
  }

  template <typename Rng>
  void fill(std::span<double> out, Rng& rng) const {
    if (kind_ == Kind::uniform) {
      std::uniform_real_distribution<double> d(p1_, p2_);
      for (auto& v : out) v = d(rng);
    } else {
      std::normal_distribution<double> d(p1_, p2_);
      for (auto& v : out) v = d(rng);
    }
  }

  template <typename Rng>
  std::vector<double> draw(std::size_t n, Rng& rng) const {
    std::vector<double> out(n);
    fill(out, rng);
    return out;
  }

 private:
  InitialDistribution(Kind k, double a, double b) : kind_(k), p1_(a), p2_(b) {}
  Kind kind_;
  double p1_, p2_;
};

/// Any enabled criterion stops the run.
struct StopRule {
  /// Check for an absorbing state every K steps; 0 picks K automatically
  /// (|E| for explicit hypergraphs, 1 for implicit ones).
  std::optional<std::uint64_t> absorbing_every;
  /// Stop once d(V, x) < epsilon.
  std::optional<double> discordance_below;
  /// Hard cutoff T_max; reaching it is reported as a cutoff, not convergence.
  std::optional<std::uint64_t> max_steps;

  static StopRule absorbing(std::uint64_t every = 0) { return {every, std::nullopt, std::nullopt}; }
  static StopRule global_discordance(double eps) { return {std::nullopt, eps, std::nullopt}; }
  static StopRule steps(std::uint64_t t_max) { return {std::nullopt, std::nullopt, t_max}; }
  StopRule with_max_steps(std::uint64_t t_max) const {
    StopRule r = *this;
    r.max_steps = t_max;
    return r;
  }

  bool any() const noexcept { return absorbing_every || discordance_below || max_steps; }
};

enum class StopReason { absorbing, discordance_threshold, cutoff };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::absorbing: return "absorbing";
    case StopReason::discordance_threshold: return "converged";
    case StopReason::cutoff: return "cutoff";
  }
  return "?";
}

struct TrajectoryOptions {
  bool record = false;
  /// Fixed snapshot stride; 0 keeps between `target` and 2*`target` evenly
  /// spaced snapshots by doubling the stride as the run grows.
  std::uint64_t stride = 0;
  std::size_t target = 1000;
};

struct SimConfig {
  double c = 1.0;
  double alpha = 1.0;
  InitialDistribution init = InitialDistribution::uniform(0.0, 1.0);
  std::uint64_t seed = 0;
  StopRule stop = StopRule::absorbing();
  bool condition_first_pick_concordant = false;
  /// Unanimity tolerance for the run's absorbing check. Updates write
  /// bit-identical means, so 0 (exact) is sound here and avoids stopping on
  /// nearly merged clusters that would still update.
  double zero_tol = 0.0;
  double cluster_tol = default_cluster_tol;
  std::uint64_t max_conditioning_draws = 100'000'000;
  TrajectoryOptions trajectory;

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("confidence bound c must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!stop.any()) throw std::invalid_argument("stop rule has no criterion");
    if (stop.discordance_below && !(*stop.discordance_below >= 0.0))
      throw std::invalid_argument("discordance threshold must be >= 0");
    if (!(zero_tol >= 0.0) || !(cluster_tol >= 0.0)) throw std::invalid_argument("tolerances must be >= 0");
  }
};

struct StepOutcome {
  Hyperedge selected;
  bool updated = false;
  std::uint32_t jumps = 0;
};

struct UpdateResult {
  bool updated = false;
  std::uint32_t jumps = 0;
  double discordance = 0.0;
};

/// d_alpha(e, x) = (1/(|e|-1))^alpha * sum_{i in e} (x_i - mean_e)^2.
inline double discordance(std::span<const node_id> e, std::span<const double> x, double alpha = 1.0) {
  if (e.size() < 2) throw std::invalid_argument("discordance needs |e| >= 2");
  RunningVariance rv;
  for (auto v : e) rv.push(x[v]);
  double ss = rv.sum_sq();
  if (alpha == 1.0) return ss / static_cast<double>(e.size() - 1);
  if (alpha == 0.0) return ss;
  return std::pow(1.0 / static_cast<double>(e.size() - 1), alpha) * ss;
}

inline double discordance(const Hyperedge& e, std::span<const double> x, double alpha = 1.0) {
  return discordance(e.members(), x, alpha);
}

/// Discordance of the all-nodes hyperedge V.
inline double global_discordance(std::span<const double> x, double alpha = 1.0) {
  if (x.size() < 2) throw std::invalid_argument("global discordance needs N >= 2");
  RunningVariance rv;
  for (double v : x) rv.push(v);
  double ss = rv.sum_sq();
  if (alpha == 1.0) return ss / static_cast<double>(x.size() - 1);
  return std::pow(1.0 / static_cast<double>(x.size() - 1), alpha) * ss;
}

/// Applies the bounded-confidence rule to hyperedge `e`: if d(e, x) < c every
/// member moves to the (compensated) mean, written bit-identically.
inline UpdateResult apply_update(std::span<const node_id> e, std::span<double> x, double c,
                                 double alpha = 1.0) {
  UpdateResult r;
  r.discordance = discordance(e, x, alpha);
  if (!(r.discordance < c)) return r;
  KahanSum s;
  for (auto v : e) s.add(x[v]);
  const double mean = s.value() / static_cast<double>(e.size());
  for (auto v : e) {
    if (std::abs(x[v] - mean) > c) ++r.jumps;
    if (x[v] != mean) r.updated = true;
    x[v] = mean;
  }
  return r;
}

/// One asynchronous step: draw a uniform hyperedge and apply the rule.
template <typename Rng>
StepOutcome step(const Hypergraph& h, OpinionState& s, const SimConfig& cfg, Rng& rng) {
  std::vector<node_id> buf;
  h.sample_into(rng, buf);
  auto r = apply_update(buf, s.opinions, cfg.c, cfg.alpha);
  ++s.time;
  return {Hyperedge::from_canonical(std::move(buf)), r.updated, r.jumps};
}

/// Every listed hyperedge is discordant (d >= c) or internally unanimous
/// (d <= zero_tol).
inline bool is_absorbing_explicit(const Hypergraph& h, std::span<const double> x, double c,
                                  double zero_tol = default_zero_tol) {
  if (!h.is_explicit()) throw std::logic_error("is_absorbing_explicit: requires an explicit hypergraph");
  for (std::size_t i = 0; i < h.explicit_edge_count(); ++i) {
    double d = discordance(h.edge(i), x, 1.0);
    if (d > zero_tol && d < c) return false;
  }
  return true;
}

namespace detail {

/// Is there a two-value hyperedge (a nodes at one value, b at another,
/// a <= avail_a, b <= avail_b, a + b <= cap) whose discordance lies in
/// (zero_tol, c)? Only the two extreme splits need testing: for a fixed pair
/// of values they attain the minimum.
inline bool two_value_concordant(std::size_t avail_a, std::size_t avail_b, std::size_t cap,
                                 double delta2, double c, double zero_tol) {
  if (cap < 2) return false;
  const std::pair<std::size_t, std::size_t> splits[] = {{std::min(avail_a, cap - 1), 1},
                                                        {1, std::min(avail_b, cap - 1)}};
  for (auto [a, b] : splits) {
    if (a < 1 || b < 1 || a + b > cap) continue;
    double n = static_cast<double>(a + b);
    double d = static_cast<double>(a) * static_cast<double>(b) * delta2 / (n * (n - 1.0));
    if (d > zero_tol && d < c) return true;
  }
  return false;
}

}  // namespace detail

/// Absorption test for a clustered state on an implicit hypergraph, without
/// enumerating hyperedges.
///
/// Within one hyperclique the least discordant non-unanimous hyperedge takes
/// one node from one cluster and as many as possible from an adjacent
/// cluster, d = a*b*(g_i - g_j)^2 / (n(n-1)). Inter-community hyperedges use
/// the same bound over every pair of clusters that can be drawn from two
/// different communities, with n capped by the maximum mixed size.
inline bool is_absorbing_clustered(const ClusterSet& clusters, const Hypergraph& h, double c,
                                   double zero_tol = default_zero_tol) {
  if (h.is_explicit()) throw std::logic_error("is_absorbing_clustered: requires an implicit hypergraph");
  if (!clusters.is_tight()) throw std::runtime_error("not a clustered state");
  if (clusters.assignment.size() != h.node_count())
    throw std::invalid_argument("cluster assignment does not match the hypergraph");
  const std::size_t m = clusters.count();
  if (m <= 1) return true;
  const auto& vals = clusters.values;

  // intra-community hyperedges
  const std::size_t k = h.community_count();
  if (k == 1) {
    for (std::size_t i = 0; i + 1 < m; ++i) {
      double d2 = (vals[i + 1] - vals[i]) * (vals[i + 1] - vals[i]);
      if (detail::two_value_concordant(clusters.sizes[i], clusters.sizes[i + 1], h.node_count(), d2, c,
                                       zero_tol))
        return false;
    }
    return true;
  }
  std::vector<std::uint32_t> first_comm(m, UINT32_MAX);
  std::vector<char> multi_comm(m, 0);
  for (std::uint32_t comm = 0; comm < k; ++comm) {
    auto members = h.community_members(comm);
    std::vector<std::uint32_t> labels;
    labels.reserve(members.size());
    for (auto v : members) labels.push_back(clusters.assignment[v]);
    std::sort(labels.begin(), labels.end());
    // run-length encode: (cluster, count) in value order
    std::vector<std::pair<std::uint32_t, std::size_t>> runs;
    for (auto l : labels) {
      if (!runs.empty() && runs.back().first == l)
        ++runs.back().second;
      else
        runs.push_back({l, 1});
    }
    for (auto [l, cnt] : runs) {
      if (first_comm[l] == UINT32_MAX)
        first_comm[l] = comm;
      else if (first_comm[l] != comm)
        multi_comm[l] = 1;
    }
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
      double d = vals[runs[r + 1].first] - vals[runs[r].first];
      if (detail::two_value_concordant(runs[r].second, runs[r + 1].second, members.size(), d * d, c,
                                       zero_tol))
        return false;
    }
  }

  // inter-community hyperedges
  const auto& rule = h.mixed_rule();
  if (rule.kind == MixedRule::Kind::none) return true;
  const std::size_t cap = rule.kind == MixedRule::Kind::bounded
                              ? std::min<std::size_t>(rule.max_size, h.node_count())
                              : h.node_count();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double d2 = (vals[j] - vals[i]) * (vals[j] - vals[i]);
      // every non-unanimous hyperedge of size n has d >= gap^2 / n
      if (d2 / static_cast<double>(cap) >= c) break;
      bool mixable = multi_comm[i] || multi_comm[j] || first_comm[i] != first_comm[j];
      if (mixable && detail::two_value_concordant(clusters.sizes[i], clusters.sizes[j], cap, d2, c, zero_tol))
        return false;
    }
  }
  return true;
}

/// Absorption test for any representation. Implicit hypergraphs are decided
/// from clusters; a state that is not tightly clustered is reported as not
/// absorbing.
inline bool is_absorbing(const Hypergraph& h, std::span<const double> x, double c,
                         double zero_tol = default_zero_tol, double cluster_tol = default_cluster_tol) {
  if (h.is_explicit()) return is_absorbing_explicit(h, x, c, zero_tol);
  auto cs = extract_clusters(x, cluster_tol);
  if (!cs.is_tight()) return false;
  return is_absorbing_clustered(cs, h, c, zero_tol);
}

struct Trajectory {
  std::vector<std::uint64_t> times;
  std::vector<std::vector<double>> states;
};

struct JumpEvent {
  std::uint64_t time;  // step t -> t+1
  std::uint32_t jumps;
};

struct SimSummary {
  std::uint64_t seed = 0;
  std::uint64_t t_star = 0;
  StopReason stop_reason = StopReason::cutoff;
  OpinionState initial_state;
  OpinionState final_state;
  ClusterSet clusters;
  double initial_mean = 0.0;
  double final_mean = 0.0;
  double mean_drift = 0.0;
  std::uint64_t updates = 0;
  std::uint64_t jump_total = 0;
  std::vector<JumpEvent> jump_events;
  std::uint64_t conditioning_draws = 0;
  Trajectory trajectory;

  bool converged() const noexcept { return stop_reason != StopReason::cutoff; }
};

namespace detail {

class TrajectoryRecorder {
 public:
  explicit TrajectoryRecorder(const TrajectoryOptions& opt) : opt_(opt), stride_(opt.stride ? opt.stride : 1) {}

  void offer(std::uint64_t t, std::span<const double> x, Trajectory& out) {
    if (!opt_.record || t % stride_ != 0) return;
    out.times.push_back(t);
    out.states.emplace_back(x.begin(), x.end());
    if (opt_.stride == 0 && out.times.size() >= 2 * std::max<std::size_t>(opt_.target, 1)) {
      std::size_t w = 0;
      for (std::size_t r = 0; r < out.times.size(); r += 2, ++w) {
        out.times[w] = out.times[r];
        out.states[w] = std::move(out.states[r]);
      }
      out.times.resize(w);
      out.states.resize(w);
      stride_ *= 2;
    }
  }

  void finish(std::uint64_t t, std::span<const double> x, Trajectory& out) {
    if (!opt_.record || (!out.times.empty() && out.times.back() == t)) return;
    out.times.push_back(t);
    out.states.emplace_back(x.begin(), x.end());
  }

 private:
  TrajectoryOptions opt_;
  std::uint64_t stride_;
};

}  // namespace detail

namespace detail {

inline SimSummary run_core(const Hypergraph& h, const SimConfig& cfg, std::vector<double> initial, rng_type& rng,
                           const std::vector<node_id>* first, std::uint64_t draws) {
  cfg.validate();
  if (initial.size() != h.node_count())
    throw std::invalid_argument("initial state has " + std::to_string(initial.size()) +
                                " opinions for " + std::to_string(h.node_count()) + " nodes");
  for (double v : initial)
    if (!std::isfinite(v)) throw std::invalid_argument("initial opinions must be finite");

  SimSummary out;
  out.seed = cfg.seed;
  out.conditioning_draws = draws;
  out.initial_state = {initial, 0};
  out.initial_mean = kahan_mean(initial);
  OpinionState s{std::move(initial), 0};

  const auto& rule = cfg.stop;
  std::uint64_t every = 0;
  if (rule.absorbing_every) {
    every = *rule.absorbing_every;
    if (every == 0) {
      every = 1;
      if (h.is_explicit()) every = std::max<std::uint64_t>(1, h.explicit_edge_count());
    }
  }

  double global_d = rule.discordance_below ? global_discordance(s.opinions, cfg.alpha) : 0.0;
  bool dirty = true;
  std::uint64_t last_change = 0;
  detail::TrajectoryRecorder recorder(cfg.trajectory);
  std::vector<node_id> buf;

  auto evaluate = [&]() -> std::optional<StopReason> {
    if (rule.discordance_below && global_d < *rule.discordance_below) return StopReason::discordance_threshold;
    if (every && dirty && s.time % every == 0) {
      dirty = false;
      // An exact unanimity test needs exact clusters as well.
      double tol = cfg.zero_tol == 0.0 ? 0.0 : cfg.cluster_tol;
      if (is_absorbing(h, s.opinions, cfg.c, cfg.zero_tol, tol)) return StopReason::absorbing;
    }
    return std::nullopt;
  };

  auto advance = [&](const UpdateResult& r) {
    if (r.jumps) {
      out.jump_events.push_back({s.time, r.jumps});
      out.jump_total += r.jumps;
    }
    ++s.time;
    if (r.updated) {
      ++out.updates;
      dirty = true;
      last_change = s.time;
      if (rule.discordance_below) global_d = global_discordance(s.opinions, cfg.alpha);
    }
    recorder.offer(s.time, s.opinions, out.trajectory);
  };

  recorder.offer(0, s.opinions, out.trajectory);
  std::optional<StopReason> reason = evaluate();

  if (!reason && first) {
    advance(apply_update(*first, s.opinions, cfg.c, cfg.alpha));
    reason = evaluate();
  } else if (!reason && cfg.condition_first_pick_concordant && !(rule.max_steps && *rule.max_steps == 0)) {
    // Redraw the time-0 hyperedge until it is concordant.
    for (;;) {
      if (out.conditioning_draws >= cfg.max_conditioning_draws)
        throw std::runtime_error("no concordant hyperedge found for the conditioned first pick");
      ++out.conditioning_draws;
      h.sample_into(rng, buf);
      if (discordance(buf, s.opinions, cfg.alpha) < cfg.c) break;
    }
    advance(apply_update(buf, s.opinions, cfg.c, cfg.alpha));
    reason = evaluate();
  }

  while (!reason) {
    if (rule.max_steps && s.time >= *rule.max_steps) {
      reason = StopReason::cutoff;
      break;
    }
    h.sample_into(rng, buf);
    advance(apply_update(buf, s.opinions, cfg.c, cfg.alpha));
    reason = evaluate();
  }

  out.stop_reason = *reason;
  // An absorbing state found by a periodic check has held since the last change.
  out.t_star = *reason == StopReason::absorbing ? last_change : s.time;
  recorder.finish(s.time, s.opinions, out.trajectory);
  out.final_mean = kahan_mean(s.opinions);
  out.mean_drift = std::abs(out.final_mean - out.initial_mean);
  out.clusters = extract_clusters(s.opinions, cfg.cluster_tol);
  out.final_state = std::move(s);
  return out;
}

}  // namespace detail

/// Runs the asynchronous process from `initial` until the stop rule fires.
/// The random stream is seeded from cfg.seed and consumed only by hyperedge
/// selection, so (h, cfg, initial) determines the run bit for bit. With a
/// conditioned first pick only the hyperedge is redrawn, which can be hopeless
/// when the given state is spread out; run_drawn avoids that.
inline SimSummary run_from(const Hypergraph& h, const SimConfig& cfg, std::vector<double> initial,
                           rng_type& rng) {
  return detail::run_core(h, cfg, std::move(initial), rng, nullptr, 0);
}

/// Draws x(0) with `draw_x0(rng)` and runs. A conditioned first pick redraws
/// the pair (x(0), e_0) until e_0 is concordant under x(0).
template <class DrawInitial>
inline SimSummary run_drawn(const Hypergraph& h, const SimConfig& cfg, DrawInitial&& draw_x0, rng_type& rng) {
  if (!cfg.condition_first_pick_concordant || (cfg.stop.max_steps && *cfg.stop.max_steps == 0))
    return detail::run_core(h, cfg, draw_x0(rng), rng, nullptr, 0);
  cfg.validate();
  std::vector<node_id> edge;
  for (std::uint64_t draws = 1;; ++draws) {
    if (draws > cfg.max_conditioning_draws)
      throw std::runtime_error("no concordant first hyperedge found for the conditioned first pick");
    std::vector<double> x0 = draw_x0(rng);
    if (x0.size() != h.node_count())
      throw std::invalid_argument("initial state has " + std::to_string(x0.size()) + " opinions for " +
                                  std::to_string(h.node_count()) + " nodes");
    h.sample_into(rng, edge);
    if (discordance(edge, x0, cfg.alpha) < cfg.c)
      return detail::run_core(h, cfg, std::move(x0), rng, &edge, draws);
  }
}

inline SimSummary run(const Hypergraph& h, const SimConfig& cfg, std::vector<double> initial) {
  auto rng = make_rng(cfg.seed);
  return run_from(h, cfg, std::move(initial), rng);
}

/// Draws x(0) from cfg.init with the run's own stream, then runs.
inline SimSummary run(const Hypergraph& h, const SimConfig& cfg) {
  auto rng = make_rng(cfg.seed);
  return run_drawn(h, cfg, [&](rng_type& r) { return cfg.init.draw(h.node_count(), r); }, rng);
}

}  // namespace hbcm
