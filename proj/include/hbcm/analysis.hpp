#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbcm/combinatorics.hpp"
#include "hbcm/dynamics.hpp"
#include "hbcm/hypergraph.hpp"
#include "hbcm/parallel.hpp"
#include "hbcm/random.hpp"
#include "hbcm/stats.hpp"

namespace hbcm {

/// lim_{n->inf} P[d(e) < c | |e| = n] for i.i.d. opinions of variance sigma2.
inline double limiting_concordance(double sigma2, double c) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("limiting_concordance: sigma^2 must be > 0");
  if (!(c >= 0.0)) throw std::invalid_argument("limiting_concordance: c must be >= 0");
  if (c > sigma2) return 1.0;
  if (c == sigma2) return 0.5;
  return 0.0;
}

/// lambda = c / sigma^2 and the Chernoff rate r = e^{(1-lambda)/2} sqrt(lambda).
struct BoundParams {
  double lambda = 1.0;

  static BoundParams from(double c, double sigma2) {
    if (!(c > 0.0) || !(sigma2 > 0.0)) throw std::invalid_argument("BoundParams: c and sigma^2 must be > 0");
    return {c / sigma2};
  }
  double r() const { return std::exp(0.5 * (1.0 - lambda)) * std::sqrt(lambda); }
};

/// r^{n-1}. For lambda < 1 it bounds P[d < c] from above; for lambda > 1 it
/// bounds P[d >= c], i.e. P[d < c] >= 1 - r^{n-1} (normal opinions).
inline double chernoff_concordance_bound(const BoundParams& params, std::uint64_t n) {
  if (!(params.lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (params.lambda == 1.0) throw std::invalid_argument("bound undefined at λ=1");
  if (n < 2) throw std::invalid_argument("chernoff bound needs n >= 2");
  return std::pow(params.r(), static_cast<double>(n - 1));
}

struct ConcordanceEstimate {
  std::uint64_t n = 0;
  double a_hat = 0.0;
  std::uint64_t trials = 0;
  double std_err = 0.0;
};

inline ConcordanceEstimate make_estimate(std::uint64_t n, std::uint64_t hits, std::uint64_t trials) {
  double a = static_cast<double>(hits) / static_cast<double>(trials);
  return {n, a, trials, std::sqrt(a * (1.0 - a) / static_cast<double>(trials))};
}

namespace detail {

template <typename Rng>
std::uint64_t count_concordant(std::uint64_t n, const InitialDistribution& dist, double c,
                               std::uint64_t trials, Rng& rng) {
  std::vector<double> buf(n);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    dist.fill(buf, rng);
    if (sample_variance(buf) < c) ++hits;
  }
  return hits;
}

}  // namespace detail

/// Fraction of `trials` samples of n fresh opinions whose sample variance is
/// below c.
template <typename Rng>
ConcordanceEstimate concordance_prob_mc(std::uint64_t n, const InitialDistribution& dist, double c,
                                        std::uint64_t trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("concordance_prob_mc: trials must be >= 1");
  if (n < 2) throw std::invalid_argument("concordance_prob_mc: n must be >= 2");
  return make_estimate(n, detail::count_concordant(n, dist, c, trials, rng), trials);
}

inline constexpr std::uint64_t mc_chunk = 1024;

/// Parallel variant: trials are split into fixed chunks, chunk k drawing from
/// trial_seed(seed, k), so the estimate does not depend on `threads`.
inline ConcordanceEstimate concordance_prob_mc_seeded(std::uint64_t n, const InitialDistribution& dist,
                                                      double c, std::uint64_t trials, std::uint64_t seed,
                                                      unsigned threads = 1) {
  if (trials < 1) throw std::invalid_argument("concordance_prob_mc: trials must be >= 1");
  if (n < 2) throw std::invalid_argument("concordance_prob_mc: n must be >= 2");
  const std::size_t chunks = (trials + mc_chunk - 1) / mc_chunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t k) {
    auto rng = make_rng(trial_seed(seed, k));
    std::uint64_t len = std::min<std::uint64_t>(mc_chunk, trials - k * mc_chunk);
    hits[k] = detail::count_concordant(n, dist, c, len, rng);
  });
  return make_estimate(n, std::accumulate(hits.begin(), hits.end(), std::uint64_t{0}), trials);
}

/// E[|e*|] ~ sum n a_n C(N,n) / sum a_n C(N,n) with a_hat[i] holding a_{i+2}.
inline double expected_first_concordant_size(std::uint64_t N, std::span<const double> a_hat) {
  if (N < 2) throw std::invalid_argument("expected_first_concordant_size: N must be >= 2");
  if (a_hat.size() < N - 1) throw std::invalid_argument("expected_first_concordant_size: need a_n for n = 2..N");
  std::vector<double> log_w, log_nw;
  for (std::uint64_t n = 2; n <= N; ++n) {
    double a = a_hat[n - 2];
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("a_n must lie in [0, 1]");
    if (a == 0.0) continue;
    double lw = std::log(a) + log_binomial(static_cast<double>(N), static_cast<double>(n));
    log_w.push_back(lw);
    log_nw.push_back(lw + std::log(static_cast<double>(n)));
  }
  if (log_w.empty()) throw std::invalid_argument("no concordant sizes");
  return std::exp(log_sum_exp(log_nw) - log_sum_exp(log_w));
}

/// Inputs indexed by hyperedge size n (entries 0 and 1 unused).
struct JumpModelInputs {
  std::vector<double> size_prob;  // g(n) = P[|e_t| = n]
  std::vector<double> a_n;        // P[d(e) < c | |e| = n]
  std::vector<double> p_n;        // P[|x_i - mean_e| > c | i in e, |e| = n, e concordant]
  double a = 0.0;                 // lim a_n
  double p = 0.0;                 // P[|x - mu| > c]

  void validate() const {
    if (size_prob.size() != a_n.size() || size_prob.size() != p_n.size())
      throw std::invalid_argument("JumpModelInputs: vectors must have equal length");
    double total = 0.0;
    for (std::size_t n = 0; n < size_prob.size(); ++n) {
      for (double v : {size_prob[n], a_n[n], p_n[n]})
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("JumpModelInputs: probabilities must lie in [0, 1]");
      if (n < 2 && size_prob[n] != 0.0) throw std::invalid_argument("JumpModelInputs: g(0) and g(1) must be 0");
      total += size_prob[n];
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("JumpModelInputs: g must sum to 1");
    if (!(a >= 0.0 && a <= 1.0 && p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("JumpModelInputs: a and p must lie in [0, 1]");
  }
};

/// E[J] = sum_n a_n g(n) p_n n.
inline double expected_jumps(const JumpModelInputs& in) {
  in.validate();
  KahanSum s;
  for (std::size_t n = 2; n < in.size_prob.size(); ++n)
    s.add(in.a_n[n] * in.size_prob[n] * in.p_n[n] * static_cast<double>(n));
  return s.value();
}

/// The same quantity split around the limits a and p:
/// p a E|e| + p sum (a_n - a) g n + a sum (p_n - p) g n + sum (p_n - p)(a_n - a) g n.
inline double expected_jumps_expanded(const JumpModelInputs& in) {
  in.validate();
  KahanSum mean_size, t2, t3, t4;
  for (std::size_t n = 2; n < in.size_prob.size(); ++n) {
    double gn = in.size_prob[n] * static_cast<double>(n);
    mean_size.add(gn);
    t2.add((in.a_n[n] - in.a) * gn);
    t3.add((in.p_n[n] - in.p) * gn);
    t4.add((in.p_n[n] - in.p) * (in.a_n[n] - in.a) * gn);
  }
  return in.p * in.a * mean_size.value() + in.p * t2.value() + in.a * t3.value() + t4.value();
}

/// P[|x - mu| > c] for one draw.
inline double tail_probability(const InitialDistribution& dist, double c) {
  auto [p1, p2] = dist.params();
  if (dist.kind() == InitialDistribution::Kind::normal) return std::erfc(c / (p2 * std::sqrt(2.0)));
  double half = 0.5 * (p2 - p1);
  return c >= half ? 0.0 : (half - c) / half;
}

struct JumpProbEstimate {
  std::uint64_t n = 0;
  double p_hat = 0.0;
  std::uint64_t concordant_samples = 0;
  std::uint64_t draws = 0;
};

/// Conditional Monte Carlo for p_n: draw size-n samples, keep the concordant
/// ones, and report the fraction of their members farther than c from the
/// sample mean. Stops after `concordant_wanted` kept samples or `max_draws`.
template <typename Rng>
JumpProbEstimate estimate_jump_probability(std::uint64_t n, const InitialDistribution& dist, double c,
                                           std::uint64_t concordant_wanted, Rng& rng,
                                           std::uint64_t max_draws = 100'000'000) {
  if (n < 2) throw std::invalid_argument("estimate_jump_probability: n must be >= 2");
  JumpProbEstimate est{n, 0.0, 0, 0};
  std::vector<double> buf(n);
  std::uint64_t far = 0;
  while (est.concordant_samples < concordant_wanted && est.draws < max_draws) {
    ++est.draws;
    dist.fill(buf, rng);
    RunningVariance rv;
    for (double v : buf) rv.push(v);
    if (!(rv.sample_variance() < c)) continue;
    ++est.concordant_samples;
    double mean = kahan_mean(buf);
    for (double v : buf)
      if (std::abs(v - mean) > c) ++far;
  }
  if (est.concordant_samples)
    est.p_hat = static_cast<double>(far) / static_cast<double>(est.concordant_samples * n);
  return est;
}

/// Sequence of prime-sized subsets of e whose consecutive mean updates act
/// like a single mean update on e. For |e| = p*m with p the smallest prime
/// factor: decompose the p consecutive blocks of m members, then average
/// across blocks with the stride sets {j, m+j, ..., (p-1)m+j}.
inline std::vector<Hyperedge> prime_decompose(const Hyperedge& e) {
  const std::size_t n = e.size();
  if (n < 2) throw std::invalid_argument("prime_decompose: |e| must be >= 2");
  if (is_prime(n)) return {e};
  const std::size_t p = smallest_prime_factor(n);
  const std::size_t m = n / p;
  std::vector<Hyperedge> out;
  auto members = e.members();
  for (std::size_t k = 0; k < p; ++k) {
    std::vector<node_id> block(members.begin() + static_cast<std::ptrdiff_t>(k * m),
                               members.begin() + static_cast<std::ptrdiff_t>((k + 1) * m));
    if (m == 1) continue;
    auto sub = prime_decompose(Hyperedge::from_canonical(std::move(block)));
    out.insert(out.end(), sub.begin(), sub.end());
  }
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<node_id> stride;
    for (std::size_t k = 0; k < p; ++k) stride.push_back(members[k * m + j]);
    out.push_back(Hyperedge::from_canonical(std::move(stride)));
  }
  return out;
}

namespace detail {

inline std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

}  // namespace detail

/// Initial state that never reaches its limit in finite time on h: members of
/// the missing prime-sized set e start at {0, 2^-r, ..., 2^-r} with
/// 2^-r < sqrt(c), everyone else at a value M large enough that every
/// hyperedge mixing the two groups is discordant.
inline OpinionState adversarial_initial_state(const Hypergraph& h, const Hyperedge& e, double c) {
  if (!h.is_explicit()) throw std::invalid_argument("adversarial_initial_state: requires an explicit hypergraph");
  if (!(c > 0.0)) throw std::invalid_argument("adversarial_initial_state: c must be > 0");
  const std::size_t N = h.node_count();
  for (auto v : e)
    if (v >= N) throw std::invalid_argument("adversarial_initial_state: node " + std::to_string(v) + " out of range");
  if (!is_prime(e.size()) || e.size() < 3)
    throw std::invalid_argument("adversarial_initial_state: |e| must be a prime >= 3");
  if (h.contains(e)) throw std::invalid_argument("adversarial_initial_state: e is already a hyperedge");

  std::vector<char> in_e(N, 0);
  for (auto v : e) in_e[v] = 1;
  std::vector<std::size_t> parent(N);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < h.explicit_edge_count(); ++i) {
    auto edge = h.edge(i);
    if (!std::all_of(edge.begin(), edge.end(), [&](node_id v) { return in_e[v]; })) continue;
    for (std::size_t j = 1; j < edge.size(); ++j)
      parent[detail::find_root(parent, edge[j])] = detail::find_root(parent, edge[0]);
  }
  for (auto v : e)
    if (detail::find_root(parent, v) != detail::find_root(parent, e[0]))
      throw std::invalid_argument("adversarial_initial_state: the subhypergraph induced by e is not connected");

  // Any values in [0, eps] give every subset of e sample variance <= eps^2/2 < c.
  const double eps = std::sqrt(c);
  int r = 1;
  while (std::ldexp(1.0, -r) >= eps) ++r;
  const double low = std::ldexp(1.0, -r);

  // Lower bound on d for a hyperedge with k members in [0, eps] and j at M:
  // k j (M - eps)^2 / (n (n - 1)).
  auto separates = [&](double M) {
    for (std::size_t i = 0; i < h.explicit_edge_count(); ++i) {
      auto edge = h.edge(i);
      std::size_t k = 0;
      for (auto v : edge) k += in_e[v];
      std::size_t j = edge.size() - k;
      if (k == 0 || j == 0) continue;
      double n = static_cast<double>(edge.size());
      double bound = static_cast<double>(k) * static_cast<double>(j) * (M - eps) * (M - eps) / (n * (n - 1.0));
      if (!(bound > c)) return false;
    }
    return true;
  };
  double M = eps + std::sqrt(2.0 * c * static_cast<double>(N));
  while (!separates(M)) {
    M *= 2.0;
    if (!std::isfinite(M)) throw std::runtime_error("adversarial_initial_state: no separating value found");
  }

  OpinionState s{std::vector<double>(N, M), 0};
  for (std::size_t i = 0; i < e.size(); ++i) s.opinions[e[i]] = i == 0 ? 0.0 : low;
  return s;
}

namespace detail {

/// Smallest integer strictly greater than v, treating values within rounding
/// noise of an integer as that integer.
inline std::int64_t smallest_integer_above(double v) {
  double near = std::round(v);
  if (std::abs(v - near) <= 1e-9 * std::max(1.0, std::abs(v))) v = near;
  return static_cast<std::int64_t>(std::floor(v)) + 1;
}

}  // namespace detail

/// Smallest N with N > ((b-a)/sqrt(c) + 1)((b-a)^2/c - 1), at least 1: the
/// complete-hypergraph size above which opinions in [a, b] reach consensus.
inline std::uint64_t consensus_node_threshold(double a, double b, double c) {
  if (!(a < b) || !(c > 0.0)) throw std::invalid_argument("consensus_node_threshold: need a < b and c > 0");
  double w = b - a;
  double v = (w / std::sqrt(c) + 1.0) * (w * w / c - 1.0);
  return static_cast<std::uint64_t>(std::max<std::int64_t>(1, detail::smallest_integer_above(v)));
}

/// floor((b-a)/sqrt(2c) + 1): most clusters a limit state in [a, b] can have.
inline std::uint64_t max_cluster_bound(double a, double b, double c) {
  if (!(a < b) || !(c > 0.0)) throw std::invalid_argument("max_cluster_bound: need a < b and c > 0");
  double v = (b - a) / std::sqrt(2.0 * c) + 1.0;
  return static_cast<std::uint64_t>(detail::smallest_integer_above(v) - 1);
}

/// Hyperedge-size distribution of G(N, m) with m_n = round(C(N, n) x^n),
/// computed in log space. Index n holds g(n); all zeros if no hyperedges.
inline std::vector<double> power_profile_size_distribution(std::uint32_t N, double x) {
  if (N < 2) throw std::invalid_argument("power profile needs N >= 2");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("power profile needs x in [0, 1]");
  std::vector<double> log_m(N + 1, -std::numeric_limits<double>::infinity());
  if (x == 0.0) return std::vector<double>(N + 1, 0.0);
  for (std::uint32_t n = 2; n <= N; ++n) {
    double lm = log_binomial(N, n) + n * std::log(x);
    // counts that can be held exactly are rounded like integer edge counts
    if (lm < 50.0) {
      double m = std::round(std::exp(lm));
      lm = m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
    }
    log_m[n] = lm;
  }
  double total = log_sum_exp(log_m);
  std::vector<double> g(N + 1, 0.0);
  if (!std::isfinite(total)) return g;
  for (std::uint32_t n = 2; n <= N; ++n) g[n] = std::exp(log_m[n] - total);
  return g;
}

inline double mean_size(std::span<const double> g) {
  KahanSum s;
  for (std::size_t n = 0; n < g.size(); ++n) s.add(g[n] * static_cast<double>(n));
  return s.value();
}

/// Mean number of jumps in the first step on a hypergraph whose hyperedge
/// sizes follow g, with opinions redrawn i.i.d. from `dist` for each trial.
/// Given its size, the picked hyperedge's members carry i.i.d. opinions, so
/// only the size distribution of the hypergraph matters.
template <typename Rng>
double mean_first_step_jumps(std::span<const double> g, const InitialDistribution& dist, double c,
                             std::uint64_t trials, Rng& rng) {
  if (trials < 1) throw std::invalid_argument("mean_first_step_jumps: trials must be >= 1");
  std::discrete_distribution<std::size_t> pick_size(g.begin(), g.end());
  std::vector<double> x;
  std::vector<node_id> members;
  std::uint64_t total = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::size_t n = pick_size(rng);
    x.resize(n);
    dist.fill(x, rng);
    members.resize(n);
    std::iota(members.begin(), members.end(), node_id{0});
    total += apply_update(members, x, c).jumps;
  }
  return static_cast<double>(total) / static_cast<double>(trials);
}

}  // namespace hbcm
