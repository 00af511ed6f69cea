#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>

#include "hbcm/analysis.hpp"
#include "oracles.hpp"

using namespace hbcm;

namespace {

// P[s_n^2 < c] for normal opinions: (n-1) s^2 / sigma^2 is chi-square(n-1).
double normal_concordance_exact(std::uint64_t n, double sigma, double c) {
  boost::math::chi_squared chi(static_cast<double>(n - 1));
  return boost::math::cdf(chi, static_cast<double>(n - 1) * c / (sigma * sigma));
}

}  // namespace

TEST(LimitingConcordance, Cases) {
  EXPECT_EQ(limiting_concordance(1.0, 2.0), 1.0);
  EXPECT_EQ(limiting_concordance(1.0, 1.0), 0.5);
  EXPECT_EQ(limiting_concordance(1.44, 1.0), 0.0);
  EXPECT_THROW(limiting_concordance(0.0, 1.0), std::invalid_argument);
}

TEST(Chernoff, Values) {
  auto p = BoundParams::from(1.0, 2.0);
  EXPECT_DOUBLE_EQ(p.lambda, 0.5);
  EXPECT_LT(p.r(), 1.0);
  EXPECT_LT(BoundParams{2.0}.r(), 1.0);
  EXPECT_DOUBLE_EQ(chernoff_concordance_bound(p, 2), p.r());
  EXPECT_DOUBLE_EQ(chernoff_concordance_bound(p, 11), std::pow(p.r(), 10));
  EXPECT_THROW(chernoff_concordance_bound(BoundParams{1.0}, 5), std::invalid_argument);
  EXPECT_THROW(chernoff_concordance_bound(p, 1), std::invalid_argument);
}

TEST(Chernoff, ExactProbabilitiesRespectBounds) {
  for (double lambda : {0.3, 0.5, 0.694, 0.9, 1.1, 2.0, 4.0})
    for (std::uint64_t n : {2u, 5u, 10u, 20u, 50u, 200u}) {
      double exact = normal_concordance_exact(n, 1.0, lambda);
      double b = chernoff_concordance_bound(BoundParams{lambda}, n);
      if (lambda < 1)
        EXPECT_LE(exact, b + 1e-15) << lambda << " " << n;
      else
        EXPECT_GE(exact, 1 - b - 1e-15) << lambda << " " << n;
    }
}

TEST(ConcordanceMc, MatchesChiSquareOracle) {
  auto rng = make_rng(31);
  for (auto [n, sigma, c] : {std::tuple{2u, 1.0, 100.0}, {5u, 1.2, 1.0}, {10u, 1.0, 1.2}, {30u, 0.9, 1.0}}) {
    auto est = concordance_prob_mc(n, InitialDistribution::normal(0.0, sigma), c, 40000, rng);
    double exact = normal_concordance_exact(n, sigma, c);
    double se = std::sqrt(exact * (1 - exact) / 40000.0);
    EXPECT_NEAR(est.a_hat, exact, 4 * se + 1e-12) << n;
    EXPECT_EQ(est.trials, 40000u);
    EXPECT_NEAR(est.std_err, std::sqrt(est.a_hat * (1 - est.a_hat) / 40000.0), 1e-15);
  }
}

TEST(ConcordanceMc, ZeroBoundNeverConcordant) {
  auto rng = make_rng(32);
  EXPECT_EQ(concordance_prob_mc(4, InitialDistribution::uniform(0, 1), 0.0, 1000, rng).a_hat, 0.0);
}

TEST(ConcordanceMc, UniformAtItsVarianceIsHalf) {
  auto rng = make_rng(33);
  auto est = concordance_prob_mc(2000, InitialDistribution::uniform(0, 1), 1.0 / 12.0, 4000, rng);
  EXPECT_NEAR(est.a_hat, 0.5, 4 * std::sqrt(0.25 / 4000));
}

TEST(ConcordanceMc, SeededIsThreadIndependent) {
  auto d = InitialDistribution::normal(0, 1.2);
  auto a = concordance_prob_mc_seeded(20, d, 1.0, 5000, 9, 1);
  auto b = concordance_prob_mc_seeded(20, d, 1.0, 5000, 9, 4);
  EXPECT_EQ(a.a_hat, b.a_hat);
  EXPECT_THROW(concordance_prob_mc_seeded(1, d, 1.0, 10, 9), std::invalid_argument);
}

TEST(ExpectedFirstConcordantSize, SingleTerm) {
  std::vector<double> a = {0.3};
  EXPECT_DOUBLE_EQ(expected_first_concordant_size(2, a), 2.0);
  std::vector<double> zero = {0.0, 0.0};
  EXPECT_THROW(expected_first_concordant_size(3, zero), std::invalid_argument);
}

TEST(ExpectedFirstConcordantSize, GeometricProfile) {
  const double r = 0.6, scale = 0.7;
  for (std::uint64_t N : {3u, 10u, 50u, 300u}) {
    std::vector<double> a;
    for (std::uint64_t n = 2; n <= N; ++n) a.push_back(scale * std::pow(r, static_cast<double>(n)));
    double got = expected_first_concordant_size(N, a);
    // sum_{n>=2} n C(N,n) r^n = N r (1+r)^{N-1} - N r; sum C(N,n) r^n = (1+r)^N - 1 - N r
    double num = static_cast<double>(N) * (std::pow(1 + r, static_cast<double>(N - 1)) - 1.0);
    double den = (std::pow(1 + r, static_cast<double>(N)) - 1.0) / r - static_cast<double>(N);
    EXPECT_NEAR(got, num / den, 1e-9 * got) << N;
  }
  // The closed form with numerator N(1+r)^{N-1} - N - 1 differs only by a term that vanishes in N.
  std::uint64_t N = 300;
  std::vector<double> a;
  for (std::uint64_t n = 2; n <= N; ++n) a.push_back(std::pow(r, static_cast<double>(n)));
  double alt_form = (N * std::pow(1 + r, N - 1.0) - N - 1.0) / (std::pow(1 + r, double(N)) / r - N - 1.0 / r);
  EXPECT_NEAR(expected_first_concordant_size(N, a), alt_form, 1e-9 * alt_form);
  EXPECT_NEAR(alt_form / N, r / (1 + r), 0.01);
}

TEST(ExpectedFirstConcordantSize, LargeNDoesNotOverflow) {
  std::vector<double> a(999, 0.5);
  double v = expected_first_concordant_size(1000, a);
  EXPECT_NEAR(v, 500.0, 1.0);
}

namespace {

JumpModelInputs random_inputs(std::mt19937_64& rng, std::size_t nmax) {
  std::uniform_real_distribution<double> u(0, 1);
  JumpModelInputs in;
  in.size_prob.assign(nmax + 1, 0.0);
  in.a_n.assign(nmax + 1, 0.0);
  in.p_n.assign(nmax + 1, 0.0);
  double total = 0;
  for (std::size_t n = 2; n <= nmax; ++n) {
    in.size_prob[n] = u(rng);
    total += in.size_prob[n];
    in.a_n[n] = u(rng);
    in.p_n[n] = u(rng);
  }
  for (auto& g : in.size_prob) g /= total;
  in.a = u(rng);
  in.p = u(rng);
  return in;
}

}  // namespace

TEST(ExpectedJumps, Examples) {
  JumpModelInputs in;
  in.size_prob = {0, 0, 0, 1.0};
  in.a_n = {0, 0, 0, 0.5};
  in.p_n = {0, 0, 0, 0.2};
  EXPECT_NEAR(expected_jumps(in), 0.3, 1e-15);
  in.p_n = {0, 0, 0, 0};
  EXPECT_EQ(expected_jumps(in), 0.0);
  in.size_prob = {0, 0, 0, 0.5};
  EXPECT_THROW(expected_jumps(in), std::invalid_argument);
}

TEST(ExpectedJumps, FourTermExpansionIdentity) {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 500; ++rep) {
    auto in = random_inputs(rng, 2 + rng() % 300);
    double a = expected_jumps(in), b = expected_jumps_expanded(in);
    EXPECT_NEAR(a, b, 1e-12 * std::max(std::abs(a), 1e-300));
  }
}

TEST(ExpectedJumps, AgreesWithDirectSimulation) {
  // Single size n = 6: compare a_n p_n n from the estimators with forced picks.
  auto dist = InitialDistribution::normal(0, 0.8);
  const double c = 1.0;
  const std::uint64_t n = 6;
  auto rng = make_rng(42);
  auto a = concordance_prob_mc(n, dist, c, 200000, rng);
  auto p = estimate_jump_probability(n, dist, c, 200000, rng);
  JumpModelInputs in;
  in.size_prob.assign(n + 1, 0.0);
  in.a_n.assign(n + 1, 0.0);
  in.p_n.assign(n + 1, 0.0);
  in.size_prob[n] = 1.0;
  in.a_n[n] = a.a_hat;
  in.p_n[n] = p.p_hat;
  double predicted = expected_jumps(in);
  double simulated = mean_first_step_jumps(in.size_prob, dist, c, 200000, rng);
  EXPECT_GT(predicted, 0.0);
  EXPECT_NEAR(simulated, predicted, 0.03 * predicted);
}

TEST(TailProbability, Values) {
  EXPECT_NEAR(tail_probability(InitialDistribution::normal(0, 1), 1.0), 0.31731050786291415, 1e-14);
  EXPECT_DOUBLE_EQ(tail_probability(InitialDistribution::uniform(-2, 2), 1.0), 0.5);
  EXPECT_EQ(tail_probability(InitialDistribution::uniform(0, 1), 1.0), 0.0);
}

TEST(PrimeDecompose, Examples) {
  Hyperedge tri{4, 7, 9};
  EXPECT_EQ(prime_decompose(tri), (std::vector<Hyperedge>{tri}));
  EXPECT_EQ(prime_decompose(Hyperedge{0, 1, 2, 3}),
            (std::vector<Hyperedge>{{0, 1}, {2, 3}, {0, 2}, {1, 3}}));
  EXPECT_EQ(prime_decompose(Hyperedge{5, 8}), (std::vector<Hyperedge>{{5, 8}}));
}

TEST(PrimeDecompose, ComposedUpdatesEqualSingleUpdateExactly) {
  std::mt19937_64 rng(43);
  for (std::uint32_t size = 2; size <= 64; ++size) {
    // members spread over a larger id range, initial values random rationals
    std::vector<node_id> members;
    for (node_id v = 0; members.size() < size; v += 1 + static_cast<node_id>(rng() % 3)) members.push_back(v);
    Hyperedge e(members);
    std::vector<oracle::rational> x(members.back() + 1);
    for (auto& v : x) v = oracle::rational(static_cast<long long>(rng() % 2001) - 1000, 1 + static_cast<long long>(rng() % 97));
    auto want = x;
    oracle::rational_mean_update(want, std::vector<std::uint32_t>(members.begin(), members.end()));
    auto seq = prime_decompose(e);
    for (const auto& f : seq) {
      EXPECT_TRUE(is_prime(f.size())) << "size " << f.size();
      for (auto v : f) EXPECT_TRUE(std::binary_search(members.begin(), members.end(), v));
      oracle::rational_mean_update(x, std::vector<std::uint32_t>(f.begin(), f.end()));
    }
    EXPECT_EQ(x, want) << "|e|=" << size;
  }
}

TEST(PrimeDecompose, RejectsTinyEdges) {
  EXPECT_THROW(Hyperedge{1}, std::invalid_argument);
}

TEST(Adversarial, TriangleExample) {
  auto h = Hypergraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  auto s = adversarial_initial_state(h, Hyperedge{0, 1, 2}, 1.0);
  EXPECT_EQ(s.opinions, (std::vector<double>{0.0, 0.5, 0.5}));
}

TEST(Adversarial, SmallerBoundUsesSmallerValues) {
  auto h = Hypergraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  auto s = adversarial_initial_state(h, Hyperedge{0, 1, 2}, 0.01);
  EXPECT_EQ(s.opinions[0], 0.0);
  EXPECT_LT(s.opinions[1], 0.1);
  EXPECT_GE(s.opinions[1], 0.05);
}

TEST(Adversarial, OutsideNodesAreSeparated) {
  // e = {0,1,2} joined to the rest through mixed hyperedges.
  auto h = Hypergraph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {0, 3, 4}, {3, 4, 5}, {1, 2, 3, 4, 5}});
  const double c = 1.0;
  auto s = adversarial_initial_state(h, Hyperedge{0, 1, 2}, c);
  for (std::size_t i = 0; i < h.explicit_edge_count(); ++i) {
    auto e = h.edge(i);
    bool mixed = std::any_of(e.begin(), e.end(), [](node_id v) { return v <= 2; }) &&
                 std::any_of(e.begin(), e.end(), [](node_id v) { return v > 2; });
    if (mixed) EXPECT_GE(discordance(e, s.opinions), c);
  }
}

TEST(Adversarial, Errors) {
  auto tri = Hypergraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
  auto disconnected = Hypergraph::from_edges(3, {{0, 1}});
  EXPECT_THROW(adversarial_initial_state(disconnected, Hyperedge{0, 1, 2}, 1.0), std::invalid_argument);
  auto with_e = Hypergraph::from_edges(3, {{0, 1}, {1, 2}, {0, 1, 2}});
  EXPECT_THROW(adversarial_initial_state(with_e, Hyperedge{0, 1, 2}, 1.0), std::invalid_argument);
  auto four = Hypergraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_THROW(adversarial_initial_state(four, Hyperedge{0, 1, 2, 3}, 1.0), std::invalid_argument);
  EXPECT_THROW(adversarial_initial_state(tri, Hyperedge{0, 1}, 1.0), std::invalid_argument);
  EXPECT_THROW(adversarial_initial_state(tri, Hyperedge{0, 1, 2}, 0.0), std::invalid_argument);
  EXPECT_THROW(adversarial_initial_state(Hypergraph::complete(3), Hyperedge{0, 1, 2}, 1.0), std::invalid_argument);
}

TEST(Thresholds, Examples) {
  EXPECT_EQ(consensus_node_threshold(0, 1, 1), 1u);
  EXPECT_EQ(consensus_node_threshold(-2, 2, 1), 76u);
  EXPECT_EQ(max_cluster_bound(0, 1, 0.125), 3u);
  EXPECT_EQ(max_cluster_bound(-2, 2, 1), 3u);  // floor(4/sqrt 2 + 1) = 3
  EXPECT_THROW(consensus_node_threshold(1, 0, 1), std::invalid_argument);
  EXPECT_THROW(max_cluster_bound(0, 1, 0), std::invalid_argument);
}

TEST(Thresholds, CompleteHypergraphReachesConsensusAboveThreshold) {
  // Uniform(0,1), c = 1/16: threshold ((1/0.25)+1)(16-1) = 75 -> 76 nodes.
  const double c = 1.0 / 16;
  auto n = consensus_node_threshold(0, 1, c);
  EXPECT_EQ(n, 76u);
  auto h = Hypergraph::complete(n);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SimConfig cfg;
    cfg.c = c;
    cfg.seed = seed;
    cfg.stop = StopRule::absorbing().with_max_steps(50'000'000);
    auto s = run(h, cfg);
    ASSERT_EQ(s.stop_reason, StopReason::absorbing);
    ASSERT_TRUE(s.clusters.is_consensus()) << "seed " << seed;
    EXPECT_NEAR(s.clusters.values[0], s.initial_mean, 1e-8);
  }
}

TEST(PowerProfile, FullProfileIsBinomial) {
  auto g = power_profile_size_distribution(10, 1.0);
  EXPECT_NEAR(g[2], 45.0 / 1013, 1e-15);
  EXPECT_NEAR(mean_size(g), (10.0 * 512 - 10) / 1013, 1e-12);
  auto none = power_profile_size_distribution(10, 0.0);
  EXPECT_EQ(mean_size(none), 0.0);
}

TEST(PowerProfile, SparseProfileRoundsCounts) {
  // N=20, x=0.05: m_2 = round(190 * 0.0025) = 0, m_3 = round(1140 * 1.25e-4) = 0.
  auto g = power_profile_size_distribution(20, 0.05);
  EXPECT_EQ(mean_size(g), 0.0);
  // x = 0.3: m_2 = round(17.1) = 17, m_3 = round(30.78) = 31
  auto h = power_profile_size_distribution(20, 0.3);
  EXPECT_NEAR(h[3] / h[2], 31.0 / 17.0, 1e-12);
}
