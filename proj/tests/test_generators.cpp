#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "hbcm/generators.hpp"
#include "hbcm/hypergraph_io.hpp"
#include "hbcm/random.hpp"
#include "oracles.hpp"

using namespace hbcm;

namespace {

std::map<std::size_t, std::size_t> sizes_of(const Hypergraph& h) {
  std::map<std::size_t, std::size_t> out;
  for (std::size_t i = 0; i < h.explicit_edge_count(); ++i) ++out[h.edge(i).size()];
  return out;
}

std::set<std::vector<node_id>> edge_set(const Hypergraph& h) {
  std::set<std::vector<node_id>> out;
  for (std::size_t i = 0; i < h.explicit_edge_count(); ++i) {
    auto e = h.edge(i);
    out.insert({e.begin(), e.end()});
  }
  return out;
}

}  // namespace

TEST(GenComplete, Basics) {
  EXPECT_EQ(gen_complete(3).edge_count(), 4);
  EXPECT_THROW(gen_complete(1), std::invalid_argument);
}

TEST(GenGnm, AllPairs) {
  auto rng = make_rng(1);
  GnmParams p{5, {0, 0, 10}};
  auto h = gen_gnm(p, rng);
  EXPECT_EQ(h.explicit_edge_count(), 10u);
  EXPECT_EQ(edge_set(h).size(), 10u);
}

TEST(GenGnm, CapsAtBinomial) {
  auto rng = make_rng(2);
  GnmParams p{4, {0, 0, 0, 0, 7}};
  auto h = gen_gnm(p, rng);
  ASSERT_EQ(h.explicit_edge_count(), 1u);
  EXPECT_EQ(h.edges()[0], (Hyperedge{0, 1, 2, 3}));
}

TEST(GenGnm, PerSizeCountsAndNoDuplicates) {
  auto rng = make_rng(3);
  GnmParams p{30, {}};
  p.counts_by_size.assign(31, 0);
  p.counts_by_size[2] = 435;  // every pair (dense path)
  p.counts_by_size[3] = 50;   // sparse path
  p.counts_by_size[15] = 80;  // C(30,15) exceeds the dense threshold
  p.counts_by_size[29] = 40;  // capped at 30
  auto h = gen_gnm(p, rng);
  auto sizes = sizes_of(h);
  EXPECT_EQ(sizes[2], 435u);
  EXPECT_EQ(sizes[3], 50u);
  EXPECT_EQ(sizes[15], 80u);
  EXPECT_EQ(sizes[29], 30u);
  EXPECT_EQ(edge_set(h).size(), h.explicit_edge_count());
}

TEST(GenGnm, TriplesAreUniform) {
  // N=6, m3=5: each of the C(6,3)=20 triples should be included with
  // probability 5/20 across repeated generation.
  auto all = oracle::subsets(6, 3);
  std::erase_if(all, [](const auto& s) { return s.size() != 3; });
  std::map<std::vector<node_id>, double> counts;
  auto rng = make_rng(4);
  const int reps = 40000;
  for (int r = 0; r < reps; ++r) {
    auto h = gen_gnm(GnmParams{6, {0, 0, 0, 5}}, rng);
    ASSERT_EQ(h.explicit_edge_count(), 5u);
    for (const auto& e : edge_set(h)) counts[e] += 1;
  }
  std::vector<double> obs;
  for (const auto& s : all) obs.push_back(counts[std::vector<node_id>(s.begin(), s.end())]);
  EXPECT_GT(oracle::chi_square_p(obs, std::vector<double>(20, 1.0 / 20)), 0.001);
}

TEST(Partition, Validates) {
  EXPECT_THROW(Partition({0, 2}), std::invalid_argument);
  auto p = Partition::from_sizes({2, 3});
  EXPECT_EQ(p.node_count(), 5u);
  EXPECT_EQ(p.community_of(2), 1u);
}

TEST(GenHsbm, TwoSingletonsWithMixedPair) {
  auto rng = make_rng(5);
  HsbmParams p{Partition({0, 1}), 1.0, 1.0, std::nullopt};
  auto h = gen_hsbm(p, rng, HsbmMode::explicit_edges);
  ASSERT_EQ(h.explicit_edge_count(), 1u);
  EXPECT_EQ(h.edges()[0], (Hyperedge{0, 1}));
}

TEST(GenHsbm, DisjointHypercliques) {
  auto rng = make_rng(6);
  HsbmParams p{Partition::from_sizes({4, 4}), 1.0, 0.0, std::nullopt};
  auto h = gen_hsbm(p, rng, HsbmMode::explicit_edges);
  EXPECT_EQ(h.explicit_edge_count(), 22u);
  for (const auto& e : h.edges()) {
    bool first = e[0] < 4;
    for (auto v : e) EXPECT_EQ(v < 4, first);
  }
}

TEST(GenHsbm, ImplicitFigureFourConfig) {
  auto rng = make_rng(7);
  HsbmParams p{Partition::from_sizes({500, 500}), 1.0, 1.0, 2u};
  auto h = gen_hsbm(p, rng, HsbmMode::implicit);
  EXPECT_FALSE(h.is_explicit());
  big_count intra = 1;
  intra <<= 500;
  EXPECT_EQ(h.edge_count() - 2 * (intra - 501), 250000);
}

TEST(GenHsbm, UnsupportedCombinations) {
  auto rng = make_rng(8);
  auto part = Partition::from_sizes({3, 3});
  EXPECT_THROW(gen_hsbm({part, 0.5, 0.0, std::nullopt}, rng, HsbmMode::implicit), std::invalid_argument);
  EXPECT_THROW(gen_hsbm({part, 1.0, 0.3, std::nullopt}, rng, HsbmMode::implicit), std::invalid_argument);
  EXPECT_THROW(gen_hsbm({part, 1.0, 0.3, 1u}, rng, HsbmMode::explicit_edges), std::invalid_argument);
  EXPECT_THROW(gen_hsbm({Partition::from_sizes({11, 10}), 1.0, 0.0, std::nullopt}, rng, HsbmMode::explicit_edges),
               std::invalid_argument);
  EXPECT_THROW(gen_hsbm({part, 1.5, 0.0, std::nullopt}, rng, HsbmMode::explicit_edges), std::invalid_argument);
}

TEST(GenHsbm, InclusionFrequencies) {
  // N=6, two communities of 3, M=3: intra kept with p, mixed of size <= 3
  // with q, larger mixed never.
  const double p = 0.7, q = 0.3;
  auto part = Partition::from_sizes({3, 3});
  auto all = oracle::subsets(6);
  std::map<std::vector<node_id>, double> hits;
  auto rng = make_rng(9);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r)
    for (const auto& e : edge_set(gen_hsbm({part, p, q, 3u}, rng, HsbmMode::explicit_edges))) hits[e] += 1;
  for (const auto& s : all) {
    bool intra = true;
    for (auto v : s) intra = intra && (v < 3) == (s[0] < 3);
    double expect = intra ? p : (s.size() <= 3 ? q : 0.0);
    double freq = hits[std::vector<node_id>(s.begin(), s.end())] / reps;
    double se = std::sqrt(expect * (1 - expect) / reps);
    if (expect == 0.0)
      EXPECT_EQ(freq, 0.0);
    else
      EXPECT_NEAR(freq, expect, 3 * se + 1e-12);
  }
}

TEST(HypergraphIo, ParsesSimpleFile) {
  std::istringstream in("0 1\n1 2 3\n");
  auto r = parse_hypergraph(in);
  EXPECT_EQ(r.hypergraph.node_count(), 4u);
  EXPECT_EQ(r.hypergraph.edges(), (std::vector<Hyperedge>{{0, 1}, {1, 2, 3}}));
}

TEST(HypergraphIo, SkipsSmallAndDuplicateLines) {
  std::istringstream in("# header comment\nnodes=8\n5\n0 1\n1 0\n2 2\n3 4 5\n");
  auto r = parse_hypergraph(in);
  EXPECT_EQ(r.skipped_small, 2u);
  EXPECT_EQ(r.skipped_duplicates, 1u);
  EXPECT_EQ(r.hypergraph.node_count(), 8u);
  EXPECT_EQ(r.hypergraph.explicit_edge_count(), 2u);
}

TEST(HypergraphIo, Errors) {
  std::istringstream bad_token("0 x\n");
  EXPECT_THROW(parse_hypergraph(bad_token), format_error);
  std::istringstream out_of_range("nodes=3\n0 3\n");
  try {
    parse_hypergraph(out_of_range);
    FAIL();
  } catch (const format_error& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream late_header("0 1\nnodes=4\n");
  EXPECT_THROW(parse_hypergraph(late_header), format_error);
  EXPECT_THROW(load_hypergraph("/nonexistent/file.txt"), std::runtime_error);
  EXPECT_THROW(save_hypergraph(gen_complete(4), "/tmp/never.txt"), std::logic_error);
}

TEST(HypergraphIo, RoundTrip) {
  auto rng = make_rng(10);
  GnmParams p{40, {0, 0, 30, 20, 10, 5}};
  auto h = gen_gnm(p, rng);
  auto path = std::filesystem::temp_directory_path() / "hbcm_roundtrip.txt";
  save_hypergraph(h, path);
  auto back = load_hypergraph(path).hypergraph;
  std::filesystem::remove(path);
  EXPECT_EQ(back.node_count(), h.node_count());
  EXPECT_EQ(edge_set(back), edge_set(h));
}

TEST(HypergraphIo, RoundTripKeepsIsolatedTrailingNodes) {
  auto h = Hypergraph::from_edges(10, {{0, 1}});
  std::stringstream ss;
  write_hypergraph(h, ss);
  EXPECT_EQ(parse_hypergraph(ss).hypergraph.node_count(), 10u);
}
