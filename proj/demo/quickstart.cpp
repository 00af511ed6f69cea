// Runs one simulation on a complete hypergraph and one on the sample e-mail
// hypergraph shipped next to this file, and prints the limit clusters.

#include <iostream>

#include "hbcm/hbcm.hpp"

int main(int argc, char** argv) {
  using namespace hbcm;

  SimConfig cfg;
  cfg.c = 1.0;
  cfg.init = InitialDistribution::normal(0.0, 1.2);
  cfg.seed = 2024;
  cfg.condition_first_pick_concordant = true;
  cfg.stop = StopRule::absorbing().with_max_steps(10'000'000);

  auto complete = gen_complete(300);
  auto s = run(complete, cfg);
  std::cout << "complete N=300: " << to_string(s.stop_reason) << " at t*=" << s.t_star << ", "
            << s.clusters.count() << " cluster(s), value " << s.clusters.values.front() << " (initial mean "
            << s.initial_mean << ")\n";

  std::string path = argc > 1 ? argv[1] : "demo/sample_email.txt";
  auto loaded = load_hypergraph(path);
  cfg.init = InitialDistribution::uniform(0.0, 1.0);
  auto e = run(loaded.hypergraph, cfg);
  std::cout << path << ": " << loaded.hypergraph.node_count() << " nodes, "
            << loaded.hypergraph.explicit_edge_count() << " hyperedges; " << to_string(e.stop_reason)
            << " at t*=" << e.t_star << " with " << e.clusters.count() << " cluster(s)\n";
  for (std::size_t i = 0; i < e.clusters.count(); ++i)
    std::cout << "  " << e.clusters.values[i] << " x" << e.clusters.sizes[i] << '\n';
  return 0;
}
