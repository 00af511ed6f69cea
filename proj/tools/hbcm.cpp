// hbcm: run the hypergraph bounded-confidence experiments from presets or
// JSON configs. Exit codes: 0 success, 1 error, 2 cutoff without convergence.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hbcm/hbcm.hpp"

namespace {

using namespace hbcm;

InitialDistribution parse_init(const std::string& s) {
  // "normal:MU,SIGMA" or "uniform:A,B"
  auto colon = s.find(':');
  auto comma = s.find(',');
  if (colon == std::string::npos || comma == std::string::npos || comma < colon)
    throw std::invalid_argument("--init expects normal:MU,SIGMA or uniform:A,B");
  auto kind = s.substr(0, colon);
  double first = std::stod(s.substr(colon + 1, comma - colon - 1));
  double second = std::stod(s.substr(comma + 1));
  if (kind == "normal") return InitialDistribution::normal(first, second);
  if (kind == "uniform") return InitialDistribution::uniform(first, second);
  throw std::invalid_argument("unknown distribution '" + kind + "'");
}

std::map<std::uint32_t, std::uint64_t> parse_counts(const std::string& s) {
  // "2:10,3:5"
  std::map<std::uint32_t, std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--counts expects SIZE:COUNT[,SIZE:COUNT...]");
    out[static_cast<std::uint32_t>(std::stoul(item.substr(0, colon)))] = std::stoull(item.substr(colon + 1));
  }
  return out;
}

std::vector<std::uint32_t> parse_sizes(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  return out;
}

struct Overrides {
  std::string preset;
  std::optional<std::uint32_t> nodes;
  std::optional<double> c;
  std::string init;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> max_steps;
  std::string hypergraph_file;
  std::string trajectory_format;
  bool no_trajectory = false;
  bool condition_first_pick = false;
  // sweep
  std::optional<double> sigma_min, sigma_max, sigma_step;
  // estar
  std::optional<std::uint32_t> n_max;
  std::optional<std::uint64_t> mc_trials;
  // jumps
  std::optional<std::uint32_t> hypergraphs;
  // generate / hsbm
  std::string generator, counts, profile, communities, mode;
  std::optional<double> p, q;
  std::optional<std::uint32_t> max_mixed_size;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded-confidence opinion dynamics on hypergraphs"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string config_path, out_dir = "out";
  unsigned threads = 0;
  bool paper_scale = false;
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--config", config_path, "JSON config; flags override its fields")->check(CLI::ExistingFile);
  app.add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = all cores); results do not depend on it");
  app.add_flag("--paper-scale", paper_scale, "Use the full experiment sizes (slow)");

  Overrides ov;
  auto model_opts = [&](CLI::App* sub) {
    sub->add_option("--preset", ov.preset, "Preset name");
    sub->add_option("--nodes,-N", ov.nodes, "Number of nodes");
    sub->add_option("--c", ov.c, "Confidence bound");
    sub->add_option("--init", ov.init, "Initial distribution: normal:MU,SIGMA or uniform:A,B");
    sub->add_option("--max-steps", ov.max_steps, "Step cutoff");
  };

  auto* run = app.add_subcommand("run", "Single simulation (trajectory CSV + summary JSON)");
  model_opts(run);
  run->add_option("--hypergraph", ov.hypergraph_file, "Hypergraph file (one hyperedge per line)")
      ->check(CLI::ExistingFile);
  run->add_option("--trajectory-format", ov.trajectory_format, "long or wide");
  run->add_flag("--no-trajectory", ov.no_trajectory, "Skip the trajectory CSV");
  run->add_flag("--condition-first-pick", ov.condition_first_pick, "Redraw x(0) and the time-0 hyperedge until that hyperedge is concordant");

  auto* census = app.add_subcommand("census", "Repeated runs; counts consensus outcomes");
  model_opts(census);
  census->add_option("--trials", ov.trials, "Number of trials");

  auto* sweep = app.add_subcommand("sweep-sigma", "Convergence time over a grid of sigma");
  model_opts(sweep);
  sweep->add_option("--trials", ov.trials, "Trials per sigma");
  sweep->add_option("--sigma-min", ov.sigma_min);
  sweep->add_option("--sigma-max", ov.sigma_max);
  sweep->add_option("--sigma-step", ov.sigma_step);

  auto* estar = app.add_subcommand("estar", "Expected size of the first concordant hyperedge");
  estar->add_option("--c", ov.c, "Confidence bound");
  estar->add_option("--init", ov.init, "Opinion distribution");
  estar->add_option("--n-max", ov.n_max, "Largest N");
  estar->add_option("--mc-trials", ov.mc_trials, "Monte Carlo samples per size");

  auto* jumps = app.add_subcommand("jumps", "Opinion jumps in the first step vs mean hyperedge size");
  jumps->add_option("--nodes,-N", ov.nodes, "Number of nodes");
  jumps->add_option("--c", ov.c, "Confidence bound");
  jumps->add_option("--hypergraphs", ov.hypergraphs, "Hypergraphs per sigma");
  jumps->add_option("--trials", ov.trials, "One-step trials per hypergraph");

  auto* polar = app.add_subcommand("polarization", "Runs on a block hypergraph; per-community report");
  model_opts(polar);
  polar->add_option("--trials", ov.trials, "Number of trials");
  polar->add_option("--communities", ov.communities, "Community sizes, e.g. 500,500");
  polar->add_option("--q", ov.q, "Inter-community inclusion probability (0 or 1)");
  polar->add_option("--max-mixed-size,-M", ov.max_mixed_size, "Largest inter-community hyperedge");

  auto* gen = app.add_subcommand("generate", "Build a hypergraph and write it out");
  gen->add_option("--generator", ov.generator, "complete, gnm or hsbm")->required();
  gen->add_option("--nodes,-N", ov.nodes, "Number of nodes");
  gen->add_option("--counts", ov.counts, "G(N,m) counts, e.g. 2:10,3:5");
  gen->add_option("--profile", ov.profile, "G(N,m) profile (min100)");
  gen->add_option("--communities", ov.communities, "HSBM community sizes");
  gen->add_option("--p", ov.p);
  gen->add_option("--q", ov.q);
  gen->add_option("--max-mixed-size,-M", ov.max_mixed_size);
  gen->add_option("--mode", ov.mode, "implicit or explicit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_error;
  }

  try {
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    std::string default_preset = name == "run"            ? "fig1"
                                 : name == "census"       ? "census"
                                 : name == "sweep-sigma"  ? "fig3"
                                 : name == "estar"        ? "fig2"
                                 : name == "jumps"        ? "fig6"
                                 : name == "polarization" ? "fig4"
                                                          : "";
    std::string preset_name = ov.preset.empty() ? default_preset : ov.preset;
    if (name == "run" && ov.preset.empty() && !ov.hypergraph_file.empty()) preset_name = "enron";
    ExperimentConfig cfg = preset_name.empty() ? ExperimentConfig{} : preset(preset_name, paper_scale);
    if (name == "generate") cfg.kind = ExperimentKind::generate;

    if (!config_path.empty()) {
      std::ifstream in(config_path);
      apply_json(cfg, json::parse(in, nullptr, true, true));
    }

    if (seed) cfg.seed = *seed;
    cfg.threads = threads;
    cfg.out_dir = out_dir;
    cfg.paper_scale = cfg.paper_scale || paper_scale;
    if (ov.nodes) {
      cfg.hypergraph.nodes = *ov.nodes;
      cfg.jumps.nodes = *ov.nodes;
    }
    if (ov.c) cfg.sim.c = *ov.c;
    if (!ov.init.empty()) {
      cfg.sim.init = parse_init(ov.init);
      cfg.community_init.clear();
    }
    if (ov.trials) {
      cfg.trials = *ov.trials;
      cfg.jumps.trials = *ov.trials;
    }
    if (ov.max_steps) cfg.sim.stop.max_steps = *ov.max_steps;
    if (!ov.hypergraph_file.empty()) {
      cfg.kind = ExperimentKind::file_run;
      cfg.hypergraph = {};
      cfg.hypergraph.generator = "file";
      cfg.hypergraph.path = ov.hypergraph_file;
    }
    if (!ov.trajectory_format.empty()) cfg.trajectory_format = ov.trajectory_format;
    if (ov.no_trajectory) cfg.sim.trajectory.record = false;
    if (ov.condition_first_pick) cfg.sim.condition_first_pick_concordant = true;
    if (ov.sigma_min) cfg.sweep.sigma_min = *ov.sigma_min;
    if (ov.sigma_max) cfg.sweep.sigma_max = *ov.sigma_max;
    if (ov.sigma_step) cfg.sweep.sigma_step = *ov.sigma_step;
    if (ov.n_max) cfg.estar.n_max = *ov.n_max;
    if (ov.mc_trials) cfg.estar.mc_trials = *ov.mc_trials;
    if (ov.hypergraphs) cfg.jumps.hypergraphs = *ov.hypergraphs;
    if (!ov.generator.empty()) cfg.hypergraph.generator = ov.generator;
    if (!ov.counts.empty()) cfg.hypergraph.counts = parse_counts(ov.counts);
    if (!ov.profile.empty()) cfg.hypergraph.profile = ov.profile;
    if (!ov.communities.empty()) cfg.hypergraph.community_sizes = parse_sizes(ov.communities);
    if (ov.p) cfg.hypergraph.p = *ov.p;
    if (ov.q) cfg.hypergraph.q = *ov.q;
    if (ov.max_mixed_size) cfg.hypergraph.max_mixed_size = *ov.max_mixed_size;
    if (!ov.mode.empty()) cfg.hypergraph.mode = ov.mode;

    if (cfg.kind == ExperimentKind::file_run && cfg.hypergraph.path.empty())
      throw std::invalid_argument("the enron preset needs --hypergraph FILE");
    if (cfg.paper_scale)
      std::cerr << "warning: --paper-scale uses the full sizes; expect hours of runtime "
                   "(convergence time grows exponentially in N when sigma^2 > c)\n";

    int code = run_experiment(cfg);
    std::cerr << to_string(cfg.kind) << ": wrote outputs to " << cfg.out_dir << '\n';
    if (code == exit_cutoff) std::cerr << "warning: step cutoff reached before convergence\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  }
}
