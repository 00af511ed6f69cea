#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hbcm/dynamics.hpp"

namespace hbcm {

using json = nlohmann::json;

enum class ExperimentKind { single_run, census, sigma_sweep, estar_curve, jump_slope, polarization, file_run, generate };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::single_run: return "single-run";
    case ExperimentKind::census: return "consensus-census";
    case ExperimentKind::sigma_sweep: return "sigma-sweep";
    case ExperimentKind::estar_curve: return "estar-curve";
    case ExperimentKind::jump_slope: return "jump-slope";
    case ExperimentKind::polarization: return "polarization";
    case ExperimentKind::file_run: return "file-run";
    case ExperimentKind::generate: return "generate";
  }
  return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::single_run, ExperimentKind::census, ExperimentKind::sigma_sweep,
                 ExperimentKind::estar_curve, ExperimentKind::jump_slope, ExperimentKind::polarization,
                 ExperimentKind::file_run, ExperimentKind::generate})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown experiment kind '" + s + "'");
}

/// How to build the hypergraph.
///   generator "complete": nodes
///   generator "gnm":      nodes + counts {size: m} or profile "min100" (m_i = min(100, C(N,i)))
///   generator "hsbm":     community_sizes, p, q, optional max_mixed_size, mode
///   generator "file":     path
struct HypergraphSpec {
  std::string generator = "complete";
  std::uint32_t nodes = 0;
  std::map<std::uint32_t, std::uint64_t> counts;
  std::string profile;
  std::vector<std::uint32_t> community_sizes;
  double p = 1.0;
  double q = 0.0;
  std::optional<std::uint32_t> max_mixed_size;
  std::string mode = "implicit";
  std::string path;
};

struct SweepSpec {
  double sigma_min = 0.9;
  double sigma_max = 1.1;
  double sigma_step = 0.004;

  std::vector<double> grid() const {
    if (!(sigma_step > 0.0) || !(sigma_min > 0.0) || sigma_max < sigma_min)
      throw std::invalid_argument("sweep grid needs 0 < sigma_min <= sigma_max and step > 0");
    std::vector<double> out;
    auto steps = static_cast<std::size_t>(std::floor((sigma_max - sigma_min) / sigma_step + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) out.push_back(sigma_min + static_cast<double>(i) * sigma_step);
    return out;
  }
};

struct EstarSpec {
  std::uint32_t n_max = 500;
  std::uint64_t mc_trials = 10000;
};

struct JumpSpec {
  std::uint32_t nodes = 300;
  std::uint32_t hypergraphs = 200;
  std::uint64_t trials = 200;
  std::vector<double> sigmas = {0.6, 0.8, 1.0, 1.2};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::single_run;
  std::uint64_t seed = 1;
  HypergraphSpec hypergraph;
  SimConfig sim;
  /// Per-community initial distributions (HSBM only); overrides sim.init.
  std::vector<InitialDistribution> community_init;
  std::string trajectory_format = "long";
  std::uint64_t trials = 1;
  SweepSpec sweep;
  EstarSpec estar;
  JumpSpec jumps;
  // Execution settings; they do not affect results and are not echoed.
  unsigned threads = 0;
  std::string out_dir = ".";
  bool paper_scale = false;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (trajectory_format != "long" && trajectory_format != "wide")
      throw std::invalid_argument("trajectory_format must be 'long' or 'wide'");
    if (kind != ExperimentKind::estar_curve && kind != ExperimentKind::jump_slope &&
        kind != ExperimentKind::generate)
      sim.validate();
  }
};

// ---- JSON ----------------------------------------------------------------

inline json to_json(const InitialDistribution& d) {
  auto [p1, p2] = d.params();
  if (d.kind() == InitialDistribution::Kind::uniform) return {{"kind", "uniform"}, {"a", p1}, {"b", p2}};
  return {{"kind", "normal"}, {"mu", p1}, {"sigma", p2}};
}

inline InitialDistribution distribution_from_json(const json& j) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return InitialDistribution::uniform(j.at("a").get<double>(), j.at("b").get<double>());
  if (kind == "normal") return InitialDistribution::normal(j.value("mu", 0.0), j.at("sigma").get<double>());
  throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

inline json to_json(const StopRule& s) {
  json j = json::object();
  if (s.absorbing_every) j["absorbing_every"] = *s.absorbing_every;
  if (s.discordance_below) j["discordance_below"] = *s.discordance_below;
  if (s.max_steps) j["max_steps"] = *s.max_steps;
  return j;
}

inline StopRule stop_rule_from_json(const json& j) {
  StopRule s;
  if (j.contains("absorbing_every")) s.absorbing_every = j["absorbing_every"].get<std::uint64_t>();
  if (j.contains("discordance_below")) s.discordance_below = j["discordance_below"].get<double>();
  if (j.contains("max_steps")) s.max_steps = j["max_steps"].get<std::uint64_t>();
  return s;
}

inline json to_json(const HypergraphSpec& h) {
  json j = {{"generator", h.generator}};
  if (h.generator == "complete" || h.generator == "gnm") j["nodes"] = h.nodes;
  if (h.generator == "gnm") {
    if (!h.profile.empty()) j["profile"] = h.profile;
    json counts = json::object();
    for (auto [size, m] : h.counts) counts[std::to_string(size)] = m;
    if (!h.counts.empty()) j["counts"] = counts;
  }
  if (h.generator == "hsbm") {
    j["community_sizes"] = h.community_sizes;
    j["p"] = h.p;
    j["q"] = h.q;
    if (h.max_mixed_size) j["max_mixed_size"] = *h.max_mixed_size;
    j["mode"] = h.mode;
  }
  if (h.generator == "file") j["path"] = h.path;
  return j;
}

inline HypergraphSpec hypergraph_spec_from_json(const json& j) {
  HypergraphSpec h;
  h.generator = j.value("generator", std::string("complete"));
  h.nodes = j.value("nodes", 0u);
  h.profile = j.value("profile", std::string());
  if (j.contains("counts"))
    for (auto& [k, v] : j["counts"].items()) h.counts[static_cast<std::uint32_t>(std::stoul(k))] = v.get<std::uint64_t>();
  if (j.contains("community_sizes")) h.community_sizes = j["community_sizes"].get<std::vector<std::uint32_t>>();
  h.p = j.value("p", 1.0);
  h.q = j.value("q", 0.0);
  if (j.contains("max_mixed_size")) h.max_mixed_size = j["max_mixed_size"].get<std::uint32_t>();
  h.mode = j.value("mode", std::string("implicit"));
  h.path = j.value("path", std::string());
  return h;
}

/// Config echo written into every output. Execution-only settings (threads,
/// output directory) are left out so outputs are identical across them.
inline json to_json(const ExperimentConfig& cfg) {
  json model = {{"c", cfg.sim.c},
                {"alpha", cfg.sim.alpha},
                {"init", to_json(cfg.sim.init)},
                {"stop", to_json(cfg.sim.stop)},
                {"condition_first_pick_concordant", cfg.sim.condition_first_pick_concordant},
                {"zero_tol", cfg.sim.zero_tol},
                {"cluster_tol", cfg.sim.cluster_tol}};
  if (!cfg.community_init.empty()) {
    json ci = json::array();
    for (const auto& d : cfg.community_init) ci.push_back(to_json(d));
    model["community_init"] = ci;
  }
  json j = {{"kind", to_string(cfg.kind)},
            {"seed", cfg.seed},
            {"hypergraph", to_json(cfg.hypergraph)},
            {"model", model},
            {"trials", cfg.trials},
            {"paper_scale", cfg.paper_scale},
            {"trajectory", {{"record", cfg.sim.trajectory.record},
                            {"stride", cfg.sim.trajectory.stride},
                            {"target", cfg.sim.trajectory.target},
                            {"format", cfg.trajectory_format}}}};
  if (cfg.kind == ExperimentKind::sigma_sweep)
    j["sweep"] = {{"sigma_min", cfg.sweep.sigma_min}, {"sigma_max", cfg.sweep.sigma_max},
                  {"sigma_step", cfg.sweep.sigma_step}};
  if (cfg.kind == ExperimentKind::estar_curve)
    j["estar"] = {{"n_max", cfg.estar.n_max}, {"mc_trials", cfg.estar.mc_trials}};
  if (cfg.kind == ExperimentKind::jump_slope)
    j["jumps"] = {{"nodes", cfg.jumps.nodes}, {"hypergraphs", cfg.jumps.hypergraphs},
                  {"trials", cfg.jumps.trials}, {"sigmas", cfg.jumps.sigmas}};
  return j;
}

/// Fields missing from `j` keep the values already in `cfg`.
inline void apply_json(ExperimentConfig& cfg, const json& j) {
  if (j.contains("kind")) cfg.kind = parse_kind(j["kind"].get<std::string>());
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("hypergraph")) cfg.hypergraph = hypergraph_spec_from_json(j["hypergraph"]);
  if (j.contains("model")) {
    const auto& m = j["model"];
    cfg.sim.c = m.value("c", cfg.sim.c);
    cfg.sim.alpha = m.value("alpha", cfg.sim.alpha);
    if (m.contains("init")) cfg.sim.init = distribution_from_json(m["init"]);
    if (m.contains("stop")) cfg.sim.stop = stop_rule_from_json(m["stop"]);
    cfg.sim.condition_first_pick_concordant =
        m.value("condition_first_pick_concordant", cfg.sim.condition_first_pick_concordant);
    cfg.sim.zero_tol = m.value("zero_tol", cfg.sim.zero_tol);
    cfg.sim.cluster_tol = m.value("cluster_tol", cfg.sim.cluster_tol);
    if (m.contains("community_init")) {
      cfg.community_init.clear();
      for (const auto& d : m["community_init"]) cfg.community_init.push_back(distribution_from_json(d));
    }
  }
  cfg.trials = j.value("trials", cfg.trials);
  cfg.paper_scale = j.value("paper_scale", cfg.paper_scale);
  if (j.contains("trajectory")) {
    const auto& t = j["trajectory"];
    cfg.sim.trajectory.record = t.value("record", cfg.sim.trajectory.record);
    cfg.sim.trajectory.stride = t.value("stride", cfg.sim.trajectory.stride);
    cfg.sim.trajectory.target = t.value("target", cfg.sim.trajectory.target);
    cfg.trajectory_format = t.value("format", cfg.trajectory_format);
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    cfg.sweep.sigma_min = s.value("sigma_min", cfg.sweep.sigma_min);
    cfg.sweep.sigma_max = s.value("sigma_max", cfg.sweep.sigma_max);
    cfg.sweep.sigma_step = s.value("sigma_step", cfg.sweep.sigma_step);
  }
  if (j.contains("estar")) {
    cfg.estar.n_max = j["estar"].value("n_max", cfg.estar.n_max);
    cfg.estar.mc_trials = j["estar"].value("mc_trials", cfg.estar.mc_trials);
  }
  if (j.contains("jumps")) {
    const auto& s = j["jumps"];
    cfg.jumps.nodes = s.value("nodes", cfg.jumps.nodes);
    cfg.jumps.hypergraphs = s.value("hypergraphs", cfg.jumps.hypergraphs);
    cfg.jumps.trials = s.value("trials", cfg.jumps.trials);
    if (s.contains("sigmas")) cfg.jumps.sigmas = s["sigmas"].get<std::vector<double>>();
  }
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

// ---- presets --------------------------------------------------------------

inline constexpr std::uint64_t desk_cutoff = 10'000'000;

/// Named experiment presets. Desk scale by default; `paper_scale` selects
/// the full sizes and trial counts.
inline ExperimentConfig preset(const std::string& name, bool paper_scale = false) {
  ExperimentConfig cfg;
  cfg.paper_scale = paper_scale;
  cfg.sim.c = 1.0;
  cfg.sim.stop = StopRule::absorbing().with_max_steps(desk_cutoff);
  if (name == "fig1") {
    cfg.kind = ExperimentKind::single_run;
    cfg.hypergraph.generator = "complete";
    cfg.hypergraph.nodes = 500;
    cfg.sim.init = InitialDistribution::normal(0.0, 1.2);
    cfg.sim.condition_first_pick_concordant = true;
    cfg.sim.trajectory.record = true;
  } else if (name == "census") {
    cfg.kind = ExperimentKind::census;
    cfg.hypergraph.generator = "complete";
    cfg.hypergraph.nodes = 200;
    cfg.sim.init = InitialDistribution::normal(0.0, 1.2);
    cfg.trials = paper_scale ? 1000 : 100;
  } else if (name == "fig5a" || name == "fig5b") {
    cfg.kind = ExperimentKind::single_run;
    cfg.hypergraph.generator = "gnm";
    cfg.hypergraph.nodes = 1000;
    cfg.hypergraph.profile = "min100";
    cfg.sim.init = name == "fig5a" ? InitialDistribution::uniform(-2.0, 2.0) : InitialDistribution::normal(0.0, 1.2);
    cfg.sim.trajectory.record = true;
  } else if (name == "enron") {
    cfg.kind = ExperimentKind::file_run;
    cfg.hypergraph.generator = "file";
    cfg.sim.init = InitialDistribution::uniform(0.0, 1.0);
    cfg.sim.trajectory.record = true;
  } else if (name == "fig2") {
    cfg.kind = ExperimentKind::estar_curve;
    cfg.sim.init = InitialDistribution::normal(0.0, 1.2);
    cfg.estar = {500, 10000};
  } else if (name == "fig3") {
    cfg.kind = ExperimentKind::sigma_sweep;
    cfg.hypergraph.generator = "complete";
    cfg.hypergraph.nodes = paper_scale ? 50000 : 2000;
    cfg.trials = 20;
    cfg.sweep = {0.9, 1.1, 0.004};
    cfg.sim.stop = StopRule::global_discordance(1e-5).with_max_steps(paper_scale ? 10000 : 1'000'000);
  } else if (name == "fig4") {
    cfg.kind = ExperimentKind::polarization;
    cfg.hypergraph.generator = "hsbm";
    cfg.hypergraph.community_sizes = {500, 500};
    cfg.hypergraph.p = 1.0;
    cfg.hypergraph.q = 1.0;
    cfg.hypergraph.max_mixed_size = 2;
    cfg.community_init = {InitialDistribution::uniform(1.8, 2.2), InitialDistribution::uniform(-2.2, -1.8)};
    cfg.sim.stop = StopRule::absorbing(1).with_max_steps(desk_cutoff);
    cfg.trials = paper_scale ? 1 : 100;
  } else if (name == "fig6") {
    cfg.kind = ExperimentKind::jump_slope;
    cfg.jumps = {paper_scale ? 1000u : 300u, 200, paper_scale ? 500u : 200u, {0.6, 0.8, 1.0, 1.2}};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return cfg;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig1", "census", "fig2", "fig3", "fig4",
                                                 "fig5a", "fig5b", "fig6", "enron"};
  return names;
}

}  // namespace hbcm
