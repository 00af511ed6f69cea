#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hbcm/analysis.hpp"
#include "hbcm/dynamics.hpp"
#include "hbcm/experiment_config.hpp"
#include "hbcm/generators.hpp"
#include "hbcm/hypergraph_io.hpp"
#include "hbcm/parallel.hpp"
#include "hbcm/random.hpp"

namespace hbcm {

/// Stream index reserved for hypergraph generation.
inline constexpr std::uint64_t hypergraph_stream = 0xFFFF'FFFF'FFFF'FFFFull;

inline Partition partition_of(const HypergraphSpec& spec) {
  if (spec.community_sizes.empty()) throw std::invalid_argument("hsbm: community_sizes is empty");
  return Partition::from_sizes(spec.community_sizes);
}

inline Hypergraph build_hypergraph(const HypergraphSpec& spec, std::uint64_t seed) {
  auto rng = make_rng(trial_seed(seed, hypergraph_stream));
  if (spec.generator == "complete") return gen_complete(spec.nodes);
  if (spec.generator == "gnm") {
    GnmParams params{spec.nodes, {}};
    params.counts_by_size.assign(spec.nodes + 1, 0);
    if (spec.profile == "min100") {
      for (std::uint32_t i = 2; i <= spec.nodes; ++i) {
        std::uint64_t total = binomial_u64(spec.nodes, i);
        params.counts_by_size[i] = total == 0 ? 100 : std::min<std::uint64_t>(100, total);
      }
    } else if (!spec.profile.empty()) {
      throw std::invalid_argument("unknown gnm profile '" + spec.profile + "'");
    }
    for (auto [size, m] : spec.counts) {
      if (size < 2 || size > spec.nodes) throw std::invalid_argument("gnm: hyperedge size out of range");
      params.counts_by_size[size] = m;
    }
    return gen_gnm(params, rng);
  }
  if (spec.generator == "hsbm") {
    HsbmParams params{partition_of(spec), spec.p, spec.q, spec.max_mixed_size};
    HsbmMode mode;
    if (spec.mode == "implicit")
      mode = HsbmMode::implicit;
    else if (spec.mode == "explicit")
      mode = HsbmMode::explicit_edges;
    else
      throw std::invalid_argument("hsbm mode must be 'implicit' or 'explicit'");
    return gen_hsbm(params, rng, mode);
  }
  if (spec.generator == "file") {
    if (spec.path.empty()) throw std::invalid_argument("file generator needs a path");
    auto loaded = load_hypergraph(spec.path);
    if (loaded.skipped_small || loaded.skipped_duplicates)
      std::cerr << "warning: " << spec.path << ": skipped " << loaded.skipped_small
                << " hyperedges with fewer than two nodes and " << loaded.skipped_duplicates << " duplicates\n";
    return std::move(loaded.hypergraph);
  }
  throw std::invalid_argument("unknown generator '" + spec.generator + "'");
}

/// Initial opinions: per-community distributions when given, else sim.init.
inline std::vector<double> draw_initial(const ExperimentConfig& cfg, std::size_t n, rng_type& rng) {
  if (cfg.community_init.empty()) return cfg.sim.init.draw(n, rng);
  auto part = partition_of(cfg.hypergraph);
  if (part.node_count() != n) throw std::invalid_argument("community sizes do not match the hypergraph");
  if (cfg.community_init.size() != part.community_count())
    throw std::invalid_argument("community_init needs one distribution per community");
  std::vector<double> x(n);
  for (std::size_t v = 0; v < n; ++v) x[v] = cfg.community_init[part.community_of(v)].draw(1, rng)[0];
  return x;
}

inline SimSummary run_seeded(const ExperimentConfig& cfg, const Hypergraph& h, std::uint64_t seed) {
  SimConfig sim = cfg.sim;
  sim.seed = seed;
  auto rng = make_rng(seed);
  return run_drawn(h, sim, [&](rng_type& r) { return draw_initial(cfg, h.node_count(), r); }, rng);
}

// ---- results ----------------------------------------------------------------

struct CommunityReport {
  double value = 0.0;
  double spread = 0.0;
  bool consensus = false;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t t_star = 0;
  StopReason stop_reason = StopReason::cutoff;
  std::vector<double> cluster_values;
  std::vector<std::size_t> cluster_sizes;
  double initial_mean = 0.0;
  double mean_drift = 0.0;
  std::uint64_t jump_total = 0;
  std::uint64_t updates = 0;
  std::vector<CommunityReport> communities;
  bool absorbing = false;
};

/// Per-community consensus report for a block hypergraph.
inline std::vector<CommunityReport> community_reports(const std::vector<double>& x, const Partition& part,
                                                      double tol) {
  std::vector<CommunityReport> out(part.community_count());
  std::vector<double> lo(out.size(), INFINITY), hi(out.size(), -INFINITY);
  std::vector<KahanSum> sums(out.size());
  for (std::size_t v = 0; v < x.size(); ++v) {
    auto c = part.community_of(v);
    sums[c].add(x[v]);
    lo[c] = std::min(lo[c], x[v]);
    hi[c] = std::max(hi[c], x[v]);
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c].value = sums[c].value() / static_cast<double>(part.sizes()[c]);
    out[c].spread = hi[c] - lo[c];
    out[c].consensus = out[c].spread <= tol;
  }
  return out;
}

inline bool final_state_absorbing(const Hypergraph& h, const std::vector<double>& x, const SimConfig& sim) {
  if (h.is_explicit()) return is_absorbing_explicit(h, x, sim.c);
  auto cs = extract_clusters(x, sim.cluster_tol);
  if (!cs.is_tight()) return false;
  return is_absorbing_clustered(cs, h, sim.c);
}

inline TrialRecord make_record(const ExperimentConfig& cfg, const Hypergraph& h, std::uint64_t trial,
                               std::uint64_t seed, const SimSummary& s) {
  TrialRecord r;
  r.trial = trial;
  r.seed = seed;
  r.t_star = s.t_star;
  r.stop_reason = s.stop_reason;
  r.cluster_values = s.clusters.values;
  r.cluster_sizes = s.clusters.sizes;
  r.initial_mean = s.initial_mean;
  r.mean_drift = s.mean_drift;
  r.jump_total = s.jump_total;
  r.updates = s.updates;
  if (cfg.hypergraph.generator == "hsbm")
    r.communities = community_reports(s.final_state.opinions, partition_of(cfg.hypergraph), cfg.sim.cluster_tol);
  r.absorbing = final_state_absorbing(h, s.final_state.opinions, cfg.sim);
  return r;
}

/// cfg.trials independent runs; trial i uses trial_seed(cfg.seed, i).
inline std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg, const Hypergraph& h) {
  cfg.validate();
  std::vector<TrialRecord> out(cfg.trials);
  parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
    auto seed = trial_seed(cfg.seed, i);
    out[i] = make_record(cfg, h, i, seed, run_seeded(cfg, h, seed));
  });
  return out;
}

struct SweepRow {
  double sigma = 0.0;
  std::uint64_t trial = 0;
  std::uint64_t t_star = 0;
  StopReason stop_reason = StopReason::cutoff;
};

/// Empirical convergence time per (sigma, trial) with sim.init replaced by
/// Normal(0, sigma).
inline std::vector<SweepRow> run_sigma_sweep(const ExperimentConfig& cfg, const Hypergraph& h,
                                             const std::vector<double>& sigmas) {
  cfg.validate();
  const std::size_t per = cfg.trials;
  std::vector<SweepRow> rows(sigmas.size() * per);
  parallel_for(rows.size(), cfg.threads, [&](std::size_t k) {
    std::size_t si = k / per, trial = k % per;
    ExperimentConfig local = cfg;
    local.community_init.clear();
    local.sim.init = InitialDistribution::normal(0.0, sigmas[si]);
    auto seed = trial_seed(trial_seed(cfg.seed, si), trial);
    auto s = run_seeded(local, h, seed);
    rows[k] = {sigmas[si], trial, s.t_star, s.stop_reason};
  });
  return rows;
}

struct EstarResult {
  std::vector<ConcordanceEstimate> a_hat;  // n = 2..n_max
  std::vector<double> expected_size;       // N = 2..n_max
  LinearFit fit;
};

inline EstarResult run_estar(const ExperimentConfig& cfg) {
  const std::uint32_t n_max = cfg.estar.n_max;
  if (n_max < 2) throw std::invalid_argument("estar: n_max must be >= 2");
  EstarResult res;
  res.a_hat.resize(n_max - 1);
  parallel_for(res.a_hat.size(), cfg.threads, [&](std::size_t i) {
    std::uint64_t n = i + 2;
    res.a_hat[i] = concordance_prob_mc_seeded(n, cfg.sim.init, cfg.sim.c, cfg.estar.mc_trials,
                                              trial_seed(cfg.seed, n), 1);
  });
  std::vector<double> a;
  for (const auto& e : res.a_hat) a.push_back(e.a_hat);
  std::vector<double> xs;
  for (std::uint32_t N = 2; N <= n_max; ++N) {
    xs.push_back(N);
    res.expected_size.push_back(expected_first_concordant_size(N, a));
  }
  res.fit = fit_line(xs, res.expected_size);
  return res;
}

struct JumpRow {
  double sigma = 0.0;
  std::uint32_t hypergraph_id = 0;
  double x = 0.0;
  double mean_edge_size = 0.0;
  double mean_j0 = 0.0;
};

struct JumpSigmaSummary {
  double sigma = 0.0;
  LinearFit fit;
  double mean_j0 = 0.0;
  double predicted_slope = 0.0;  // p * a
};

struct JumpResult {
  std::vector<JumpRow> rows;
  std::vector<JumpSigmaSummary> per_sigma;
};

/// Hypergraph l for sigma index s draws x_l ~ U(0,1) (redrawn while the
/// profile has no hyperedges) and runs `trials` one-step trials.
inline JumpResult run_jumps(const ExperimentConfig& cfg) {
  const auto& js = cfg.jumps;
  if (js.nodes < 2 || js.hypergraphs < 1 || js.trials < 1) throw std::invalid_argument("jumps: invalid sizes");
  JumpResult res;
  const std::size_t per = js.hypergraphs;
  res.rows.resize(js.sigmas.size() * per);
  parallel_for(res.rows.size(), cfg.threads, [&](std::size_t k) {
    std::size_t si = k / per, l = k % per;
    auto rng = make_rng(trial_seed(trial_seed(cfg.seed, si), l));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double x;
    std::vector<double> g;
    do {
      x = unit(rng);
      g = power_profile_size_distribution(js.nodes, x);
    } while (mean_size(g) == 0.0);
    auto dist = InitialDistribution::normal(0.0, js.sigmas[si]);
    res.rows[k] = {js.sigmas[si], static_cast<std::uint32_t>(l), x, mean_size(g),
                   mean_first_step_jumps(g, dist, cfg.sim.c, js.trials, rng)};
  });
  for (std::size_t si = 0; si < js.sigmas.size(); ++si) {
    std::vector<double> xs, ys;
    for (std::size_t l = 0; l < per; ++l) {
      xs.push_back(res.rows[si * per + l].mean_edge_size);
      ys.push_back(res.rows[si * per + l].mean_j0);
    }
    double s = js.sigmas[si];
    auto dist = InitialDistribution::normal(0.0, s);
    res.per_sigma.push_back({s, fit_line(xs, ys), kahan_mean(ys),
                             tail_probability(dist, cfg.sim.c) * limiting_concordance(s * s, cfg.sim.c)});
  }
  return res;
}

// ---- output -----------------------------------------------------------------

inline std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

/// Output file that starts with the config echo and master seed.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const ExperimentConfig& cfg, const std::string& header)
      : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# seed=" << cfg.seed << '\n' << "# config=" << to_json(cfg).dump() << '\n' << header << '\n';
  }
  std::ostream& row() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

inline void write_json(const std::filesystem::path& path, const ExperimentConfig& cfg, json body) {
  body["seed"] = cfg.seed;
  body["config"] = to_json(cfg);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline json clusters_json(const std::vector<double>& values, const std::vector<std::size_t>& sizes) {
  json arr = json::array();
  for (std::size_t i = 0; i < values.size(); ++i) arr.push_back({{"value", values[i]}, {"size", sizes[i]}});
  return arr;
}

inline json summary_json(const SimSummary& s) {
  return {{"t_star", s.t_star},
          {"stop_reason", to_string(s.stop_reason)},
          {"clusters", clusters_json(s.clusters.values, s.clusters.sizes)},
          {"initial_mean", s.initial_mean},
          {"final_mean", s.final_mean},
          {"mean_drift", s.mean_drift},
          {"jump_total", s.jump_total},
          {"updates", s.updates},
          {"conditioning_draws", s.conditioning_draws}};
}

inline void write_trajectory(const std::filesystem::path& path, const ExperimentConfig& cfg, const Trajectory& tr) {
  if (cfg.trajectory_format == "wide") {
    std::string header = "t";
    std::size_t n = tr.states.empty() ? 0 : tr.states.front().size();
    for (std::size_t i = 0; i < n; ++i) header += ",x" + std::to_string(i);
    CsvWriter w(path, cfg, header);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      w.row() << tr.times[k];
      for (double v : tr.states[k]) w.row() << ',' << fmt(v);
      w.row() << '\n';
    }
    w.close();
  } else {
    CsvWriter w(path, cfg, "t,node,opinion");
    for (std::size_t k = 0; k < tr.times.size(); ++k)
      for (std::size_t i = 0; i < tr.states[k].size(); ++i)
        w.row() << tr.times[k] << ',' << i << ',' << fmt(tr.states[k][i]) << '\n';
    w.close();
  }
}

inline json trial_json(const TrialRecord& r) {
  json j = {{"trial", r.trial},
            {"seed", r.seed},
            {"t_star", r.t_star},
            {"stop_reason", to_string(r.stop_reason)},
            {"clusters", clusters_json(r.cluster_values, r.cluster_sizes)},
            {"initial_mean", r.initial_mean},
            {"mean_drift", r.mean_drift},
            {"jump_total", r.jump_total},
            {"absorbing", r.absorbing}};
  if (!r.communities.empty()) {
    json cs = json::array();
    for (const auto& c : r.communities)
      cs.push_back({{"value", c.value}, {"spread", c.spread}, {"consensus", c.consensus}});
    j["communities"] = cs;
  }
  return j;
}

// ---- drivers ----------------------------------------------------------------

enum ExitCode : int { exit_ok = 0, exit_error = 1, exit_cutoff = 2 };

inline int write_single_run(const ExperimentConfig& cfg, const Hypergraph& h, const std::filesystem::path& dir) {
  SimConfig sim = cfg.sim;
  sim.seed = cfg.seed;
  auto rng = make_rng(cfg.seed);
  auto s = run_drawn(h, sim, [&](rng_type& r) { return draw_initial(cfg, h.node_count(), r); }, rng);
  if (sim.trajectory.record) write_trajectory(dir / "trajectory.csv", cfg, s.trajectory);
  json body = summary_json(s);
  body["absorbing"] = final_state_absorbing(h, s.final_state.opinions, cfg.sim);
  write_json(dir / "summary.json", cfg, body);
  return s.stop_reason == StopReason::cutoff ? exit_cutoff : exit_ok;
}

inline int write_trials(const ExperimentConfig& cfg, const Hypergraph& h, const std::filesystem::path& dir,
                        const std::string& stem) {
  auto records = run_trials(cfg, h);
  CsvWriter w(dir / (stem + ".csv"), cfg,
              "trial,seed,t_star,stop_reason,clusters,largest_cluster_value,initial_mean,mean_drift,absorbing");
  std::size_t consensus = 0, cutoffs = 0, absorbing = 0;
  json trials = json::array();
  for (const auto& r : records) {
    std::size_t big = std::max_element(r.cluster_sizes.begin(), r.cluster_sizes.end()) - r.cluster_sizes.begin();
    w.row() << r.trial << ',' << r.seed << ',' << r.t_star << ',' << to_string(r.stop_reason) << ','
            << r.cluster_values.size() << ',' << fmt(r.cluster_values[big]) << ',' << fmt(r.initial_mean) << ','
            << fmt(r.mean_drift) << ',' << (r.absorbing ? 1 : 0) << '\n';
    consensus += r.cluster_values.size() == 1 && r.stop_reason != StopReason::cutoff;
    cutoffs += r.stop_reason == StopReason::cutoff;
    absorbing += r.absorbing;
    trials.push_back(trial_json(r));
  }
  w.close();
  write_json(dir / "summary.json", cfg,
             {{"trials", records.size()},
              {"consensus_trials", consensus},
              {"absorbing_trials", absorbing},
              {"cutoff_trials", cutoffs},
              {"per_trial", trials}});
  return cutoffs ? exit_cutoff : exit_ok;
}

inline int write_sweep(const ExperimentConfig& cfg, const Hypergraph& h, const std::filesystem::path& dir) {
  auto grid = cfg.sweep.grid();
  auto rows = run_sigma_sweep(cfg, h, grid);
  CsvWriter w(dir / "sweep.csv", cfg, "sigma,trial,t_star,stop_reason");
  std::map<double, std::vector<double>> converged_t;
  std::map<double, std::size_t> cutoffs;
  for (const auto& r : rows) {
    w.row() << fmt(r.sigma) << ',' << r.trial << ',' << r.t_star << ',' << to_string(r.stop_reason) << '\n';
    if (r.stop_reason == StopReason::cutoff)
      ++cutoffs[r.sigma];
    else
      converged_t[r.sigma].push_back(static_cast<double>(r.t_star));
  }
  w.close();
  json per = json::array();
  for (double s : grid) {
    auto& ts = converged_t[s];
    json row = {{"sigma", s}, {"converged", ts.size()}, {"cutoff", cutoffs[s]}};
    row["median_t_star_converged"] = ts.empty() ? json(nullptr) : json(median(ts));
    per.push_back(row);
  }
  write_json(dir / "summary.json", cfg, {{"per_sigma", per}});
  return exit_ok;
}

inline int write_estar(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  auto res = run_estar(cfg);
  CsvWriter a(dir / "a_hat.csv", cfg, "n,a_hat,std_err,trials");
  for (const auto& e : res.a_hat)
    a.row() << e.n << ',' << fmt(e.a_hat) << ',' << fmt(e.std_err) << ',' << e.trials << '\n';
  a.close();
  CsvWriter w(dir / "estar.csv", cfg, "N,expected_size");
  for (std::size_t i = 0; i < res.expected_size.size(); ++i) w.row() << i + 2 << ',' << fmt(res.expected_size[i]) << '\n';
  w.close();
  write_json(dir / "summary.json", cfg,
             {{"fit", {{"slope", res.fit.slope}, {"intercept", res.fit.intercept}, {"r_squared", res.fit.r_squared}}}});
  return exit_ok;
}

inline int write_jumps(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  auto res = run_jumps(cfg);
  CsvWriter w(dir / "jumps.csv", cfg, "sigma,hypergraph_id,mean_edge_size,mean_J0");
  for (const auto& r : res.rows)
    w.row() << fmt(r.sigma) << ',' << r.hypergraph_id << ',' << fmt(r.mean_edge_size) << ',' << fmt(r.mean_j0) << '\n';
  w.close();
  json per = json::array();
  for (const auto& s : res.per_sigma)
    per.push_back({{"sigma", s.sigma},
                   {"slope", s.fit.slope},
                   {"intercept", s.fit.intercept},
                   {"r_squared", s.fit.r_squared},
                   {"mean_J0", s.mean_j0},
                   {"predicted_slope", s.predicted_slope}});
  write_json(dir / "summary.json", cfg, {{"per_sigma", per}});
  return exit_ok;
}

inline int write_generated(const ExperimentConfig& cfg, const Hypergraph& h, const std::filesystem::path& dir) {
  if (!h.is_explicit()) {
    write_json(dir / "hypergraph.json", cfg,
               {{"nodes", h.node_count()}, {"edge_count", h.edge_count().str()}, {"representation", "implicit"}});
    return exit_ok;
  }
  auto path = dir / "hypergraph.txt";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# seed=" << cfg.seed << '\n' << "# config=" << to_json(cfg).dump() << '\n';
  write_hypergraph(h, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return exit_ok;
}

/// Runs the configured experiment and writes its outputs into cfg.out_dir.
inline int run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::path dir = cfg.out_dir;
  std::filesystem::create_directories(dir);
  switch (cfg.kind) {
    case ExperimentKind::estar_curve: return write_estar(cfg, dir);
    case ExperimentKind::jump_slope: return write_jumps(cfg, dir);
    default: break;
  }
  auto h = build_hypergraph(cfg.hypergraph, cfg.seed);
  switch (cfg.kind) {
    case ExperimentKind::single_run:
    case ExperimentKind::file_run: return write_single_run(cfg, h, dir);
    case ExperimentKind::census: return write_trials(cfg, h, dir, "census");
    case ExperimentKind::polarization: return write_trials(cfg, h, dir, "polarization");
    case ExperimentKind::sigma_sweep: return write_sweep(cfg, h, dir);
    case ExperimentKind::generate: return write_generated(cfg, h, dir);
    default: break;
  }
  throw std::logic_error("unhandled experiment kind");
}

}  // namespace hbcm
