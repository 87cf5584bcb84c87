#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

#include "gvfmeta/agent.hpp"
#include "gvfmeta/config.hpp"
#include "gvfmeta/record.hpp"

namespace gvfmeta {

inline std::string record_path(const std::string& out_dir, const std::string& name,
                               std::uint64_t seed) {
  return out_dir + "/" + name + "_seed" + std::to_string(seed) + ".jsonl";
}

inline std::string summary_path(const std::string& out_dir, const std::string& name) {
  return out_dir + "/" + name + "_summary.json";
}

// One full run: one seed, one agent, one environment, one record file.
inline SeedSummary run_single_seed(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::string& out_dir) {
  SeedSummary summary;
  summary.seed = seed;
  std::ofstream out(record_path(out_dir, cfg.name, seed));
  if (!out) throw config_error("cannot open record file for writing in " + out_dir);

  Environment env = cfg.make_env();
  Rng rng(seed);
  Agent agent(cfg.agent, env, &rng);
  agent.begin(env);

  const long long eval_from = cfg.total_steps - cfg.eval_steps;
  std::vector<double> eval_rewards;
  eval_rewards.reserve(static_cast<std::size_t>(cfg.eval_steps));
  std::vector<FeatureVector> abs_omega_sums;
  for (const auto& g : agent.gvfs()) {
    abs_omega_sums.emplace_back(g.meta ? g.mw.omega_c.size() : 0, 0.0);
  }
  double cum_reward = 0.0;

  for (long long t = 0; t < cfg.total_steps; ++t) {
    const bool eval_phase = t >= eval_from;
    StepOutcome outcome = agent.step(env, eval_phase);
    cum_reward += outcome.reward;
    if (eval_phase) eval_rewards.push_back(outcome.reward);

    for (std::size_t i = 0; i < agent.gvfs().size(); ++i) {
      const auto& g = agent.gvfs()[i];
      if (!g.meta) continue;
      for (std::size_t j = 0; j < g.mw.omega_c.size(); ++j) {
        abs_omega_sums[i][j] += std::abs(g.mw.omega_c[j]);
      }
    }

    if (eval_phase || t % cfg.log_cadence == 0) {
      StepRow row;
      row.t = t;
      row.reward = outcome.reward;
      row.action = outcome.action;
      row.delta = outcome.delta;
      row.cum_reward = cum_reward;
      row.v = outcome.v;
      if (t % cfg.meta_log_cadence == 0) {
        for (const auto& g : agent.gvfs()) {
          if (!g.meta) continue;
          row.has_meta = true;
          row.omega_c.push_back(g.mw.omega_c);
          if (g.mw.has_policy_head()) row.omega_pi.push_back(g.mw.omega_pi);
        }
      }
      out << to_json(row).dump() << "\n";
    }
  }

  summary.steps = cfg.total_steps;
  summary.meta_skips = agent.meta_skips();
  const long long report_from = cfg.eval_steps - cfg.report_steps;
  double report_sum = 0.0;
  for (long long i = report_from; i < static_cast<long long>(eval_rewards.size()); ++i) {
    report_sum += eval_rewards[static_cast<std::size_t>(i)];
  }
  summary.mean_eval_reward =
      cfg.report_steps > 0 ? report_sum / static_cast<double>(cfg.report_steps) : 0.0;
  double cum_eval = 0.0;
  for (double r : eval_rewards) cum_eval += r;
  summary.cum_eval_reward = cum_eval;
  const double metric =
      cfg.success_metric == "cum_eval" ? summary.cum_eval_reward : summary.mean_eval_reward;
  summary.success = metric >= cfg.success_threshold;
  for (std::size_t i = 0; i < abs_omega_sums.size(); ++i) {
    FeatureVector mean = abs_omega_sums[i];
    for (double& x : mean) x /= static_cast<double>(cfg.total_steps);
    summary.mean_abs_omega_c.push_back(std::move(mean));
  }
  return summary;
}

// Runs every seed (worker pool), persists per-seed records plus the
// aggregate summary, and returns the aggregate. Per-seed failures are
// recorded in the summary without aborting the sweep.
inline Aggregate run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                unsigned jobs = 0) {
  std::filesystem::create_directories(out_dir);
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cfg.seeds.size()));

  std::vector<SeedSummary> summaries(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cfg.seeds.size()) return;
      const std::uint64_t seed = cfg.seeds[k];
      try {
        summaries[k] = run_single_seed(cfg, seed, out_dir);
      } catch (const std::exception& e) {
        summaries[k].seed = seed;
        summaries[k].aborted = true;
        summaries[k].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  Aggregate agg;
  agg.name = cfg.name;
  agg.seeds = summaries;
  std::vector<double> means, cums;
  int successes = 0;
  for (const SeedSummary& s : summaries) {
    if (s.aborted) continue;
    ++agg.n_seeds;
    means.push_back(s.mean_eval_reward);
    cums.push_back(s.cum_eval_reward);
    if (s.success) ++successes;
  }
  std::tie(agg.mean_eval_mean, agg.mean_eval_sem) = mean_sem(means);
  std::tie(agg.cum_eval_mean, agg.cum_eval_sem) = mean_sem(cums);
  agg.success_rate = agg.n_seeds == 0
                         ? 0.0
                         : static_cast<double>(successes) / static_cast<double>(agg.n_seeds);

  std::ofstream out(summary_path(out_dir, cfg.name));
  out << to_json(agg).dump(2) << "\n";
  return agg;
}

inline void print_aggregate(const Aggregate& agg, std::ostream& os = std::cout) {
  os << agg.name << ": n=" << agg.n_seeds << "  mean eval reward " << agg.mean_eval_mean << " +- "
     << agg.mean_eval_sem << "  cumulative eval reward " << agg.cum_eval_mean << " +- "
     << agg.cum_eval_sem << "  success rate " << agg.success_rate << "\n";
  for (const SeedSummary& s : agg.seeds) {
    if (s.aborted) os << "  seed " << s.seed << " ABORTED: " << s.error << "\n";
  }
}

}  // namespace gvfmeta
