// Acceptance suite: runs each reproduction criterion end to end at its
// stated tolerance and prints one PASS/FAIL line per criterion. Exits with
// the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gvfmeta/bfs_oracle.hpp"
#include "gvfmeta/config.hpp"
#include "gvfmeta/experiment.hpp"
#include "gvfmeta/selfcheck.hpp"

using namespace gvfmeta;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string out_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / "gvfmeta_acceptance" / tag;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

Aggregate run_config(const std::string& path, const std::string& tag, bool paper_steps = false,
                     int num_seeds = 10, long long override_steps = 0) {
  ExperimentConfig cfg = load_experiment_config(path);
  if (paper_steps && cfg.paper_total_steps > 0) cfg.total_steps = cfg.paper_total_steps;
  if (override_steps > 0) {
    cfg.total_steps = override_steps;
    cfg.eval_steps = std::min(cfg.eval_steps, override_steps);
    cfg.report_steps = std::min(cfg.report_steps, cfg.eval_steps);
  }
  cfg.seeds.clear();
  for (int k = 0; k < num_seeds; ++k) cfg.seeds.push_back(static_cast<std::uint64_t>(k));
  cfg.validate();
  return run_experiment(cfg, out_dir(tag), 0);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_1_monsoon_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const Aggregate agg = run_config("configs/monsoon_oracle.json", "monsoon_oracle");
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "mean greedy eval reward " << agg.mean_eval_mean << " (need >= 0.98), " << secs << "s";
  report(1, "Monsoon oracle reproduction", agg.mean_eval_mean >= 0.98 && secs < 60.0, os.str());
}

void criterion_2_monsoon_obs() {
  const auto t0 = std::chrono::steady_clock::now();
  const Aggregate agg = run_config("configs/monsoon_obs.json", "monsoon_obs");
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "mean greedy eval reward " << agg.mean_eval_mean << " (need within [0.40, 0.60]), "
     << secs << "s";
  report(2, "Monsoon obs baseline",
         agg.mean_eval_mean >= 0.40 && agg.mean_eval_mean <= 0.60 && secs < 60.0, os.str());
}

void criterion_3_monsoon_mgd() {
  const auto t0 = std::chrono::steady_clock::now();
  const Aggregate agg =
      run_config("configs/monsoon_mgd.json", "monsoon_mgd", /*paper_steps=*/true, 10);
  const double secs = seconds_since(t0);
  int successes = 0;
  for (const SeedSummary& s : agg.seeds) {
    if (!s.aborted && s.mean_eval_reward >= 0.9) ++successes;
  }
  std::ostringstream os;
  os << successes << "/10 seeds reached mean eval reward >= 0.9 (need >= 7), mean "
     << agg.mean_eval_mean << ", " << secs << "s";
  report(3, "Monsoon MGD headline reproduction", successes >= 7 && secs < 900.0, os.str());
}

void criterion_4_frosthollow_direction(Aggregate& mgd_out) {
  const Aggregate mgd = run_config("configs/frosthollow_mgd.json", "frosthollow_mgd");
  const Aggregate obs = run_config("configs/frosthollow_obs.json", "frosthollow_obs");
  mgd_out = mgd;
  const bool ordered = mgd.cum_eval_mean > obs.cum_eval_mean;
  const bool separated =
      (mgd.cum_eval_mean - mgd.cum_eval_sem) > (obs.cum_eval_mean + obs.cum_eval_sem);
  const bool baseline_low = obs.cum_eval_mean <= 15.0;
  std::ostringstream os;
  os << "desk variant (heat threshold 8, single-step gust, 500k steps): mgd " << mgd.cum_eval_mean << " +- "
     << mgd.cum_eval_sem << " vs obs " << obs.cum_eval_mean << " +- " << obs.cum_eval_sem
     << " (need mgd > obs, non-overlapping SEM, obs <= 15)";
  report(4, "Frost Hollow direction of effect", ordered && separated && baseline_low, os.str());
}

void criterion_5_frosthollow_cumulant(const Aggregate& mgd) {
  FeatureVector mean;
  int n = 0;
  for (const SeedSummary& s : mgd.seeds) {
    if (s.aborted || !s.success || s.mean_abs_omega_c.empty()) continue;
    const FeatureVector& w = s.mean_abs_omega_c[0];
    if (mean.empty()) mean.assign(w.size(), 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) mean[j] += w[j];
    ++n;
  }
  if (n == 0 || mean.empty()) {
    report(5, "Frost Hollow cumulant discovery", false, "no successful MGD seeds to average");
    return;
  }
  for (double& x : mean) x /= n;
  const std::size_t top = argmax(mean);
  std::ostringstream os;
  os << "averaged |omega_c| over " << n << " successful seeds peaks at input " << top
     << " (need 8: accumulated heat); weights:";
  for (double x : mean) os << " " << x;
  report(5, "Frost Hollow cumulant discovery", top == 8, os.str());
}

void criterion_6_echo_fixed_point() {
  const auto t0 = std::chrono::steady_clock::now();
  const CheckResult res = check_echo_fixed_point();
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << res.detail << " (need < 1e-3), " << secs << "s";
  report(6, "Echo GVF analytic fixed point", res.pass && secs < 5.0, os.str());
}

void criterion_7_gradient_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng_mlp(2024), rng_meta(7);
  const double mlp_err = mlp_gradient_check(rng_mlp, 100);
  const double meta_err = meta_gradient_check(rng_meta, 100);
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "mlp max rel err " << mlp_err << ", meta max rel err " << meta_err
     << " (need both < 1e-4), " << secs << "s";
  report(7, "Gradient oracles vs finite differences",
         mlp_err < 1e-4 && meta_err < 1e-4 && secs < 10.0, os.str());
}

void criterion_8_frosthollow_bfs() {
  FrostHollow::Params p;
  const int n_states = p.walk_length * (p.heat_threshold + 1) * p.period;
  const int bfs = bfs_min_steps_to_reward(p);
  std::ostringstream os;
  os << "BFS over " << n_states << " states gives min steps " << bfs << " (criterion demands 50)";
  report(8, "Frost Hollow BFS oracle", bfs == 50, os.str());
}

void criterion_9_determinism() {
  bool ok = true;
  std::ostringstream os;
  const struct {
    const char* config;
    long long steps;
  } cases[] = {{"configs/monsoon_mgd.json", 20000}, {"configs/frosthollow_mgd.json", 5000}};
  for (const auto& c : cases) {
    const Aggregate a1 = run_config(c.config, "det_a", false, 1, c.steps);
    const std::string dir_a =
        (std::filesystem::temp_directory_path() / "gvfmeta_acceptance" / "det_a").string();
    const std::string bytes1 = slurp(record_path(dir_a, a1.name, 0));
    const Aggregate a2 = run_config(c.config, "det_b", false, 1, c.steps);
    const std::string dir_b =
        (std::filesystem::temp_directory_path() / "gvfmeta_acceptance" / "det_b").string();
    const std::string bytes2 = slurp(record_path(dir_b, a2.name, 0));
    const bool same = !bytes1.empty() && bytes1 == bytes2;
    ok = ok && same;
    os << a1.name << (same ? " byte-identical" : " MISMATCH") << " (" << bytes1.size()
       << " bytes); ";
  }
  report(9, "Determinism of record files", ok, os.str());
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  try {
    criterion_1_monsoon_oracle();
    criterion_2_monsoon_obs();
    criterion_3_monsoon_mgd();
    Aggregate fh_mgd;
    criterion_4_frosthollow_direction(fh_mgd);
    criterion_5_frosthollow_cumulant(fh_mgd);
    criterion_6_echo_fixed_point();
    criterion_7_gradient_oracles();
    criterion_8_frosthollow_bfs();
    criterion_9_determinism();
  } catch (const std::exception& e) {
    std::printf("[FAIL] suite aborted: %s\n", e.what());
    ++g_failures;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
