#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// One logged step. Training-phase steps are logged at the configured
// cadence; evaluation-phase steps are logged every step so the summary can
// be recomputed exactly from the persisted rows. Meta-weight snapshots ride
// along at their own cadence.
struct StepRow {
  long long t = 0;
  double reward = 0.0;
  int action = 0;
  double delta = 0.0;
  double cum_reward = 0.0;  // running total from step 0
  FeatureVector v;
  bool has_meta = false;
  std::vector<FeatureVector> omega_c;
  std::vector<FeatureVector> omega_pi;
};

struct SeedSummary {
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string error;
  long long steps = 0;
  double mean_eval_reward = 0.0;  // over the trailing report window
  double cum_eval_reward = 0.0;   // over the whole evaluation phase
  bool success = false;
  long long meta_skips = 0;
  // Per GVF, the running mean of |omega_c| over the whole run.
  std::vector<FeatureVector> mean_abs_omega_c;
};

struct Aggregate {
  std::string name;
  int n_seeds = 0;  // non-aborted
  double mean_eval_mean = 0.0, mean_eval_sem = 0.0;
  double cum_eval_mean = 0.0, cum_eval_sem = 0.0;
  double success_rate = 0.0;
  std::vector<SeedSummary> seeds;
};

inline nlohmann::json to_json(const StepRow& r) {
  nlohmann::json j;
  j["t"] = r.t;
  j["r"] = r.reward;
  j["a"] = r.action;
  j["delta"] = r.delta;
  j["cum_r"] = r.cum_reward;
  j["v"] = r.v;
  if (r.has_meta) {
    j["omega_c"] = r.omega_c;
    if (!r.omega_pi.empty()) j["omega_pi"] = r.omega_pi;
  }
  return j;
}

inline StepRow step_row_from_json(const nlohmann::json& j) {
  StepRow r;
  r.t = j.at("t").get<long long>();
  r.reward = j.at("r").get<double>();
  r.action = j.at("a").get<int>();
  r.delta = j.at("delta").get<double>();
  r.cum_reward = j.at("cum_r").get<double>();
  r.v = j.at("v").get<FeatureVector>();
  if (j.contains("omega_c")) {
    r.has_meta = true;
    r.omega_c = j.at("omega_c").get<std::vector<FeatureVector>>();
    if (j.contains("omega_pi")) r.omega_pi = j.at("omega_pi").get<std::vector<FeatureVector>>();
  }
  return r;
}

inline nlohmann::json to_json(const SeedSummary& s) {
  nlohmann::json j;
  j["seed"] = s.seed;
  j["aborted"] = s.aborted;
  if (s.aborted) j["error"] = s.error;
  j["steps"] = s.steps;
  j["mean_eval_reward"] = s.mean_eval_reward;
  j["cum_eval_reward"] = s.cum_eval_reward;
  j["success"] = s.success;
  j["meta_skips"] = s.meta_skips;
  j["mean_abs_omega_c"] = s.mean_abs_omega_c;
  return j;
}

inline SeedSummary seed_summary_from_json(const nlohmann::json& j) {
  SeedSummary s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.aborted = j.at("aborted").get<bool>();
  if (j.contains("error")) s.error = j.at("error").get<std::string>();
  s.steps = j.at("steps").get<long long>();
  s.mean_eval_reward = j.at("mean_eval_reward").get<double>();
  s.cum_eval_reward = j.at("cum_eval_reward").get<double>();
  s.success = j.at("success").get<bool>();
  s.meta_skips = j.at("meta_skips").get<long long>();
  s.mean_abs_omega_c = j.at("mean_abs_omega_c").get<std::vector<FeatureVector>>();
  return s;
}

inline nlohmann::json to_json(const Aggregate& a) {
  nlohmann::json j;
  j["name"] = a.name;
  j["n_seeds"] = a.n_seeds;
  j["mean_eval_reward"] = {{"mean", a.mean_eval_mean}, {"sem", a.mean_eval_sem}};
  j["cum_eval_reward"] = {{"mean", a.cum_eval_mean}, {"sem", a.cum_eval_sem}};
  j["success_rate"] = a.success_rate;
  nlohmann::json seeds = nlohmann::json::array();
  for (const SeedSummary& s : a.seeds) seeds.push_back(to_json(s));
  j["seeds"] = seeds;
  return j;
}

inline Aggregate aggregate_from_json(const nlohmann::json& j) {
  Aggregate a;
  a.name = j.at("name").get<std::string>();
  a.n_seeds = j.at("n_seeds").get<int>();
  a.mean_eval_mean = j.at("mean_eval_reward").at("mean").get<double>();
  a.mean_eval_sem = j.at("mean_eval_reward").at("sem").get<double>();
  a.cum_eval_mean = j.at("cum_eval_reward").at("mean").get<double>();
  a.cum_eval_sem = j.at("cum_eval_reward").at("sem").get<double>();
  a.success_rate = j.at("success_rate").get<double>();
  for (const auto& js : j.at("seeds")) a.seeds.push_back(seed_summary_from_json(js));
  return a;
}

inline std::vector<StepRow> read_record_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open record file: " + path);
  std::vector<StepRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(step_row_from_json(nlohmann::json::parse(line)));
  }
  return rows;
}

// Mean and standard error of the mean (sample standard deviation over
// sqrt(n); 0 when fewer than two values).
inline std::pair<double, double> mean_sem(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return {mean, sd / std::sqrt(static_cast<double>(xs.size()))};
}

// Fraction of non-aborted seeds whose mean eval reward clears the threshold.
inline double success_rate(const std::vector<SeedSummary>& seeds, double threshold = 0.9) {
  int n = 0, ok = 0;
  for (const SeedSummary& s : seeds) {
    if (s.aborted) continue;
    ++n;
    if (s.mean_eval_reward >= threshold) ++ok;
  }
  return n == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(n);
}

}  // namespace gvfmeta
