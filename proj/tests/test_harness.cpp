#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gvfmeta/config.hpp"
#include "gvfmeta/experiment.hpp"
#include "gvfmeta/plots.hpp"
#include "gvfmeta/record.hpp"

using namespace gvfmeta;

namespace {

std::string temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("gvfmeta_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig smoke_config() {
  ExperimentConfig cfg;
  cfg.name = "smoke";
  cfg.env_id = "monsoon";
  cfg.agent.variant = AgentVariant::kObs;
  cfg.agent.control = ControlKind::kLinear;
  cfg.agent.epsilon_train = 0.1;
  cfg.agent.alpha_q = 0.01;
  cfg.total_steps = 10;
  cfg.eval_steps = 10;
  cfg.report_steps = 10;
  cfg.seeds = {0};
  cfg.log_cadence = 1;
  cfg.meta_log_cadence = 1;
  return cfg;
}

}  // namespace

TEST_CASE("preset configs parse and validate") {
  const ExperimentConfig mgd = load_experiment_config("configs/monsoon_mgd.json");
  CHECK(mgd.agent.variant == AgentVariant::kMgd);
  CHECK(mgd.agent.epsilon_train == 0.5);
  CHECK(mgd.agent.alpha_q == 0.0001);
  CHECK(mgd.agent.alpha_v == 0.1);
  CHECK(mgd.agent.alpha_rho == 0.001);
  CHECK(mgd.agent.alpha_c == 0.1);
  CHECK(mgd.agent.omega_c_init == -5.0);
  CHECK(mgd.agent.l2_lambda == 0.001);
  CHECK(mgd.seeds.size() == 10);
  CHECK(mgd.total_steps == 200000);

  ExperimentConfig paper = mgd;
  apply_paper_scale(paper);
  CHECK(paper.total_steps == 1000000);
  CHECK(paper.seeds.size() == 30);

  const ExperimentConfig fh = load_experiment_config("configs/frosthollow_mgd.json");
  CHECK(fh.agent.control == ControlKind::kNetwork);
  CHECK(fh.agent.cumulant_activation == CumulantActivation::kLinear);
  CHECK(fh.agent.policy_head == false);
  CHECK(fh.agent.epsilon_eval == 0.001);
  CHECK(fh.agent.network.replay_capacity == 50000);
  CHECK(fh.success_metric == "cum_eval");
  CHECK(fh.fh_params.heat_threshold == 8);  // desk-scale variant
  CHECK(fh.fh_params.gust_steps == 1);

  ExperimentConfig fh_paper = fh;
  apply_paper_scale(fh_paper);
  CHECK(fh_paper.fh_params.heat_threshold == 12);
  CHECK(fh_paper.fh_params.gust_steps == 2);
  CHECK(fh_paper.total_steps == 2500000);
}

TEST_CASE("config validation errors") {
  nlohmann::json j;
  j["total_steps"] = 10;
  j["eval_steps"] = 20;
  CHECK_THROWS_AS(parse_experiment_config(j), config_error);

  nlohmann::json dup;
  dup["seeds"] = {1, 1};
  CHECK_THROWS_AS(parse_experiment_config(dup), config_error);

  CHECK_THROWS_AS(load_experiment_config("configs/does_not_exist.json"), config_error);
}

TEST_CASE("ten-step smoke run: ten rows, deterministic bytes") {
  const std::string dir = temp_dir("smoke");
  const ExperimentConfig cfg = smoke_config();
  const SeedSummary s1 = run_single_seed(cfg, 0, dir);
  CHECK(s1.steps == 10);
  const std::string path = record_path(dir, cfg.name, 0);
  const std::vector<StepRow> rows = read_record_file(path);
  REQUIRE(rows.size() == 10);
  for (long long t = 0; t < 10; ++t) CHECK(rows[static_cast<std::size_t>(t)].t == t);

  const std::string bytes1 = slurp(path);
  run_single_seed(cfg, 0, dir);
  CHECK(slurp(path) == bytes1);
}

TEST_CASE("summary statistics recompute exactly from persisted rows") {
  const std::string dir = temp_dir("roundtrip");
  ExperimentConfig cfg = smoke_config();
  cfg.name = "roundtrip";
  cfg.total_steps = 3000;
  cfg.eval_steps = 500;
  cfg.report_steps = 100;
  cfg.log_cadence = 50;
  const SeedSummary summary = run_single_seed(cfg, 3, dir);

  const std::vector<StepRow> rows = read_record_file(record_path(dir, cfg.name, 3));
  double cum = 0.0, report = 0.0;
  const long long eval_from = cfg.total_steps - cfg.eval_steps;
  const long long report_from = cfg.total_steps - cfg.report_steps;
  for (const StepRow& r : rows) {
    if (r.t >= eval_from) cum += r.reward;
    if (r.t >= report_from) report += r.reward;
  }
  CHECK(cum == summary.cum_eval_reward);
  CHECK(report / static_cast<double>(cfg.report_steps) == summary.mean_eval_reward);
}

TEST_CASE("run_experiment aggregates and survives per-seed failure") {
  const std::string dir = temp_dir("sweep");
  ExperimentConfig cfg = smoke_config();
  cfg.name = "sweep";
  cfg.total_steps = 200;
  cfg.eval_steps = 100;
  cfg.report_steps = 50;
  cfg.seeds = {0, 1, 2};
  const Aggregate agg = run_experiment(cfg, dir, 2);
  CHECK(agg.n_seeds == 3);
  CHECK(agg.seeds.size() == 3);

  // Aggregate persists and round-trips.
  std::ifstream in(summary_path(dir, cfg.name));
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  const Aggregate back = aggregate_from_json(j);
  CHECK(back.n_seeds == agg.n_seeds);
  CHECK(back.mean_eval_mean == agg.mean_eval_mean);
  CHECK(back.mean_eval_sem == agg.mean_eval_sem);
  CHECK(back.seeds[1].mean_eval_reward == agg.seeds[1].mean_eval_reward);
}

TEST_CASE("per-seed failures are recorded without aborting the sweep") {
  const std::string dir = temp_dir("aborts");
  ExperimentConfig cfg = smoke_config();
  cfg.name = "aborts";
  cfg.env_id = "frost_hollow";
  cfg.agent.variant = AgentVariant::kOracle;  // oracle requires Monsoon: every seed aborts
  cfg.seeds = {0, 1};
  const Aggregate agg = run_experiment(cfg, dir, 1);
  CHECK(agg.n_seeds == 0);
  REQUIRE(agg.seeds.size() == 2);
  CHECK(agg.seeds[0].aborted);
  CHECK(agg.seeds[1].aborted);
  CHECK(!agg.seeds[0].error.empty());
}

TEST_CASE("mean and standard error") {
  const auto [m, sem] = mean_sem({1.0, 2.0, 3.0});
  CHECK(m == doctest::Approx(2.0));
  CHECK(sem == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(mean_sem({5.0}).second == 0.0);
  CHECK(mean_sem({}).first == 0.0);
}

TEST_CASE("success rate over seed summaries") {
  std::vector<SeedSummary> seeds(30);
  for (int i = 0; i < 30; ++i) seeds[static_cast<std::size_t>(i)].mean_eval_reward = i == 7 ? 0.5 : 0.97;
  CHECK(success_rate(seeds, 0.9) == doctest::Approx(29.0 / 30.0));

  for (auto& s : seeds) s.mean_eval_reward = 1.0;
  CHECK(success_rate(seeds, 0.9) == 1.0);

  for (auto& s : seeds) s.mean_eval_reward = 0.5;
  CHECK(success_rate(seeds, 0.9) == 0.0);
}

TEST_CASE("plots: deterministic output, warning on empty input") {
  const std::string dir = temp_dir("plots_empty");
  std::ostringstream warn;
  const auto none = emit_plots(dir, dir + "/plots", warn);
  CHECK(none.empty());
  CHECK(warn.str().find("nothing to do") != std::string::npos);

  const std::string rec = temp_dir("plots_records");
  ExperimentConfig cfg = smoke_config();
  cfg.name = "monsoon_smoke";
  cfg.total_steps = 400;
  cfg.eval_steps = 200;
  cfg.report_steps = 100;
  cfg.seeds = {0, 1};
  run_experiment(cfg, rec, 1);

  const auto files1 = emit_plots(rec, rec + "/plots1");
  REQUIRE(!files1.empty());
  const auto files2 = emit_plots(rec, rec + "/plots2");
  REQUIRE(files1.size() == files2.size());
  for (std::size_t i = 0; i < files1.size(); ++i) {
    CHECK(slurp(files1[i]) == slurp(files2[i]));
  }
}
