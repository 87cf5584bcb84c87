// Command-line entry point: run experiment configs over seed sweeps, render
// figures from persisted records, and run the oracle/property suite.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gvfmeta/config.hpp"
#include "gvfmeta/experiment.hpp"
#include "gvfmeta/plots.hpp"
#include "gvfmeta/selfcheck.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("GVFMETA_OUT");
  return env != nullptr && *env != '\0' ? std::string(env) : std::string("out");
}

int cmd_run(const std::string& config_path, int seeds_override, bool paper_scale,
            std::string out_dir, unsigned jobs) {
  gvfmeta::ExperimentConfig cfg = gvfmeta::load_experiment_config(config_path);
  if (paper_scale) gvfmeta::apply_paper_scale(cfg);
  if (seeds_override > 0) {
    cfg.seeds.clear();
    for (int k = 0; k < seeds_override; ++k) {
      cfg.seeds.push_back(static_cast<std::uint64_t>(k));
    }
    cfg.validate();
  }
  if (out_dir.empty()) out_dir = !cfg.out_dir.empty() ? cfg.out_dir : default_out_dir();

  std::cout << "running " << cfg.name << ": " << cfg.seeds.size() << " seeds, "
            << cfg.total_steps << " steps (" << cfg.eval_steps << " eval) -> " << out_dir
            << std::endl;
  const gvfmeta::Aggregate agg = gvfmeta::run_experiment(cfg, out_dir, jobs);
  gvfmeta::print_aggregate(agg);
  for (const auto& s : agg.seeds) {
    if (s.aborted) return 1;
  }
  return 0;
}

int cmd_plot(const std::string& records_dir, std::string out_dir) {
  if (out_dir.empty()) out_dir = records_dir + "/plots";
  const auto written = gvfmeta::emit_plots(records_dir, out_dir);
  for (const auto& f : written) std::cout << "wrote " << f << "\n";
  if (written.empty()) {
    std::cerr << "no figures produced\n";
    return 1;
  }
  return 0;
}

int cmd_verify(int gradient_trials) {
  const auto results = gvfmeta::run_selfchecks(gradient_trials);
  bool all_ok = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    all_ok = all_ok && r.pass;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised GVF discovery: experiment runner"};
  app.require_subcommand(1);

  std::string config_path, records_dir, out_dir;
  int seeds_override = 0;
  bool paper_scale = false;
  unsigned jobs = 0;
  int gradient_trials = 100;

  CLI::App* run = app.add_subcommand("run", "run an experiment config over its seed sweep");
  run->add_option("config", config_path, "experiment config file (JSON)")->required();
  run->add_option("--seeds", seeds_override, "override the number of seeds (0..N-1)");
  run->add_flag("--paper-scale", paper_scale, "use the paper-scale step/seed counts");
  run->add_option("--out", out_dir, "output directory (default: config, then $GVFMETA_OUT)");
  run->add_option("--jobs", jobs, "worker threads for the seed sweep (default: hardware)");

  CLI::App* plot = app.add_subcommand("plot", "render SVG/CSV figures from a records directory");
  plot->add_option("records", records_dir, "directory with record + summary files")->required();
  plot->add_option("--out", out_dir, "figure output directory (default: <records>/plots)");

  CLI::App* verify = app.add_subcommand("verify", "run the oracle/property suite");
  verify->add_option("--trials", gradient_trials, "gradient-check trials (default 100)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seeds_override, paper_scale, out_dir, jobs);
    if (plot->parsed()) return cmd_plot(records_dir, out_dir);
    if (verify->parsed()) return cmd_verify(gradient_trials);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
