#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gvfmeta/agent.hpp"
#include "gvfmeta/envs.hpp"
#include "gvfmeta/vec.hpp"

namespace gvfmeta {

struct ExperimentConfig {
  std::string name = "experiment";
  std::string env_id = "monsoon";  // "monsoon" | "frost_hollow"
  FrostHollow::Params fh_params;
  AgentConfig agent;

  long long total_steps = 200000;
  long long eval_steps = 1000;    // trailing steps run at epsilon_eval
  long long report_steps = 100;   // mean eval reward window (tail of eval)
  std::vector<std::uint64_t> seeds;
  long long log_cadence = 1000;       // training-phase row cadence
  long long meta_log_cadence = 1000;  // meta-weight snapshot cadence
  std::string success_metric = "mean_eval";  // or "cum_eval"
  double success_threshold = 0.9;
  std::string out_dir;

  // Applied by --paper-scale.
  long long paper_total_steps = 0;
  int paper_num_seeds = 0;
  int paper_heat_threshold = 0;
  int paper_gust_steps = 0;

  Environment make_env() const {
    if (env_id == "monsoon") return Environment(MonsoonWorld{});
    if (env_id == "frost_hollow") return Environment(FrostHollow{fh_params});
    throw config_error("unknown environment id: " + env_id);
  }

  void validate() const {
    if (total_steps < 1) throw config_error("config: total_steps must be positive");
    if (eval_steps < 0 || eval_steps > total_steps) {
      throw config_error("config: eval_steps must lie in [0, total_steps]");
    }
    if (report_steps < 0 || report_steps > eval_steps) {
      throw config_error("config: report_steps must lie in [0, eval_steps]");
    }
    if (seeds.empty()) throw config_error("config: seeds must be non-empty");
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size()) throw config_error("config: seeds must be distinct");
    if (log_cadence < 1 || meta_log_cadence < 1) throw config_error("config: bad cadence");
    if (success_metric != "mean_eval" && success_metric != "cum_eval") {
      throw config_error("config: unknown success_metric");
    }
  }
};

namespace config_detail {

inline AgentVariant parse_variant(const std::string& s) {
  if (s == "obs") return AgentVariant::kObs;
  if (s == "expert") return AgentVariant::kExpert;
  if (s == "oracle") return AgentVariant::kOracle;
  if (s == "mgd") return AgentVariant::kMgd;
  throw config_error("unknown agent variant: " + s);
}

inline ControlKind parse_control(const std::string& s) {
  if (s == "linear") return ControlKind::kLinear;
  if (s == "network") return ControlKind::kNetwork;
  throw config_error("unknown control kind: " + s);
}

inline StateBuilderId parse_builder(const std::string& s) {
  if (s == "concat-lin") return StateBuilderId::kConcatLin;
  if (s == "agg") return StateBuilderId::kAgg;
  if (s == "concat-network") return StateBuilderId::kConcatNetwork;
  throw config_error("unknown state builder: " + s);
}

inline CumulantActivation parse_activation(const std::string& s) {
  if (s == "sigmoid") return CumulantActivation::kSigmoid;
  if (s == "linear") return CumulantActivation::kLinear;
  throw config_error("unknown cumulant activation: " + s);
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace config_detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  using config_detail::get_or;
  ExperimentConfig cfg;
  cfg.name = get_or<std::string>(j, "name", cfg.name);

  if (j.contains("environment")) {
    const auto& je = j.at("environment");
    cfg.env_id = get_or<std::string>(je, "id", cfg.env_id);
    cfg.fh_params.walk_length = get_or<int>(je, "walk_length", cfg.fh_params.walk_length);
    cfg.fh_params.heat_threshold = get_or<int>(je, "heat_threshold", cfg.fh_params.heat_threshold);
    cfg.fh_params.period = get_or<int>(je, "hazard_period", cfg.fh_params.period);
    cfg.fh_params.gust_steps = get_or<int>(je, "hazard_gust_steps", cfg.fh_params.gust_steps);
  }

  if (j.contains("agent")) {
    const auto& ja = j.at("agent");
    AgentConfig& a = cfg.agent;
    a.variant = config_detail::parse_variant(get_or<std::string>(ja, "variant", "obs"));
    a.control = config_detail::parse_control(get_or<std::string>(ja, "control", "linear"));
    a.state_builder =
        config_detail::parse_builder(get_or<std::string>(ja, "state_builder", "concat-lin"));
    a.epsilon_train = get_or<double>(ja, "epsilon_train", a.epsilon_train);
    a.epsilon_eval = get_or<double>(ja, "epsilon_eval", a.epsilon_eval);
    a.epsilon_decay_steps = get_or<long long>(ja, "epsilon_decay_steps", a.epsilon_decay_steps);
    a.alpha_q = get_or<double>(ja, "alpha_q", a.alpha_q);
    a.gamma_q = get_or<double>(ja, "gamma_q", a.gamma_q);
    a.num_gvfs = get_or<std::size_t>(ja, "num_gvfs", a.num_gvfs);
    a.gvf_repr = parse_gvf_repr(get_or<std::string>(ja, "gvf_state", "monsoon_agg"));
    a.cascade_signal_index = get_or<int>(ja, "cascade_signal_index", a.cascade_signal_index);
    a.cascade_bins = get_or<std::size_t>(ja, "cascade_bins", a.cascade_bins);
    a.cascade_invert = get_or<bool>(ja, "cascade_invert", a.cascade_invert);
    a.alpha_v = get_or<double>(ja, "alpha_v", a.alpha_v);
    a.lambda_v = get_or<double>(ja, "lambda_v", a.lambda_v);
    a.gvf_gamma = get_or<double>(ja, "gvf_gamma", a.gvf_gamma);
    const std::string discount = get_or<std::string>(ja, "gvf_discount", "constant");
    if (discount == "constant") {
      a.gvf_discount = DiscountKind::kConstant;
    } else if (discount == "echo") {
      a.gvf_discount = DiscountKind::kEchoTerminating;
    } else {
      throw config_error("unknown gvf_discount: " + discount);
    }
    a.gvf_echo_cutoff = get_or<double>(ja, "gvf_echo_cutoff", a.gvf_echo_cutoff);
    a.cumulant_activation =
        config_detail::parse_activation(get_or<std::string>(ja, "cumulant_activation", "sigmoid"));
    a.meta_enabled = get_or<bool>(ja, "meta_enabled", a.meta_enabled);
    a.policy_head = get_or<bool>(ja, "policy_head", a.policy_head);
    a.alpha_c = get_or<double>(ja, "alpha_c", a.alpha_c);
    a.alpha_rho = get_or<double>(ja, "alpha_rho", a.alpha_rho);
    a.l2_lambda = get_or<double>(ja, "l2_lambda", a.l2_lambda);
    a.omega_c_init = get_or<double>(ja, "omega_c_init", a.omega_c_init);
    a.omega_init_noise = get_or<double>(ja, "omega_init_noise", a.omega_init_noise);
    a.omega_pi_tilt = get_or<double>(ja, "omega_pi_tilt", a.omega_pi_tilt);
    a.meta_grad_clip = get_or<double>(ja, "meta_grad_clip", a.meta_grad_clip);
    a.h_decay = get_or<double>(ja, "h_decay", a.h_decay);
    a.transform_gamma_max = get_or<double>(ja, "transform_gamma_max", a.transform_gamma_max);
    a.transform_horizon_cap = get_or<int>(ja, "transform_horizon_cap", a.transform_horizon_cap);
    a.agg_memsize = get_or<std::size_t>(ja, "agg_memsize", a.agg_memsize);
    a.agg_transform = get_or<bool>(ja, "agg_transform", a.agg_transform);
    if (ja.contains("network")) {
      const auto& jn = ja.at("network");
      NetworkConfig& n = a.network;
      n.hidden = get_or<std::vector<std::size_t>>(jn, "hidden", n.hidden);
      n.replay_capacity = get_or<std::size_t>(jn, "replay_capacity", n.replay_capacity);
      n.batch_size = get_or<std::size_t>(jn, "batch_size", n.batch_size);
      n.min_history = get_or<std::size_t>(jn, "min_history", n.min_history);
      n.train_period = get_or<std::size_t>(jn, "train_period", n.train_period);
      n.target_sync = get_or<std::size_t>(jn, "target_sync", n.target_sync);
      n.q_init_bias = get_or<double>(jn, "q_init_bias", n.q_init_bias);
    }
  }

  cfg.total_steps = get_or<long long>(j, "total_steps", cfg.total_steps);
  cfg.eval_steps = get_or<long long>(j, "eval_steps", cfg.eval_steps);
  cfg.report_steps = get_or<long long>(j, "report_steps", cfg.report_steps);
  cfg.log_cadence = get_or<long long>(j, "log_cadence", cfg.log_cadence);
  cfg.meta_log_cadence = get_or<long long>(j, "meta_log_cadence", cfg.meta_log_cadence);
  cfg.success_metric = get_or<std::string>(j, "success_metric", cfg.success_metric);
  cfg.success_threshold = get_or<double>(j, "success_threshold", cfg.success_threshold);
  cfg.out_dir = get_or<std::string>(j, "out_dir", cfg.out_dir);

  if (j.contains("seeds")) {
    const auto& js = j.at("seeds");
    if (js.is_array()) {
      cfg.seeds = js.get<std::vector<std::uint64_t>>();
    } else {
      const auto count = config_detail::get_or<std::uint64_t>(js, "count", 10);
      const auto base = config_detail::get_or<std::uint64_t>(js, "base", 0);
      for (std::uint64_t k = 0; k < count; ++k) cfg.seeds.push_back(base + k);
    }
  } else {
    for (std::uint64_t k = 0; k < 10; ++k) cfg.seeds.push_back(k);
  }

  if (j.contains("paper_scale")) {
    const auto& jp = j.at("paper_scale");
    cfg.paper_total_steps = config_detail::get_or<long long>(jp, "total_steps", 0);
    cfg.paper_num_seeds = config_detail::get_or<int>(jp, "seeds", 0);
    cfg.paper_heat_threshold = config_detail::get_or<int>(jp, "heat_threshold", 0);
    cfg.paper_gust_steps = config_detail::get_or<int>(jp, "hazard_gust_steps", 0);
  }

  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("config parse error in " + path + ": " + e.what());
  }
  return parse_experiment_config(j);
}

// Switches a desk-scale config to the paper-scale protocol.
inline void apply_paper_scale(ExperimentConfig& cfg) {
  if (cfg.paper_total_steps > 0) cfg.total_steps = cfg.paper_total_steps;
  if (cfg.paper_num_seeds > 0) {
    cfg.seeds.clear();
    for (int k = 0; k < cfg.paper_num_seeds; ++k) {
      cfg.seeds.push_back(static_cast<std::uint64_t>(k));
    }
  }
  if (cfg.paper_heat_threshold > 0) cfg.fh_params.heat_threshold = cfg.paper_heat_threshold;
  if (cfg.paper_gust_steps > 0) cfg.fh_params.gust_steps = cfg.paper_gust_steps;
  cfg.validate();
}

}  // namespace gvfmeta
