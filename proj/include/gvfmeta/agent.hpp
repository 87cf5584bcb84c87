#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gvfmeta/envs.hpp"
#include "gvfmeta/gvf.hpp"
#include "gvfmeta/linear_q.hpp"
#include "gvfmeta/meta.hpp"
#include "gvfmeta/mlp.hpp"
#include "gvfmeta/replay.hpp"
#include "gvfmeta/repr.hpp"
#include "gvfmeta/rng.hpp"
#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// Value-semantic wrapper over the two experiment environments.
class Environment {
 public:
  explicit Environment(MonsoonWorld env) : env_(std::move(env)) {}
  explicit Environment(FrostHollow env) : env_(std::move(env)) {}

  StepResult reset() {
    return std::visit([](auto& e) { return e.reset(); }, env_);
  }
  StepResult step(int a) {
    return std::visit([a](auto& e) { return e.step(a); }, env_);
  }
  int num_actions() const {
    return std::visit([](const auto& e) { return e.num_actions(); }, env_);
  }
  std::size_t obs_dim() const {
    return std::visit([](const auto& e) { return e.obs_dim(); }, env_);
  }
  bool is_monsoon() const { return std::holds_alternative<MonsoonWorld>(env_); }
  const FrostHollow* frost_hollow() const { return std::get_if<FrostHollow>(&env_); }

 private:
  std::variant<MonsoonWorld, FrostHollow> env_;
};

enum class AgentVariant { kObs, kExpert, kOracle, kMgd };
enum class ControlKind { kLinear, kNetwork };
enum class StateBuilderId { kConcatLin, kAgg, kConcatNetwork };

struct NetworkConfig {
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t replay_capacity = 50000;
  std::size_t batch_size = 32;
  std::size_t min_history = 500;
  std::size_t train_period = 1;
  std::size_t target_sync = 1000;
  // Optimistic initialisation of the output bias; unfitted regions of the
  // value function then look attractive, which drives systematic
  // exploration under sparse reward.
  double q_init_bias = 0.0;
};

struct AgentConfig {
  AgentVariant variant = AgentVariant::kObs;
  ControlKind control = ControlKind::kLinear;
  StateBuilderId state_builder = StateBuilderId::kConcatLin;
  double epsilon_train = 0.1;
  double epsilon_eval = 0.0;
  // Linear decay from 1.0 down to epsilon_train over this many training
  // steps; 0 keeps epsilon_train constant from the start.
  long long epsilon_decay_steps = 0;
  double alpha_q = 0.01;
  double gamma_q = 0.9;

  // GVF collection (expert and mgd variants).
  std::size_t num_gvfs = 2;
  GvfRepr gvf_repr = GvfRepr::kMonsoonAgg;
  // Bit-cascade settings: which observation entry is the stimulus and how
  // many one-step bins the encoding carries. Negative index means the
  // environment default (hazard bit on Frost Hollow, growth bit otherwise).
  int cascade_signal_index = -1;
  std::size_t cascade_bins = 8;
  bool cascade_invert = false;  // track absence of the stimulus instead
  double alpha_v = 0.1;
  double lambda_v = 0.0;
  double gvf_gamma = 0.9;
  // Meta-GVF discount: constant gamma, or echo-style termination when the
  // cumulant fires above the cutoff.
  DiscountKind gvf_discount = DiscountKind::kConstant;
  double gvf_echo_cutoff = 0.5;

  // Meta-learning (mgd variant). meta_enabled=false freezes the meta-weights
  // and skips the meta machinery entirely (fixed-GVF twin of an mgd config).
  bool meta_enabled = true;
  CumulantActivation cumulant_activation = CumulantActivation::kSigmoid;
  bool policy_head = true;
  double alpha_c = 0.1;
  double alpha_rho = 0.001;
  double l2_lambda = 0.001;
  double omega_c_init = -5.0;
  double omega_init_noise = 0.0;
  // Anti-symmetric tilt of the policy-head init across the GVF collection:
  // GVF i starts mildly preferring action i (still close to equiprobable).
  // Breaks the exact symmetry that would otherwise keep the GVFs clones.
  double omega_pi_tilt = 0.0;
  double meta_grad_clip = 1.0;
  double h_decay = 1.0;  // 1 = plain accumulation; < 1 enables the ablation

  // Prediction-to-feature transform (agg builders). agg_transform routes the
  // prediction-aggregation GVF state through the log-space transform, which
  // suits echo-style (terminating) predictions.
  double transform_gamma_max = 0.9;
  int transform_horizon_cap = 10;
  std::size_t agg_memsize = 110;
  bool agg_transform = false;

  NetworkConfig network;
};

inline int act_epsilon_greedy(const FeatureVector& q, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw config_error("act_epsilon_greedy: bad epsilon");
  if (epsilon > 0.0 && rng.uniform01() < epsilon) {
    return static_cast<int>(rng.uniform_int(q.size()));
  }
  return static_cast<int>(argmax(q));
}

// Agent-state construction (Eq-style phi): how observations and predictions
// combine into the control learner's input.
inline FeatureVector build_agent_state(const FeatureVector& obs, const FeatureVector& v,
                                       StateBuilderId id, double transform_gamma_max = 0.9,
                                       int transform_horizon_cap = 10,
                                       std::size_t agg_memsize = 110) {
  switch (id) {
    case StateBuilderId::kConcatLin: {
      FeatureVector s = obs;
      s.insert(s.end(), v.begin(), v.end());
      s.push_back(1.0);
      return s;
    }
    case StateBuilderId::kAgg: {
      FeatureVector s = obs;
      if (v.empty()) {
        s.push_back(1.0);
        return s;
      }
      FeatureVector transformed = log_transform(v, transform_gamma_max, transform_horizon_cap);
      FeatureVector scaled(transformed.size(), 0.0);
      for (std::size_t i = 0; i < transformed.size(); ++i) {
        scaled[i] = aggregate_scale(transformed[i]);
      }
      FeatureVector mem = aggregate(scaled, agg_memsize);
      s.insert(s.end(), mem.begin(), mem.end());
      return s;
    }
    case StateBuilderId::kConcatNetwork: {
      FeatureVector s = obs;
      s.insert(s.end(), v.begin(), v.end());
      return s;
    }
  }
  throw config_error("build_agent_state: unknown builder id");
}

// Per-step output handed to the harness for logging.
struct StepOutcome {
  double reward = 0.0;
  int action = 0;
  double delta = 0.0;
  FeatureVector v;  // predictions after this step's GVF updates
};

// A control learner, a collection of GVFs, and (for the mgd variant) the
// meta-learning machinery, composed into the per-step loop:
// act -> observe -> per GVF meta-update then value update -> rebuild
// agent-state -> control update.
class Agent {
 public:
  struct GvfUnit {
    GvfSpec spec;
    GvfStateBuilder state_builder;
    PredictionState pred;
    bool meta = false;
    MetaWeights mw;
    MetaSensitivity sens;
    FeatureVector s_nu_prev;
    double gamma_prev = 0.0;
  };

  Agent(const AgentConfig& cfg, const Environment& env, Rng* rng)
      : cfg_(cfg), rng_(rng), num_actions_(static_cast<std::size_t>(env.num_actions())),
        raw_obs_dim_(env.obs_dim()), is_monsoon_(env.is_monsoon()) {
    if (cfg_.variant == AgentVariant::kOracle && !is_monsoon_) {
      throw config_error("oracle variant requires an environment exposing phase info");
    }
    aug_obs_dim_ = raw_obs_dim_ + (cfg_.variant == AgentVariant::kOracle ? 2 : 0);
    build_gvfs(env);
    if (!gvfs_.empty() && gvfs_.front().meta && cfg_.state_builder == StateBuilderId::kAgg) {
      throw config_error("meta-gradient learning requires a differentiable state builder");
    }
    if (cfg_.gvf_repr == GvfRepr::kPredictionAgg && !gvfs_.empty() && gvfs_.size() != 2) {
      throw config_error("prediction_agg representation requires exactly 2 GVFs");
    }
    const std::size_t sdim = state_dim();
    if (cfg_.control == ControlKind::kLinear) {
      linear_ = std::make_unique<LinearQ>(num_actions_, sdim, cfg_.alpha_q);
    } else {
      online_ = std::make_unique<MlpQ>(sdim, cfg_.network.hidden, num_actions_, cfg_.alpha_q, rng_);
      if (cfg_.network.q_init_bias != 0.0) {
        for (double& b : online_->layers().back().b) b = cfg_.network.q_init_bias;
      }
      target_ = std::make_unique<MlpQ>(*online_);
      replay_ = std::make_unique<ReplayBuffer>(cfg_.network.replay_capacity);
      online_->zero_grads(batch_grads_);
    }
  }

  const AgentConfig& config() const { return cfg_; }
  const std::vector<GvfUnit>& gvfs() const { return gvfs_; }
  std::vector<GvfUnit>& gvfs() { return gvfs_; }
  long long meta_skips() const { return meta_skips_; }
  std::size_t state_dim() const {
    const std::size_t g = gvfs_.size();
    switch (cfg_.state_builder) {
      case StateBuilderId::kConcatLin: return aug_obs_dim_ + g + 1;
      case StateBuilderId::kAgg: return aug_obs_dim_ + (g == 0 ? 1 : cfg_.agg_memsize);
      case StateBuilderId::kConcatNetwork: return aug_obs_dim_ + g;
    }
    throw config_error("state_dim: unknown builder");
  }

  // Test hook: when set, the per-step event order is appended here.
  void set_event_trace(std::vector<std::string>* trace) { event_trace_ = trace; }

  const LinearQ* linear_q() const { return linear_.get(); }
  const MlpQ* online_net() const { return online_.get(); }
  const MlpQ* target_net() const { return target_.get(); }

  // Resets the environment and prepares the initial agent-state.
  void begin(Environment& env) {
    StepResult sr = env.reset();
    step_count_ = 0;
    meta_skips_ = 0;
    v_prev_.assign(gvfs_.size(), 0.0);
    FeatureVector v0(gvfs_.size(), 0.0);
    for (std::size_t i = 0; i < gvfs_.size(); ++i) {
      GvfUnit& g = gvfs_[i];
      g.state_builder.reset();
      g.pred = PredictionState(g.state_builder.dim());
      g.sens.reset();
      g.s_nu_prev = gvf_state(i, sr.observation);
      g.gamma_prev = 0.0;
      g.pred.value = predict(g.pred, g.s_nu_prev);
      v0[i] = g.pred.value;
    }
    s_prev_ = make_state(augment(sr.observation, sr.info), v0);
    v_prev_ = v0;
  }

  StepOutcome step(Environment& env, bool eval_phase) {
    double eps = eval_phase ? cfg_.epsilon_eval : cfg_.epsilon_train;
    if (!eval_phase && cfg_.epsilon_decay_steps > 0 && step_count_ < cfg_.epsilon_decay_steps) {
      const double frac =
          static_cast<double>(step_count_) / static_cast<double>(cfg_.epsilon_decay_steps);
      eps = 1.0 + (cfg_.epsilon_train - 1.0) * frac;
    }

    // Act from the previous agent-state.
    const FeatureVector q = control_values(s_prev_);
    const int a = act_epsilon_greedy(q, eps, *rng_);
    const std::size_t greedy = argmax(q);
    const double mu =
        eps / static_cast<double>(num_actions_) +
        (static_cast<std::size_t>(a) == greedy ? 1.0 - eps : 0.0);
    trace("act");

    StepResult sr = env.step(a);

    // Pre-update predictions at the new observation give the TD error for
    // this step; both the meta update and the control update consume it.
    FeatureVector v_pre(gvfs_.size(), 0.0);
    std::vector<FeatureVector> s_nu_next(gvfs_.size());
    for (std::size_t i = 0; i < gvfs_.size(); ++i) {
      s_nu_next[i] = gvf_state(i, sr.observation, a);
      v_pre[i] = predict(gvfs_[i].pred, s_nu_next[i]);
    }
    const FeatureVector aug_obs = augment(sr.observation, sr.info);
    const FeatureVector s_boot = make_state(aug_obs, v_pre);
    const double delta = sr.reward + cfg_.gamma_q * bootstrap_max(s_boot) - q[static_cast<std::size_t>(a)];
    check_finite(delta, "Agent::step delta");

    // dL/dv for the prediction slice of Q(s_{t-1}, a_{t-1}).
    const bool meta_active = has_meta_ && cfg_.meta_enabled;
    FeatureVector dl_dv;
    if (meta_active) dl_dv = loss_grad_wrt_predictions(a, delta);

    FeatureVector v_post(gvfs_.size(), 0.0);
    for (std::size_t i = 0; i < gvfs_.size(); ++i) {
      GvfUnit& g = gvfs_[i];
      if (g.meta && meta_active) {
        if (!meta_update(g.mw, g.sens, dl_dv[i], g.s_nu_prev)) ++meta_skips_;
        trace("meta:" + std::to_string(i));
      }

      // Evaluate the GVF signals with the freshly updated meta-weights.
      double c = 0.0;
      switch (g.spec.cumulant) {
        case CumulantKind::kRewardEvent: c = sr.reward >= 1.0 ? 1.0 : 0.0; break;
        case CumulantKind::kObsIndex: c = sr.observation[g.spec.cumulant_obs_index]; break;
        case CumulantKind::kMetaSigmoid:
        case CumulantKind::kMetaLinear: c = cumulant(g.mw, sr.observation); break;
      }
      const double gamma_next = g.spec.discount == DiscountKind::kEchoTerminating
                                    ? (c >= g.spec.echo_cutoff ? 0.0 : g.spec.gamma_continue)
                                    : g.spec.gamma_continue;
      double pi_a = 1.0;
      FeatureVector pi;
      switch (g.spec.policy) {
        case PolicyKind::kOnPolicy: break;
        case PolicyKind::kFixed: pi_a = g.spec.fixed_policy[static_cast<std::size_t>(a)]; break;
        case PolicyKind::kMetaSoftmax:
          pi = target_policy(g.mw);
          pi_a = pi[static_cast<std::size_t>(a)];
          break;
      }

      GvfTransition tr;
      tr.s_nu = &g.s_nu_prev;
      tr.s_nu_next = &s_nu_next[i];
      tr.cumulant = c;
      tr.gamma = g.gamma_prev;
      tr.gamma_next = gamma_next;
      tr.pi_prob = pi_a;
      tr.mu_prob = mu;
      tr.on_policy = g.spec.policy == PolicyKind::kOnPolicy;
      const GvfUpdateResult res = gvf_update(g.pred, g.spec, tr);
      trace("gvf:" + std::to_string(i));

      if (g.meta && meta_active) {
        const FeatureVector dc = cumulant_grad(g.mw, sr.observation);
        if (g.mw.has_policy_head()) {
          const FeatureVector dr = rho_grad(pi, static_cast<std::size_t>(a), mu);
          accumulate_sensitivity(g.sens, g.spec.learning_rate, res, dc, &dr, cfg_.h_decay);
        } else {
          accumulate_sensitivity(g.sens, g.spec.learning_rate, res, dc, nullptr, cfg_.h_decay);
        }
      }

      g.pred.value = predict(g.pred, s_nu_next[i]);
      v_post[i] = g.pred.value;
      g.s_nu_prev = s_nu_next[i];
      g.gamma_prev = gamma_next;
    }

    // Control update from the rebuilt agent-state.
    const FeatureVector s_now = make_state(aug_obs, v_post);
    ++step_count_;
    if (cfg_.control == ControlKind::kLinear) {
      linear_->update(s_prev_, static_cast<std::size_t>(a), delta);
    } else {
      replay_->push(s_prev_, a, sr.reward, s_now);
      if (replay_->size() >= cfg_.network.min_history &&
          step_count_ % cfg_.network.train_period == 0) {
        train_batch();
      }
      if (step_count_ % cfg_.network.target_sync == 0) *target_ = *online_;
    }
    trace("control");

    s_prev_ = s_now;
    v_prev_ = v_post;
    StepOutcome out;
    out.reward = sr.reward;
    out.action = a;
    out.delta = delta;
    out.v = std::move(v_post);
    return out;
  }

 private:
  void build_gvfs(const Environment& env) {
    gvfs_.clear();
    has_meta_ = false;
    if (cfg_.variant == AgentVariant::kObs || cfg_.variant == AgentVariant::kOracle) return;

    if (cfg_.variant == AgentVariant::kExpert) {
      std::vector<GvfSpec> specs;
      if (is_monsoon_) {
        specs = echo_expert_pair(cfg_.alpha_v, cfg_.lambda_v);
      } else {
        GvfSpec hazard;
        hazard.cumulant = CumulantKind::kObsIndex;
        hazard.cumulant_obs_index = env.frost_hollow()->params().walk_length;  // hazard bit
        hazard.discount = DiscountKind::kConstant;
        hazard.gamma_continue = cfg_.gvf_gamma;
        hazard.policy = PolicyKind::kOnPolicy;
        hazard.trace_decay = cfg_.lambda_v;
        hazard.learning_rate = cfg_.alpha_v;
        specs = {hazard};
      }
      for (const GvfSpec& spec : specs) gvfs_.push_back(make_unit(spec, false));
      return;
    }

    // mgd: meta-parameterised cumulant (and, where configured, policy).
    has_meta_ = true;
    for (std::size_t i = 0; i < cfg_.num_gvfs; ++i) {
      GvfSpec spec;
      spec.cumulant = cfg_.cumulant_activation == CumulantActivation::kSigmoid
                          ? CumulantKind::kMetaSigmoid
                          : CumulantKind::kMetaLinear;
      spec.discount = cfg_.gvf_discount;
      spec.gamma_continue = cfg_.gvf_gamma;
      spec.echo_cutoff = cfg_.gvf_echo_cutoff;
      spec.policy = cfg_.policy_head ? PolicyKind::kMetaSoftmax : PolicyKind::kOnPolicy;
      spec.trace_decay = cfg_.lambda_v;
      spec.learning_rate = cfg_.alpha_v;
      gvfs_.push_back(make_unit(spec, true, i));
    }
  }

  GvfUnit make_unit(const GvfSpec& spec, bool meta, std::size_t index = 0) {
    GvfUnit g;
    g.spec = spec;
    g.meta = meta;
    std::size_t cascade_bins = cfg_.cascade_bins;
    std::size_t stimulus_index = 0;
    if (cfg_.gvf_repr == GvfRepr::kBitCascade) {
      if (cfg_.cascade_signal_index >= 0) {
        stimulus_index = static_cast<std::size_t>(cfg_.cascade_signal_index);
      } else {
        // Environment default: the hazard bit follows the position one-hot
        // on Frost Hollow; Monsoon tracks the growth bit.
        stimulus_index = is_monsoon_ ? 0 : raw_obs_dim_ - 2;
      }
      if (stimulus_index >= raw_obs_dim_) {
        throw config_error("cascade_signal_index out of observation range");
      }
    }
    g.state_builder = GvfStateBuilder(cfg_.gvf_repr, raw_obs_dim_, stimulus_index, cascade_bins,
                                      cfg_.agg_memsize, cfg_.cascade_invert, num_actions_);
    g.pred = PredictionState(g.state_builder.dim());
    if (meta) {
      g.mw.activation = cfg_.cumulant_activation;
      g.mw.alpha_c = cfg_.alpha_c;
      g.mw.alpha_rho = cfg_.alpha_rho;
      g.mw.l2_lambda = cfg_.l2_lambda;
      g.mw.grad_clip = cfg_.meta_grad_clip;
      g.mw.omega_c.assign(raw_obs_dim_, cfg_.omega_c_init);
      if (cfg_.omega_init_noise > 0.0) {
        for (double& w : g.mw.omega_c) w += cfg_.omega_init_noise * rng_->normal();
      }
      if (cfg_.policy_head) {
        g.mw.omega_pi.assign(num_actions_, -cfg_.omega_pi_tilt);
        g.mw.omega_pi[index % num_actions_] = cfg_.omega_pi_tilt;
        if (cfg_.omega_init_noise > 0.0) {
          for (double& w : g.mw.omega_pi) w += cfg_.omega_init_noise * rng_->normal();
        }
      }
      g.sens = MetaSensitivity(g.pred.nu.size(), g.mw.omega_c.size(), g.mw.omega_pi.size());
    }
    return g;
  }

  // The GVF-state for unit i at the arriving observation. The prediction-
  // aggregation representation indexes a shared memory cell with the
  // predictions the collection emitted last step; the action-outcome
  // representation also consumes the action that produced the observation.
  FeatureVector gvf_state(std::size_t i, const FeatureVector& obs, int action = -1) {
    if (cfg_.gvf_repr == GvfRepr::kPredictionAgg) {
      return prediction_agg_state(obs, v_prev_, cfg_.agg_memsize, cfg_.agg_transform,
                                  cfg_.transform_gamma_max, cfg_.transform_horizon_cap);
    }
    return gvfs_[i].state_builder.build(obs, action);
  }

  FeatureVector augment(const FeatureVector& obs, const EnvInfo& info) const {
    if (cfg_.variant != AgentVariant::kOracle) return obs;
    FeatureVector o = obs;
    const bool drought = info.phase < 2;
    o.push_back(drought ? 1.0 : 0.0);
    o.push_back(drought ? 0.0 : 1.0);
    return o;
  }

  FeatureVector make_state(const FeatureVector& aug_obs, const FeatureVector& v) const {
    return build_agent_state(aug_obs, v, cfg_.state_builder, cfg_.transform_gamma_max,
                             cfg_.transform_horizon_cap, cfg_.agg_memsize);
  }

  FeatureVector control_values(const FeatureVector& s) {
    if (cfg_.control == ControlKind::kLinear) return linear_->values(s);
    return online_->forward(s, &act_tape_);
  }

  double bootstrap_max(const FeatureVector& s) const {
    if (cfg_.control == ControlKind::kLinear) return max_value(linear_->values(s));
    return max_value(target_->forward(s));
  }

  // dL/dv_i = -2 * delta * dQ(s_prev, a)/dv_i, the semi-gradient path that
  // treats the bootstrap target as a constant.
  FeatureVector loss_grad_wrt_predictions(int a, double delta) {
    FeatureVector out(gvfs_.size(), 0.0);
    const std::size_t v_offset = aug_obs_dim_;
    if (cfg_.control == ControlKind::kLinear) {
      const FeatureVector& row = linear_->weights()[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < gvfs_.size(); ++i) {
        out[i] = -2.0 * delta * row[v_offset + i];
      }
      return out;
    }
    // act_tape_ still holds the forward pass at s_prev_ from action selection.
    FeatureVector og(num_actions_, 0.0);
    og[static_cast<std::size_t>(a)] = 1.0;
    const MlpQ::Grads g = online_->backward(act_tape_, og);
    for (std::size_t i = 0; i < gvfs_.size(); ++i) {
      out[i] = -2.0 * delta * g.input[v_offset + i];
    }
    return out;
  }

  void train_batch() {
    online_->zero_grads(batch_grads_);
    const double inv_b = 1.0 / static_cast<double>(cfg_.network.batch_size);
    for (std::size_t k = 0; k < cfg_.network.batch_size; ++k) {
      const ReplayBuffer::Transition& t = replay_->sample(*rng_);
      const FeatureVector q = online_->forward(t.s, &batch_tape_);
      const double y = t.reward + cfg_.gamma_q * max_value(target_->forward(t.s_next));
      const double err = q[static_cast<std::size_t>(t.action)] - y;
      FeatureVector og(num_actions_, 0.0);
      og[static_cast<std::size_t>(t.action)] = 2.0 * err * inv_b;
      online_->backward_into(batch_tape_, og, batch_grads_);
    }
    online_->apply_gradients(batch_grads_);
  }

  void trace(const std::string& event) {
    if (event_trace_) event_trace_->push_back(event);
  }

  AgentConfig cfg_;
  Rng* rng_;
  std::size_t num_actions_;
  std::size_t raw_obs_dim_;
  bool is_monsoon_;
  std::size_t aug_obs_dim_ = 0;
  bool has_meta_ = false;

  std::vector<GvfUnit> gvfs_;
  std::unique_ptr<LinearQ> linear_;
  std::unique_ptr<MlpQ> online_;
  std::unique_ptr<MlpQ> target_;
  std::unique_ptr<ReplayBuffer> replay_;

  FeatureVector s_prev_;
  FeatureVector v_prev_;
  long long step_count_ = 0;
  long long meta_skips_ = 0;
  MlpQ::Tape act_tape_;
  MlpQ::Tape batch_tape_;
  MlpQ::Grads batch_grads_;
  std::vector<std::string>* event_trace_ = nullptr;
};

}  // namespace gvfmeta
