#pragma once

#include <cstddef>
#include <vector>

#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// What a GVF accumulates. Meta-parameterised cumulants are evaluated by the
// meta module; the kinds here cover the expert (fixed) constructions.
enum class CumulantKind {
  kRewardEvent,  // 1 when the environment reward is 1 (echo GVFs)
  kObsIndex,     // a fixed observation entry (e.g. the hazard bit)
  kMetaSigmoid,  // sigmoid(omega_c . obs)
  kMetaLinear,   // omega_c . obs
};

enum class DiscountKind {
  kConstant,         // gamma_continue every step
  kEchoTerminating,  // 0 when the cumulant fires, gamma_continue otherwise
};

enum class PolicyKind {
  kOnPolicy,     // conditioned on behaviour: rho == 1
  kFixed,        // fixed action distribution
  kMetaSoftmax,  // softmax(omega_pi), learned by meta-gradient descent
};

// Parameterization of one GVF: what it is about and how it learns.
struct GvfSpec {
  CumulantKind cumulant = CumulantKind::kRewardEvent;
  std::size_t cumulant_obs_index = 0;  // for kObsIndex
  DiscountKind discount = DiscountKind::kEchoTerminating;
  double gamma_continue = 0.9;
  double echo_cutoff = 0.5;  // cumulant level that terminates accumulation
  PolicyKind policy = PolicyKind::kFixed;
  FeatureVector fixed_policy;  // for kFixed
  double trace_decay = 0.0;    // lambda^nu
  double learning_rate = 0.1;  // alpha^V
};

// A GVF's learned weights, eligibility trace, and last emitted prediction.
struct PredictionState {
  FeatureVector nu;
  FeatureVector trace;
  double value = 0.0;

  explicit PredictionState(std::size_t dim = 0) : nu(dim, 0.0), trace(dim, 0.0) {}
};

inline double predict(const PredictionState& ps, const FeatureVector& s_nu) {
  return dot(ps.nu, s_nu);
}

// One observed transition, with the cumulant/discount/policy signals already
// evaluated for it.
struct GvfTransition {
  const FeatureVector* s_nu = nullptr;       // GVF state the prediction was made from
  const FeatureVector* s_nu_next = nullptr;  // GVF state after the transition
  double cumulant = 0.0;                     // c_{t+1}
  double gamma = 0.0;                        // gamma_t, discounts the incoming trace
  double gamma_next = 0.0;                   // gamma_{t+1}, discounts the bootstrap
  double pi_prob = 1.0;                      // target policy probability of the action
  double mu_prob = 1.0;                      // behaviour probability of the action
  bool on_policy = false;                    // rho forced to 1
};

struct GvfUpdateResult {
  double delta_nu = 0.0;
  double rho = 1.0;
  // gamma * lambda * trace + s_nu, before the rho factor. The meta module
  // needs this piece to carry the chain rule through the update.
  FeatureVector inner_trace;
};

// TD(lambda) with importance sampling:
//   delta = c + gamma' * nu.s' - nu.s
//   trace = rho * (gamma * lambda * trace + s)
//   nu   += alpha * delta * trace
inline GvfUpdateResult gvf_update(PredictionState& ps, const GvfSpec& spec,
                                  const GvfTransition& tr) {
  const FeatureVector& s = *tr.s_nu;
  const FeatureVector& s_next = *tr.s_nu_next;
  if (s.size() != ps.nu.size() || s_next.size() != ps.nu.size()) {
    throw config_error("gvf_update: dimension mismatch");
  }
  GvfUpdateResult res;
  if (tr.on_policy) {
    res.rho = 1.0;
  } else {
    if (tr.mu_prob <= 0.0) {
      throw numeric_error("gvf_update: behaviour probability of taken action is zero");
    }
    res.rho = tr.pi_prob / tr.mu_prob;
  }
  res.delta_nu = tr.cumulant + tr.gamma_next * dot(ps.nu, s_next) - dot(ps.nu, s);
  check_finite(res.delta_nu, "gvf_update delta");
  res.inner_trace.resize(ps.nu.size());
  for (std::size_t i = 0; i < ps.nu.size(); ++i) {
    res.inner_trace[i] = tr.gamma * spec.trace_decay * ps.trace[i] + s[i];
    ps.trace[i] = res.rho * res.inner_trace[i];
    ps.nu[i] += spec.learning_rate * res.delta_nu * ps.trace[i];
  }
  return res;
}

// The two expert echo GVFs for Monsoon World: "how long until watering
// produces growth" and its no-watering mirror. Cumulant fires on reward,
// discount terminates at the event and continues at 0.9 otherwise.
inline std::vector<GvfSpec> echo_expert_pair(double alpha_v = 0.1, double trace_decay = 0.0) {
  GvfSpec water;
  water.cumulant = CumulantKind::kRewardEvent;
  water.discount = DiscountKind::kEchoTerminating;
  water.gamma_continue = 0.9;
  water.policy = PolicyKind::kFixed;
  water.fixed_policy = {0.0, 1.0};
  water.trace_decay = trace_decay;
  water.learning_rate = alpha_v;

  GvfSpec no_water = water;
  no_water.fixed_policy = {1.0, 0.0};
  return {water, no_water};
}

}  // namespace gvfmeta
