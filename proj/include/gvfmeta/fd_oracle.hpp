#pragma once

// Finite-difference oracles for the two gradient paths in the system: the
// network backward pass and the meta-gradient chain rule. These replay the
// production update code on frozen snapshots and compare against central
// differences, so they are independent of the analytic gradient derivations
// they check.

#include <cmath>
#include <cstddef>
#include <vector>

#include "gvfmeta/gvf.hpp"
#include "gvfmeta/meta.hpp"
#include "gvfmeta/mlp.hpp"
#include "gvfmeta/rng.hpp"
#include "gvfmeta/vec.hpp"

namespace gvfmeta {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// --- MLP gradient check ------------------------------------------------------

namespace fd_detail {

// Smallest |pre-activation| over hidden units; finite differences are
// meaningless across a relu kink, so samples too close to one are redrawn.
inline double min_hidden_preact(const MlpQ& net, const FeatureVector& x) {
  double min_abs = 1e300;
  FeatureVector cur = x;
  const auto& layers = net.layers();
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    const auto& L = layers[l];
    FeatureVector y(L.out, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      double acc = L.b[o];
      for (std::size_t i = 0; i < L.in; ++i) acc += L.w[o * L.in + i] * cur[i];
      min_abs = std::min(min_abs, std::abs(acc));
      y[o] = acc > 0.0 ? acc : 0.0;
    }
    cur = std::move(y);
  }
  return min_abs;
}

inline double loss(const MlpQ& net, const FeatureVector& x, const FeatureVector& og) {
  return dot(net.forward(x), og);
}

}  // namespace fd_detail

// Runs `trials` random (net, input) pairs; returns the max relative error
// between analytic gradients (parameters and input) and central finite
// differences at step h.
inline double mlp_gradient_check(Rng& rng, int trials, double h = 1e-5) {
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t in_dim = 2 + rng.uniform_int(4);
    const std::size_t out_dim = 2 + rng.uniform_int(3);
    std::vector<std::size_t> hidden;
    const std::size_t depth = rng.uniform_int(3);  // 0..2 hidden layers
    for (std::size_t d = 0; d < depth; ++d) hidden.push_back(3 + rng.uniform_int(5));

    MlpQ net;
    FeatureVector x(in_dim, 0.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
      net = MlpQ(in_dim, hidden, out_dim, 0.001, &rng);
      for (double& xi : x) xi = 2.0 * rng.uniform01() - 1.0;
      if (hidden.empty() || fd_detail::min_hidden_preact(net, x) > 1e-3) break;
    }
    FeatureVector og(out_dim, 0.0);
    for (double& g : og) g = 2.0 * rng.uniform01() - 1.0;

    MlpQ::Tape tape;
    net.forward(x, &tape);
    const MlpQ::Grads grads = net.backward(tape, og);

    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      auto& L = net.layers()[l];
      for (std::size_t k = 0; k < L.w.size(); ++k) {
        const double orig = L.w[k];
        L.w[k] = orig + h;
        const double up = fd_detail::loss(net, x, og);
        L.w[k] = orig - h;
        const double dn = fd_detail::loss(net, x, og);
        L.w[k] = orig;
        worst = std::max(worst, rel_err(grads.w[l][k], (up - dn) / (2.0 * h)));
      }
      for (std::size_t k = 0; k < L.b.size(); ++k) {
        const double orig = L.b[k];
        L.b[k] = orig + h;
        const double up = fd_detail::loss(net, x, og);
        L.b[k] = orig - h;
        const double dn = fd_detail::loss(net, x, og);
        L.b[k] = orig;
        worst = std::max(worst, rel_err(grads.b[l][k], (up - dn) / (2.0 * h)));
      }
    }
    for (std::size_t k = 0; k < in_dim; ++k) {
      const double orig = x[k];
      x[k] = orig + h;
      const double up = fd_detail::loss(net, x, og);
      x[k] = orig - h;
      const double dn = fd_detail::loss(net, x, og);
      x[k] = orig;
      worst = std::max(worst, rel_err(grads.input[k], (up - dn) / (2.0 * h)));
    }
  }
  return worst;
}

// --- Meta-gradient check -----------------------------------------------------

// Frozen one-step computation graph: replaying the latest GVF weight update
// under perturbed meta-weights, then recomputing the prediction, the
// agent-state, and the squared control error.
struct MetaSnapshot {
  CumulantActivation activation = CumulantActivation::kSigmoid;
  bool policy_head = true;
  std::size_t num_actions = 2;
  FeatureVector obs_next;             // cumulant input
  FeatureVector s_nu, s_nu_next;      // update states
  FeatureVector s_emit;               // GVF state the prediction was emitted from
  FeatureVector e_prev;               // incoming eligibility trace
  double gamma = 0.9, gamma_next = 0.9, lambda = 0.0, alpha_v = 0.1;
  std::size_t action = 0;
  double mu = 0.5;
  FeatureVector nu0;
  FeatureVector omega_c, omega_pi;
  FeatureVector obs_ctl;   // control-side observation slice
  FeatureVector w_row;     // control weights over [obs_ctl | v | 1]
  double r_plus_boot = 0.0;
};

namespace fd_detail {

struct MetaReplay {
  double delta_ctl = 0.0;
  double loss = 0.0;
  GvfUpdateResult update;
  FeatureVector nu1;
};

// Replays the GVF update through the production gvf_update at the given
// meta-weights and evaluates the downstream control loss.
inline MetaReplay replay_meta(const MetaSnapshot& sn, const FeatureVector& omega_c,
                              const FeatureVector& omega_pi) {
  MetaWeights mw;
  mw.omega_c = omega_c;
  mw.omega_pi = sn.policy_head ? omega_pi : FeatureVector{};
  mw.activation = sn.activation;

  GvfSpec spec;
  spec.trace_decay = sn.lambda;
  spec.learning_rate = sn.alpha_v;

  PredictionState ps(sn.nu0.size());
  ps.nu = sn.nu0;
  ps.trace = sn.e_prev;

  const double c = cumulant(mw, sn.obs_next);
  double pi_a = 1.0;
  if (sn.policy_head) pi_a = target_policy(mw)[sn.action];

  GvfTransition tr;
  tr.s_nu = &sn.s_nu;
  tr.s_nu_next = &sn.s_nu_next;
  tr.cumulant = c;
  tr.gamma = sn.gamma;
  tr.gamma_next = sn.gamma_next;
  tr.pi_prob = pi_a;
  tr.mu_prob = sn.mu;
  tr.on_policy = !sn.policy_head;

  MetaReplay out;
  out.update = gvf_update(ps, spec, tr);
  out.nu1 = ps.nu;
  const double v = dot(ps.nu, sn.s_emit);
  FeatureVector s_agent = sn.obs_ctl;
  s_agent.push_back(v);
  s_agent.push_back(1.0);
  out.delta_ctl = sn.r_plus_boot - dot(sn.w_row, s_agent);
  out.loss = out.delta_ctl * out.delta_ctl;
  return out;
}

}  // namespace fd_detail

inline MetaSnapshot random_meta_snapshot(Rng& rng, bool policy_head) {
  const auto u = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); };
  MetaSnapshot sn;
  sn.policy_head = policy_head;
  sn.activation = rng.uniform_int(2) == 0 ? CumulantActivation::kSigmoid
                                          : CumulantActivation::kLinear;
  const std::size_t obs_dim = 2 + rng.uniform_int(3);
  const std::size_t nu_dim = 2 + rng.uniform_int(3);
  sn.num_actions = 2 + rng.uniform_int(2);
  sn.action = rng.uniform_int(sn.num_actions);
  sn.mu = u(0.25, 0.9);
  sn.lambda = rng.uniform_int(2) == 0 ? 0.0 : u(0.2, 0.8);
  sn.gamma = u(0.5, 0.95);
  sn.gamma_next = u(0.5, 0.95);
  sn.alpha_v = u(0.05, 0.2);
  sn.obs_next.resize(obs_dim);
  for (double& x : sn.obs_next) x = u(-1.0, 1.0);
  sn.s_nu.resize(nu_dim);
  sn.s_nu_next.resize(nu_dim);
  sn.s_emit.resize(nu_dim);
  sn.e_prev.resize(nu_dim);
  sn.nu0.resize(nu_dim);
  for (std::size_t i = 0; i < nu_dim; ++i) {
    sn.s_nu[i] = u(-1.0, 1.0);
    sn.s_nu_next[i] = u(-1.0, 1.0);
    sn.s_emit[i] = u(-1.0, 1.0);
    sn.e_prev[i] = u(-0.5, 0.5);
    sn.nu0[i] = u(-0.5, 0.5);
  }
  sn.omega_c.resize(obs_dim);
  for (double& x : sn.omega_c) x = u(-1.0, 1.0);
  if (policy_head) {
    sn.omega_pi.resize(sn.num_actions);
    for (double& x : sn.omega_pi) x = u(-1.0, 1.0);
  }
  const std::size_t ctl_obs = 2 + rng.uniform_int(2);
  sn.obs_ctl.resize(ctl_obs);
  for (double& x : sn.obs_ctl) x = u(-1.0, 1.0);
  sn.w_row.resize(ctl_obs + 2);  // [obs | v | bias]
  for (double& x : sn.w_row) x = u(-1.0, 1.0);
  sn.r_plus_boot = u(-1.0, 2.0);
  return sn;
}

// Implemented meta-gradient, recovered through the production meta_update
// path (unit learning rate, no regulariser, no clipping).
inline void implemented_meta_gradient(const MetaSnapshot& sn, FeatureVector& grad_c,
                                      FeatureVector& grad_pi) {
  const fd_detail::MetaReplay base = fd_detail::replay_meta(sn, sn.omega_c, sn.omega_pi);

  MetaWeights mw;
  mw.omega_c = sn.omega_c;
  mw.omega_pi = sn.policy_head ? sn.omega_pi : FeatureVector{};
  mw.activation = sn.activation;
  mw.alpha_c = 1.0;
  mw.alpha_rho = 1.0;
  mw.l2_lambda = 0.0;
  mw.grad_clip = 0.0;  // disabled

  MetaSensitivity ms(sn.nu0.size(), sn.omega_c.size(), sn.policy_head ? sn.num_actions : 0);
  const FeatureVector dc = cumulant_grad(mw, sn.obs_next);
  if (sn.policy_head) {
    const FeatureVector pi = target_policy(mw);
    const FeatureVector dr = rho_grad(pi, sn.action, sn.mu);
    accumulate_sensitivity(ms, sn.alpha_v, base.update, dc, &dr);
  } else {
    accumulate_sensitivity(ms, sn.alpha_v, base.update, dc, nullptr);
  }

  const std::size_t v_index = sn.obs_ctl.size();
  const double dl_dv = -2.0 * base.delta_ctl * sn.w_row[v_index];

  MetaWeights probe = mw;
  meta_update(probe, ms, dl_dv, sn.s_emit);
  grad_c.resize(sn.omega_c.size());
  for (std::size_t j = 0; j < grad_c.size(); ++j) grad_c[j] = mw.omega_c[j] - probe.omega_c[j];
  if (sn.policy_head) {
    grad_pi.resize(sn.omega_pi.size());
    for (std::size_t j = 0; j < grad_pi.size(); ++j) {
      grad_pi[j] = mw.omega_pi[j] - probe.omega_pi[j];
    }
  } else {
    grad_pi.clear();
  }
}

// Central finite differences of the frozen one-step loss with respect to
// every meta-weight, compared against the implemented gradient. Returns the
// max relative error over `trials` random snapshots.
inline double meta_gradient_check(Rng& rng, int trials, double h = 1e-5) {
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const MetaSnapshot sn = random_meta_snapshot(rng, trial % 2 == 0);
    FeatureVector grad_c, grad_pi;
    implemented_meta_gradient(sn, grad_c, grad_pi);

    for (std::size_t j = 0; j < sn.omega_c.size(); ++j) {
      FeatureVector wc = sn.omega_c;
      wc[j] = sn.omega_c[j] + h;
      const double up = fd_detail::replay_meta(sn, wc, sn.omega_pi).loss;
      wc[j] = sn.omega_c[j] - h;
      const double dn = fd_detail::replay_meta(sn, wc, sn.omega_pi).loss;
      worst = std::max(worst, rel_err(grad_c[j], (up - dn) / (2.0 * h)));
    }
    if (sn.policy_head) {
      for (std::size_t j = 0; j < sn.omega_pi.size(); ++j) {
        FeatureVector wp = sn.omega_pi;
        wp[j] = sn.omega_pi[j] + h;
        const double up = fd_detail::replay_meta(sn, sn.omega_c, wp).loss;
        wp[j] = sn.omega_pi[j] - h;
        const double dn = fd_detail::replay_meta(sn, sn.omega_c, wp).loss;
        worst = std::max(worst, rel_err(grad_pi[j], (up - dn) / (2.0 * h)));
      }
    }
  }
  return worst;
}

}  // namespace gvfmeta
