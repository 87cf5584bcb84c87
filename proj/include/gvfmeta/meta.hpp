#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gvfmeta/gvf.hpp"
#include "gvfmeta/vec.hpp"

namespace gvfmeta {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline FeatureVector softmax(const FeatureVector& z) {
  FeatureVector p(z.size(), 0.0);
  double zmax = z[argmax(z)];
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

enum class CumulantActivation { kSigmoid, kLinear };

// Meta-weights of one GVF: the cumulant head over observation features and,
// where the target policy is learned, a fixed (observation-independent)
// policy head over actions.
struct MetaWeights {
  FeatureVector omega_c;
  FeatureVector omega_pi;  // empty when the GVF has no policy head
  CumulantActivation activation = CumulantActivation::kSigmoid;
  double alpha_c = 0.1;
  double alpha_rho = 0.001;
  double l2_lambda = 0.001;
  double grad_clip = 1.0;  // L-inf clip of the meta-gradient; <= 0 disables

  bool has_policy_head() const { return !omega_pi.empty(); }
};

// c = sigmoid(omega_c . obs) or omega_c . obs.
inline double cumulant(const MetaWeights& mw, const FeatureVector& obs) {
  const double z = dot(mw.omega_c, obs);
  return mw.activation == CumulantActivation::kSigmoid ? sigmoid(z) : z;
}

// dc/d omega_c at the given observation.
inline FeatureVector cumulant_grad(const MetaWeights& mw, const FeatureVector& obs) {
  FeatureVector g = obs;
  if (mw.activation == CumulantActivation::kSigmoid) {
    const double s = sigmoid(dot(mw.omega_c, obs));
    const double slope = s * (1.0 - s);
    for (double& x : g) x *= slope;
  }
  return g;
}

// pi = softmax(omega_pi); a fixed distribution, not a function of state.
inline FeatureVector target_policy(const MetaWeights& mw) { return softmax(mw.omega_pi); }

// d rho / d omega_pi at the taken action: the softmax Jacobian row divided
// by the behaviour probability.
inline FeatureVector rho_grad(const FeatureVector& pi, std::size_t action, double mu_prob) {
  FeatureVector g(pi.size(), 0.0);
  for (std::size_t j = 0; j < pi.size(); ++j) {
    const double jac = pi[action] * ((j == action ? 1.0 : 0.0) - pi[j]);
    g[j] = jac / mu_prob;
  }
  return g;
}

// Accumulated sensitivity of the prediction weights to the meta-weights:
// h = d nu / d omega, summed over the per-step weight updates. Carries the
// chain rule from the control loss into the meta-weights.
struct MetaSensitivity {
  // h_c[i][j] = d nu_i / d omega_c_j; likewise h_pi over the policy head.
  std::vector<FeatureVector> h_c;
  std::vector<FeatureVector> h_pi;

  MetaSensitivity() = default;
  MetaSensitivity(std::size_t nu_dim, std::size_t omega_c_dim, std::size_t omega_pi_dim) {
    h_c.assign(nu_dim, FeatureVector(omega_c_dim, 0.0));
    if (omega_pi_dim > 0) h_pi.assign(nu_dim, FeatureVector(omega_pi_dim, 0.0));
  }

  void reset() {
    for (auto& row : h_c) row.assign(row.size(), 0.0);
    for (auto& row : h_pi) row.assign(row.size(), 0.0);
  }
};

// Adds one GVF update's contribution to the sensitivity. For the update
//   nu += alpha * delta * rho * inner        (inner = gamma*lambda*e + s)
// the cumulant head enters through delta (d delta / d c = 1):
//   h_c  += alpha * (rho * inner) outer dc/domega
// and the policy head through rho:
//   h_pi += alpha * delta * inner outer drho/domega.
// `decay` < 1 turns the running sum into an exponential average (ablation).
inline void accumulate_sensitivity(MetaSensitivity& ms, double alpha_v,
                                   const GvfUpdateResult& update, const FeatureVector& dc_domega,
                                   const FeatureVector* drho_domega, double decay = 1.0) {
  const std::size_t nu_dim = ms.h_c.size();
  for (std::size_t i = 0; i < nu_dim; ++i) {
    FeatureVector& row = ms.h_c[i];
    const double scale = alpha_v * update.rho * update.inner_trace[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = decay * row[j] + scale * dc_domega[j];
    }
  }
  if (!ms.h_pi.empty() && drho_domega != nullptr) {
    for (std::size_t i = 0; i < nu_dim; ++i) {
      FeatureVector& row = ms.h_pi[i];
      const double scale = alpha_v * update.delta_nu * update.inner_trace[i];
      for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = decay * row[j] + scale * (*drho_domega)[j];
      }
    }
  }
}

namespace meta_detail {

// grad_j = dL_dv * sum_i h[i][j] * s_nu[i], clipped, then a descent step
// with the L2 term: omega -= alpha * (grad + 2 * l2 * omega).
// Returns false (and leaves omega untouched) if the gradient is non-finite.
inline bool descend_head(FeatureVector& omega, const std::vector<FeatureVector>& h, double dl_dv,
                         const FeatureVector& s_nu, double alpha, double l2, double clip) {
  FeatureVector grad(omega.size(), 0.0);
  for (std::size_t j = 0; j < omega.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) acc += h[i][j] * s_nu[i];
    grad[j] = dl_dv * acc;
    if (!std::isfinite(grad[j])) return false;
  }
  if (clip > 0.0) {
    const double norm = linf_norm(grad);
    if (norm > clip) {
      const double scale = clip / norm;
      for (double& g : grad) g *= scale;
    }
  }
  for (std::size_t j = 0; j < omega.size(); ++j) {
    omega[j] -= alpha * (grad[j] + 2.0 * l2 * omega[j]);
  }
  return true;
}

}  // namespace meta_detail

// Meta-gradient descent step for one GVF (Delta omega = -alpha * dL/domega,
// L2-regularised). dl_dv is dL/dv for this GVF's prediction as emitted at
// the previous step, s_nu the GVF state it was emitted from. Returns false
// if the step was skipped because the gradient was non-finite.
inline bool meta_update(MetaWeights& mw, const MetaSensitivity& ms, double dl_dv,
                        const FeatureVector& s_nu) {
  bool ok = meta_detail::descend_head(mw.omega_c, ms.h_c, dl_dv, s_nu, mw.alpha_c, mw.l2_lambda,
                                      mw.grad_clip);
  if (mw.has_policy_head()) {
    ok = meta_detail::descend_head(mw.omega_pi, ms.h_pi, dl_dv, s_nu, mw.alpha_rho, mw.l2_lambda,
                                   mw.grad_clip) &&
         ok;
  }
  return ok;
}

}  // namespace gvfmeta
