#pragma once

#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// Linear action-value function: Q(s,a) = weights[a] . s.
// A semi-gradient update touches only the taken action's row.
class LinearQ {
 public:
  LinearQ(std::size_t num_actions, std::size_t state_dim, double learning_rate)
      : state_dim_(state_dim),
        learning_rate_(learning_rate),
        weights_(num_actions, FeatureVector(state_dim, 0.0)) {}

  std::size_t num_actions() const { return weights_.size(); }
  std::size_t state_dim() const { return state_dim_; }
  double learning_rate() const { return learning_rate_; }
  const std::vector<FeatureVector>& weights() const { return weights_; }
  std::vector<FeatureVector>& weights() { return weights_; }

  FeatureVector values(const FeatureVector& s) const {
    check_dim(s, state_dim_, "LinearQ::values");
    FeatureVector q(weights_.size(), 0.0);
    for (std::size_t a = 0; a < weights_.size(); ++a) q[a] = dot(weights_[a], s);
    return q;
  }

  double value(const FeatureVector& s, std::size_t a) const {
    check_dim(s, state_dim_, "LinearQ::value");
    return dot(weights_[a], s);
  }

  // weights[a] += alpha * delta * s
  void update(const FeatureVector& s, std::size_t a, double delta) {
    check_dim(s, state_dim_, "LinearQ::update");
    check_finite(delta, "LinearQ::update delta");
    if (a >= weights_.size()) throw config_error("LinearQ::update: bad action id");
    FeatureVector& row = weights_[a];
    for (std::size_t i = 0; i < state_dim_; ++i) row[i] += learning_rate_ * delta * s[i];
  }

 private:
  std::size_t state_dim_;
  double learning_rate_;
  std::vector<FeatureVector> weights_;
};

}  // namespace gvfmeta
