#pragma once

#include <cstddef>
#include <vector>

#include "gvfmeta/rng.hpp"
#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// Small fully-connected Q-network: rectified-linear hidden layers, identity
// output, exact reverse-mode gradients, adaptive-moment optimiser. The
// backward pass also produces the gradient with respect to the *input*
// vector, which the meta-learner needs to push the control loss into the
// prediction features.
class MlpQ {
 public:
  struct Layer {
    std::size_t in = 0, out = 0;
    std::vector<double> w;  // row-major [out x in]
    std::vector<double> b;  // [out]
  };

  struct Tape {
    FeatureVector input;
    // Post-activation output of every layer; pre-activations are recoverable
    // from these because relu(x) > 0 iff x > 0.
    std::vector<FeatureVector> activations;
  };

  struct Grads {
    std::vector<std::vector<double>> w;  // per layer, same shape as Layer::w
    std::vector<std::vector<double>> b;
    FeatureVector input;  // dL/d input
  };

  MlpQ() = default;

  // hidden = widths of hidden layers (may be empty: a single linear layer).
  MlpQ(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t num_actions,
       double learning_rate, Rng* init_rng = nullptr)
      : input_dim_(input_dim), learning_rate_(learning_rate) {
    std::size_t in = input_dim;
    for (std::size_t h : hidden) {
      layers_.push_back(make_layer(in, h, init_rng));
      in = h;
    }
    layers_.push_back(make_layer(in, num_actions, init_rng));
    reset_optimizer();
  }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t num_actions() const { return layers_.back().out; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  FeatureVector forward(const FeatureVector& s, Tape* tape = nullptr) const {
    check_dim(s, input_dim_, "MlpQ::forward");
    thread_local Tape scratch;
    Tape& t = tape ? *tape : scratch;
    t.input = s;
    t.activations.resize(layers_.size());
    const FeatureVector* x = &t.input;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const Layer& L = layers_[l];
      FeatureVector& y = t.activations[l];
      y.assign(L.out, 0.0);
      for (std::size_t o = 0; o < L.out; ++o) {
        y[o] = L.b[o] + dot4(&L.w[o * L.in], x->data(), L.in);
      }
      if (l + 1 < layers_.size()) {
        for (double& v : y) v = v > 0.0 ? v : 0.0;  // relu on hidden
      }
      x = &y;
    }
    return *x;
  }

  void zero_grads(Grads& g) const {
    g.w.resize(layers_.size());
    g.b.resize(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      g.w[l].assign(layers_[l].w.size(), 0.0);
      g.b[l].assign(layers_[l].b.size(), 0.0);
    }
    g.input.assign(input_dim_, 0.0);
  }

  // Gradients of dot(output_grad, q) with respect to all parameters and the
  // input. Exact; verified against central finite differences in the tests.
  Grads backward(const Tape& tape, const FeatureVector& output_grad) const {
    Grads g;
    zero_grads(g);
    backward_into(tape, output_grad, g);
    return g;
  }

  // Accumulating form used by the batched training loop.
  void backward_into(const Tape& tape, const FeatureVector& output_grad, Grads& g) const {
    check_dim(output_grad, layers_.back().out, "MlpQ::backward");
    thread_local FeatureVector up, down;
    up = output_grad;  // dL/d(activation of layer l)
    for (std::size_t li = layers_.size(); li-- > 0;) {
      const Layer& L = layers_[li];
      const FeatureVector& in_act = li == 0 ? tape.input : tape.activations[li - 1];
      // Hidden layers: push through the relu of *this* layer's output.
      if (li + 1 < layers_.size()) {
        const FeatureVector& out_act = tape.activations[li];
        for (std::size_t o = 0; o < L.out; ++o) {
          if (out_act[o] <= 0.0) up[o] = 0.0;
        }
      }
      for (std::size_t o = 0; o < L.out; ++o) g.b[li][o] += up[o];
      down.assign(L.in, 0.0);
      for (std::size_t o = 0; o < L.out; ++o) {
        const double dzo = up[o];
        if (dzo == 0.0) continue;
        const double* wr = &L.w[o * L.in];
        double* gw = &g.w[li][o * L.in];
        double* dn = down.data();
        const double* in = in_act.data();
        for (std::size_t i = 0; i < L.in; ++i) {
          gw[i] += dzo * in[i];
          dn[i] += dzo * wr[i];
        }
      }
      up.swap(down);
    }
    for (std::size_t i = 0; i < input_dim_; ++i) g.input[i] += up[i];
  }

  // One adaptive-moment step along -grads (callers pass dLoss/dparam).
  void apply_gradients(const Grads& grads) {
    ++step_;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      adam_step(layers_[l].w, grads.w[l], m_w_[l], v_w_[l], b1, b2, eps, bc1, bc2);
      adam_step(layers_[l].b, grads.b[l], m_b_[l], v_b_[l], b1, b2, eps, bc1, bc2);
    }
  }

  void reset_optimizer() {
    step_ = 0;
    m_w_.clear(); v_w_.clear(); m_b_.clear(); v_b_.clear();
    for (const Layer& L : layers_) {
      m_w_.emplace_back(L.w.size(), 0.0);
      v_w_.emplace_back(L.w.size(), 0.0);
      m_b_.emplace_back(L.b.size(), 0.0);
      v_b_.emplace_back(L.b.size(), 0.0);
    }
  }

 private:
  // Four-accumulator dot product: a fixed, reassociated summation order that
  // the compiler can keep in vector registers.
  static double dot4(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      s0 += a[i] * b[i];
      s1 += a[i + 1] * b[i + 1];
      s2 += a[i + 2] * b[i + 2];
      s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
  }

  static Layer make_layer(std::size_t in, std::size_t out, Rng* rng) {
    Layer L;
    L.in = in;
    L.out = out;
    L.w.assign(in * out, 0.0);
    L.b.assign(out, 0.0);
    if (rng) {
      const double scale = std::sqrt(2.0 / static_cast<double>(in));
      for (double& w : L.w) w = scale * rng->normal();
    }
    return L;
  }

  void adam_step(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, double b1, double b2, double eps, double bc1, double bc2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      p[i] -= learning_rate_ * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
  }

  std::size_t input_dim_ = 0;
  double learning_rate_ = 0.0;
  std::vector<Layer> layers_;
  long long step_ = 0;
  std::vector<std::vector<double>> m_w_, v_w_, m_b_, v_b_;
};

}  // namespace gvfmeta
