#include <doctest.h>

#include "gvfmeta/fd_oracle.hpp"
#include "gvfmeta/meta.hpp"

using namespace gvfmeta;

TEST_CASE("cumulant heads") {
  MetaWeights mw;
  mw.omega_c = {-5.0};
  mw.activation = CumulantActivation::kSigmoid;
  CHECK(cumulant(mw, {1.0}) == doctest::Approx(0.0066928509242848554).epsilon(1e-12));

  mw.omega_c = {0.0};
  CHECK(cumulant(mw, {1.0}) == doctest::Approx(0.5));
  mw.activation = CumulantActivation::kLinear;
  CHECK(cumulant(mw, {1.0}) == 0.0);

  MetaWeights heat;
  heat.activation = CumulantActivation::kLinear;
  heat.omega_c.assign(9, 0.0);
  heat.omega_c[8] = 1.0;
  FeatureVector obs(9, 0.0);
  obs[8] = 0.5;
  CHECK(cumulant(heat, obs) == doctest::Approx(0.5));
}

TEST_CASE("cumulant gradient") {
  MetaWeights mw;
  mw.omega_c = {0.5, -0.5};
  mw.activation = CumulantActivation::kLinear;
  CHECK(cumulant_grad(mw, {0.3, 0.7}) == FeatureVector{0.3, 0.7});

  mw.activation = CumulantActivation::kSigmoid;
  const double s = sigmoid(0.5 * 0.3 - 0.5 * 0.7);
  const FeatureVector g = cumulant_grad(mw, {0.3, 0.7});
  CHECK(g[0] == doctest::Approx(s * (1 - s) * 0.3));
  CHECK(g[1] == doctest::Approx(s * (1 - s) * 0.7));
}

TEST_CASE("target policy softmax") {
  MetaWeights mw;
  mw.omega_pi = {0.0, 0.0};
  FeatureVector p = target_policy(mw);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));

  mw.omega_pi = {0.0, 20.0};
  p = target_policy(mw);
  CHECK(p[0] < 1e-8);
  CHECK(p[1] > 1.0 - 1e-8);

  mw.omega_pi = {1.0, 0.0};
  p = target_policy(mw);
  const double e = std::exp(1.0);
  CHECK(p[0] == doctest::Approx(e / (e + 1.0)).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-12));

  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    mw.omega_pi = {6.0 * rng.uniform01() - 3.0, 6.0 * rng.uniform01() - 3.0,
                   6.0 * rng.uniform01() - 3.0};
    p = target_policy(mw);
    double sum = 0.0;
    for (double x : p) {
      CHECK(x > 0.0);  // coverage for rho is guaranteed
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("rho gradient is the softmax jacobian over mu") {
  MetaWeights mw;
  mw.omega_pi = {1.0, 0.0};
  const FeatureVector pi = target_policy(mw);
  const FeatureVector g = rho_grad(pi, 0, 0.5);
  CHECK(g[0] == doctest::Approx(pi[0] * (1.0 - pi[0]) / 0.5));
  CHECK(g[1] == doctest::Approx(-pi[0] * pi[1] / 0.5));
}

TEST_CASE("cold-start sensitivity produces a zero meta-gradient") {
  MetaSensitivity ms(3, 2, 2);
  MetaWeights mw;
  mw.omega_c = {-5.0, -5.0};
  mw.omega_pi = {0.0, 0.0};
  mw.l2_lambda = 0.0;
  mw.alpha_c = 0.1;
  mw.alpha_rho = 0.1;
  const MetaWeights before = mw;
  CHECK(meta_update(mw, ms, 123.0, {1.0, 1.0, 1.0}));
  CHECK(mw.omega_c == before.omega_c);
  CHECK(mw.omega_pi == before.omega_pi);
}

TEST_CASE("single update sensitivity: h_c = alpha * outer(trace, obs)") {
  // Linear cumulant, on-policy (rho = 1), lambda = 0: trace equals s_nu.
  GvfSpec spec;
  spec.trace_decay = 0.0;
  spec.learning_rate = 0.25;
  PredictionState ps(2);
  const FeatureVector s{0.4, -0.6};
  const FeatureVector s_next{1.0, 0.0};
  GvfTransition tr;
  tr.s_nu = &s;
  tr.s_nu_next = &s_next;
  tr.cumulant = 0.3;
  tr.gamma = 0.9;
  tr.gamma_next = 0.9;
  tr.on_policy = true;
  const GvfUpdateResult res = gvf_update(ps, spec, tr);

  MetaSensitivity ms(2, 3, 0);
  const FeatureVector obs{1.0, 2.0, 3.0};
  accumulate_sensitivity(ms, spec.learning_rate, res, obs, nullptr);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(ms.h_c[i][j] == doctest::Approx(0.25 * s[i] * obs[j]));
    }
  }
}

TEST_CASE("meta update: no-op and L2-only behaviour") {
  MetaWeights mw;
  mw.omega_c = {-5.0};
  mw.alpha_c = 0.1;
  mw.l2_lambda = 0.0;
  MetaSensitivity ms(1, 1, 0);
  ms.h_c[0][0] = 1.0;
  meta_update(mw, ms, 0.0, {1.0});  // dL/dv = 0, no regulariser
  CHECK(mw.omega_c[0] == -5.0);

  mw.l2_lambda = 0.001;
  MetaSensitivity empty(1, 1, 0);
  meta_update(mw, empty, 0.0, {1.0});
  CHECK(mw.omega_c[0] == doctest::Approx(-4.999));  // 0.1 * 2 * 0.001 * 5

  // L2 alone drives |omega| monotonically toward zero.
  double prev = std::abs(mw.omega_c[0]);
  for (int k = 0; k < 100; ++k) {
    meta_update(mw, empty, 0.0, {1.0});
    CHECK(std::abs(mw.omega_c[0]) < prev);
    prev = std::abs(mw.omega_c[0]);
  }
}

TEST_CASE("meta update clips the gradient at the L-inf norm") {
  MetaWeights mw;
  mw.omega_c = {0.0, 0.0};
  mw.alpha_c = 1.0;
  mw.l2_lambda = 0.0;
  mw.grad_clip = 1.0;
  MetaSensitivity ms(1, 2, 0);
  ms.h_c[0][0] = 100.0;
  ms.h_c[0][1] = 50.0;
  meta_update(mw, ms, 1.0, {1.0});
  CHECK(mw.omega_c[0] == doctest::Approx(-1.0));   // clipped to the unit ball
  CHECK(mw.omega_c[1] == doctest::Approx(-0.5));  // direction preserved
}

TEST_CASE("meta update skips non-finite gradients") {
  MetaWeights mw;
  mw.omega_c = {1.0};
  mw.alpha_c = 0.5;
  MetaSensitivity ms(1, 1, 0);
  ms.h_c[0][0] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(meta_update(mw, ms, 1.0, {1.0}));
  CHECK(mw.omega_c[0] == 1.0);
}

TEST_CASE("sign: if raising omega raises the frozen one-step loss, omega falls") {
  // One observation feature, linear cumulant, on-policy. After the replayed
  // update nu = omega, the control weights make delta = 1 + v, so the loss
  // strictly increases with omega near omega0 > -1.
  MetaSnapshot sn;
  sn.policy_head = false;
  sn.activation = CumulantActivation::kLinear;
  sn.num_actions = 2;
  sn.obs_next = {1.0};
  sn.s_nu = {1.0};
  sn.s_nu_next = {0.0};
  sn.s_emit = {1.0};
  sn.e_prev = {0.0};
  sn.gamma = 0.9;
  sn.gamma_next = 0.0;
  sn.lambda = 0.0;
  sn.alpha_v = 1.0;
  sn.mu = 0.5;
  sn.nu0 = {0.0};
  sn.omega_c = {0.5};
  sn.obs_ctl = {0.0};
  sn.w_row = {0.0, -1.0, 0.0};  // delta = K + v
  sn.r_plus_boot = 1.0;

  FeatureVector grad_c, grad_pi;
  implemented_meta_gradient(sn, grad_c, grad_pi);
  CHECK(grad_c[0] > 0.0);  // descent therefore lowers omega

  MetaWeights mw;
  mw.omega_c = sn.omega_c;
  mw.activation = CumulantActivation::kLinear;
  mw.alpha_c = 0.01;
  mw.l2_lambda = 0.0;
  MetaSensitivity ms(1, 1, 0);
  GvfSpec spec;
  spec.trace_decay = 0.0;
  spec.learning_rate = 1.0;
  PredictionState ps(1);
  GvfTransition tr;
  tr.s_nu = &sn.s_nu;
  tr.s_nu_next = &sn.s_nu_next;
  tr.cumulant = cumulant(mw, sn.obs_next);
  tr.gamma = 0.9;
  tr.gamma_next = 0.0;
  tr.on_policy = true;
  const GvfUpdateResult res = gvf_update(ps, spec, tr);
  accumulate_sensitivity(ms, 1.0, res, cumulant_grad(mw, sn.obs_next), nullptr);
  const double v = predict(ps, sn.s_emit);
  const double delta = 1.0 + v;
  meta_update(mw, ms, -2.0 * delta * -1.0, sn.s_emit);
  CHECK(mw.omega_c[0] < sn.omega_c[0]);
}

TEST_CASE("meta-gradient matches central finite differences") {
  Rng rng(7);
  const double worst = meta_gradient_check(rng, 100);
  CHECK(worst < 1e-4);
}
