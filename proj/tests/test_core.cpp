#include <doctest.h>

#include "gvfmeta/fd_oracle.hpp"
#include "gvfmeta/linear_q.hpp"
#include "gvfmeta/mlp.hpp"
#include "gvfmeta/rng.hpp"
#include "gvfmeta/selfcheck.hpp"
#include "gvfmeta/vec.hpp"

using namespace gvfmeta;

TEST_CASE("linear q values") {
  LinearQ q(2, 2, 0.1);
  CHECK(q.values({1.0, 2.0}) == FeatureVector{0.0, 0.0});

  q.weights()[0] = {0.0, 1.0};  // unit basis e_1
  CHECK(q.values({0.0, 3.5})[0] == doctest::Approx(3.5));

  q.weights()[0] = {1.0, 0.0};
  q.weights()[1] = {0.0, 2.0};
  const FeatureVector v = q.values({0.5, 0.25});
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(q.values({1.0}), config_error);
}

TEST_CASE("linear q update touches only the taken action") {
  LinearQ q(2, 2, 0.1);
  q.update({1.0, 0.0}, 0, 1.0);
  CHECK(q.weights()[0] == FeatureVector{0.1, 0.0});
  CHECK(q.weights()[1] == FeatureVector{0.0, 0.0});

  LinearQ q2(2, 2, 0.1);
  q2.update({1.0, 1.0}, 1, 0.0);
  CHECK(q2.weights()[1] == FeatureVector{0.0, 0.0});

  LinearQ q3(1, 1, 0.01);
  q3.update({2.0}, 0, -0.5);
  CHECK(q3.weights()[0][0] == doctest::Approx(-0.01));

  CHECK_THROWS_AS(q.update({1.0, 0.0}, 0, std::nan("")), numeric_error);
}

TEST_CASE("linear q update shrinks the squared error") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    LinearQ q(2, 4, 1e-3);
    FeatureVector s(4);
    for (double& x : s) x = 2.0 * rng.uniform01() - 1.0;
    for (auto& row : q.weights()) {
      for (double& w : row) w = 2.0 * rng.uniform01() - 1.0;
    }
    const double target = 2.0 * rng.uniform01() - 1.0;
    const double before = target - q.value(s, 0);
    q.update(s, 0, before);
    const double after = target - q.value(s, 0);
    CHECK(after * after <= before * before);
  }
}

TEST_CASE("mlp with zero weights outputs zeros") {
  MlpQ net(3, {4}, 2, 0.001);  // no init rng: all-zero parameters
  const FeatureVector q = net.forward({1.0, -2.0, 0.5});
  CHECK(q == FeatureVector{0.0, 0.0});
}

TEST_CASE("single linear layer reduces to linear q values") {
  Rng rng(5);
  MlpQ net(3, {}, 2, 0.001, &rng);
  LinearQ lin(2, 3, 0.001);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t i = 0; i < 3; ++i) lin.weights()[a][i] = net.layers()[0].w[a * 3 + i];
  }
  for (int k = 0; k < 10; ++k) {
    FeatureVector s(3);
    for (double& x : s) x = 2.0 * rng.uniform01() - 1.0;
    const FeatureVector a = net.forward(s);
    const FeatureVector b = lin.values(s);
    for (std::size_t i = 0; i < 2; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("mlp backward: linear case and zero output grad") {
  Rng rng(6);
  MlpQ net(3, {}, 2, 0.001, &rng);
  MlpQ::Tape tape;
  net.forward({0.3, -0.7, 1.1}, &tape);

  const MlpQ::Grads zero = net.backward(tape, {0.0, 0.0});
  for (const auto& gw : zero.w) {
    for (double g : gw) CHECK(g == 0.0);
  }
  for (double g : zero.input) CHECK(g == 0.0);

  // identity single layer: input grad for e_a is the weight row of a.
  const MlpQ::Grads g = net.backward(tape, {1.0, 0.0});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(g.input[i] == doctest::Approx(net.layers()[0].w[i]).epsilon(1e-12));
  }
}

TEST_CASE("mlp gradients match central finite differences") {
  Rng rng(2024);
  const double worst = mlp_gradient_check(rng, 100);
  CHECK(worst < 1e-4);
}

TEST_CASE("adam steps oppose the gradient") {
  MlpQ net(1, {}, 1, 0.01);
  net.layers()[0].w[0] = 1.0;
  MlpQ::Grads g;
  net.zero_grads(g);
  g.w[0][0] = 2.0;  // positive gradient: parameter must decrease
  net.apply_gradients(g);
  CHECK(net.layers()[0].w[0] < 1.0);
}

TEST_CASE("rng golden vector and ranges") {
  const CheckResult res = check_rng_golden();
  CHECK_MESSAGE(res.pass, res.detail);

  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.uniform_int(7) < 7);
  }

  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}
