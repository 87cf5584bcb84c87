#pragma once

// Fast oracle and property checks shared by the test suite and the CLI
// `verify` subcommand.

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "gvfmeta/bfs_oracle.hpp"
#include "gvfmeta/envs.hpp"
#include "gvfmeta/fd_oracle.hpp"
#include "gvfmeta/gvf.hpp"
#include "gvfmeta/rng.hpp"

namespace gvfmeta {

// First 64 outputs of Rng(0); frozen. Bit-exactness across platforms is part
// of the generator's contract.
inline const std::array<std::uint64_t, 64>& rng_golden_seed0() {
  static const std::array<std::uint64_t, 64> golden = {
      0xe220a8397b1dcdafull, 0x6e789e6aa1b965f4ull, 0x06c45d188009454full, 0xf88bb8a8724c81ecull,
      0x1b39896a51a8749bull, 0x53cb9f0c747ea2eaull, 0x2c829abe1f4532e1ull, 0xc584133ac916ab3cull,
      0x3ee5789041c98ac3ull, 0xf3b8488c368cb0a6ull, 0x657eecdd3cb13d09ull, 0xc2d326e0055bdef6ull,
      0x8621a03fe0bbdb7bull, 0x8e1f7555983aa92full, 0xb54e0f1600cc4d19ull, 0x84bb3f97971d80abull,
      0x7d29825c75521255ull, 0xc3cf17102b7f7f86ull, 0x3466e9a083914f64ull, 0xd81a8d2b5a4485acull,
      0xdb01602b100b9ed7ull, 0xa9038a921825f10dull, 0xedf5f1d90dca2f6aull, 0x54496ad67bd2634cull,
      0xdd7c01d4f5407269ull, 0x935e82f1db4c4f7bull, 0x69b82ebc92233300ull, 0x40d29eb57de1d510ull,
      0xa2f09dabb45c6316ull, 0xee521d7a0f4d3872ull, 0xf16952ee72f3454full, 0x377d35dea8e40225ull,
      0x0c7de8064963bab0ull, 0x05582d37111ac529ull, 0xd254741f599dc6f7ull, 0x69630f7593d108c3ull,
      0x417ef96181daa383ull, 0x3c3c41a3b43343a1ull, 0x6e19905dcbe531dfull, 0x4fa9fa7324851729ull,
      0x84eb4454a792922aull, 0x134f7096918175ceull, 0x07dc930b302278a8ull, 0x12c015a97019e937ull,
      0xcc06c31652ebf438ull, 0xecee65630a691e37ull, 0x3e84ecb1763e79adull, 0x690ed476743aae49ull,
      0x774615d7b1a1f2e1ull, 0x22b353f04f4f52daull, 0xe3ddd86ba71a5eb1ull, 0xdf268adeb6513356ull,
      0x2098eb73d4367d77ull, 0x03d6845323ce3c71ull, 0xc952c5620043c714ull, 0x9b196bca844f1705ull,
      0x30260345dd9e0ec1ull, 0xcf448a5882bb9698ull, 0xf4a578dccbc87656ull, 0xbfdeaed9a17b3c8full,
      0xed79402d1d5c5d7bull, 0x55f070ab1cbbf170ull, 0x3e00a34929a88f1dull, 0xe255b237b8bb18fbull};
  return golden;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline CheckResult check_rng_golden() {
  CheckResult res{"rng_golden_seed0", true, ""};
  Rng rng(0);
  for (std::size_t i = 0; i < rng_golden_seed0().size(); ++i) {
    const std::uint64_t got = rng.next_u64();
    if (got != rng_golden_seed0()[i]) {
      res.pass = false;
      std::ostringstream os;
      os << "mismatch at index " << i;
      res.detail = os.str();
      return res;
    }
  }
  res.detail = "64 outputs match";
  return res;
}

inline CheckResult check_monsoon_rules() {
  CheckResult res{"monsoon_rules", true, ""};
  for (int phase = 0; phase < 4; ++phase) {
    int paying = 0;
    for (int a = 0; a < 2; ++a) {
      MonsoonWorld env;
      env.reset();
      for (int k = 0; k < phase; ++k) env.step(0);
      StepResult sr = env.step(a);
      if (sr.reward >= 1.0) ++paying;
      if (sr.observation.size() != 2 || sr.observation[0] != sr.reward ||
          sr.observation[1] != 1.0) {
        res.pass = false;
        res.detail = "observation must be [growth_bit, bias]";
        return res;
      }
    }
    if (paying != 1) {
      res.pass = false;
      res.detail = "each phase must have exactly one rewarding action";
      return res;
    }
  }
  res.detail = "4 phases x 2 actions enumerated";
  return res;
}

inline CheckResult check_frosthollow_oracle() {
  CheckResult res{"frosthollow_bfs_oracle", true, ""};
  FrostHollow::Params p;
  FrostHollow env(p);
  const int analytic = env.min_steps_to_reward();
  const int bfs = bfs_min_steps_to_reward(p);
  FrostHollow::Params calm = p;
  calm.gust_steps = 0;
  FrostHollow calm_env(calm);
  const int calm_analytic = calm_env.min_steps_to_reward();
  const int calm_bfs = bfs_min_steps_to_reward(calm);
  std::ostringstream os;
  os << "min steps: analytic " << analytic << ", bfs " << bfs << "; no-hazard: analytic "
     << calm_analytic << ", bfs " << calm_bfs;
  res.detail = os.str();
  res.pass = analytic == bfs && calm_analytic == calm_bfs && calm_bfs == p.heat_threshold;
  return res;
}

inline CheckResult check_mlp_gradients(int trials = 100) {
  CheckResult res{"mlp_gradient_fd", true, ""};
  Rng rng(2024);
  const double worst = mlp_gradient_check(rng, trials);
  std::ostringstream os;
  os << "max rel err " << worst << " over " << trials << " nets";
  res.detail = os.str();
  res.pass = worst < 1e-4;
  return res;
}

inline CheckResult check_meta_gradients(int trials = 100) {
  CheckResult res{"meta_gradient_fd", true, ""};
  Rng rng(7);
  const double worst = meta_gradient_check(rng, trials);
  std::ostringstream os;
  os << "max rel err " << worst << " over " << trials << " snapshots";
  res.detail = os.str();
  res.pass = worst < 1e-4;
  return res;
}

// Learns the two expert echo GVFs on the deterministic Monsoon cycle from a
// uniform-random behaviour stream, with the true phase one-hot as the GVF
// state (diagnostic info channel; this isolates the learner from state
// aliasing). The fixed point is the analytic discounted time-to-event table.
inline CheckResult check_echo_fixed_point(long long steps = 50000) {
  CheckResult res{"echo_gvf_fixed_point", true, ""};
  MonsoonWorld env;
  StepResult sr = env.reset();
  Rng rng(11);
  std::vector<GvfSpec> specs = echo_expert_pair(0.1, 0.0);
  std::vector<PredictionState> preds(2, PredictionState(4));
  std::vector<double> gamma_prev(2, 0.0);
  FeatureVector s_prev(4, 0.0);
  s_prev[static_cast<std::size_t>(sr.info.phase)] = 1.0;
  for (long long t = 0; t < steps; ++t) {
    const int a = static_cast<int>(rng.uniform_int(2));
    sr = env.step(a);
    FeatureVector s_next(4, 0.0);
    s_next[static_cast<std::size_t>(sr.info.phase)] = 1.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const double c = sr.reward >= 1.0 ? 1.0 : 0.0;
      GvfTransition tr;
      tr.s_nu = &s_prev;
      tr.s_nu_next = &s_next;
      tr.cumulant = c;
      tr.gamma = gamma_prev[i];
      tr.gamma_next = c >= 1.0 ? 0.0 : specs[i].gamma_continue;
      tr.pi_prob = specs[i].fixed_policy[static_cast<std::size_t>(a)];
      tr.mu_prob = 0.5;
      gvf_update(preds[i], specs[i], tr);
      gamma_prev[i] = tr.gamma_next;
    }
    s_prev = s_next;
  }
  // Phase tables for "reward while watering" and "reward while not watering".
  const FeatureVector expect_water = {1.0, 1.0, 0.81, 0.9};
  const FeatureVector expect_no_water = {0.81, 0.9, 1.0, 1.0};
  double worst = 0.0;
  for (std::size_t p = 0; p < 4; ++p) {
    worst = std::max(worst, std::abs(preds[0].nu[p] - expect_water[p]));
    worst = std::max(worst, std::abs(preds[1].nu[p] - expect_no_water[p]));
  }
  std::ostringstream os;
  os << "max abs err vs 0.9^k table: " << worst;
  res.detail = os.str();
  res.pass = worst < 1e-3;
  return res;
}

inline std::vector<CheckResult> run_selfchecks(int gradient_trials = 100) {
  std::vector<CheckResult> out;
  out.push_back(check_rng_golden());
  out.push_back(check_monsoon_rules());
  out.push_back(check_frosthollow_oracle());
  out.push_back(check_mlp_gradients(gradient_trials));
  out.push_back(check_meta_gradients(gradient_trials));
  out.push_back(check_echo_fixed_point());
  return out;
}

}  // namespace gvfmeta
