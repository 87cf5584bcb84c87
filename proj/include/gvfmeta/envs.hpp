#pragma once

#include <cstddef>
#include <cstdint>

#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// Diagnostic channel. Never fed to a learner except the designated oracle
// baseline, which consumes `phase` on Monsoon World.
struct EnvInfo {
  int phase = -1;     // Monsoon: true season phase in {0..3}
  int clock = -1;     // Frost Hollow: hazard clock
  int position = -1;  // Frost Hollow: agent position
  int heat = -1;      // Frost Hollow: raw accumulated heat
};

struct StepResult {
  FeatureVector observation;
  double reward = 0.0;
  EnvInfo info;
};

// Monsoon World: a four-phase season cycle the agent cannot observe. Phases
// {0,1} are drought, {2,3} are monsoon. Watering (action 1) pays during
// drought, not watering (action 0) pays during monsoon, and time advances
// regardless of the action. The observation is [growth_bit, bias] where the
// growth bit is the reward just produced.
class MonsoonWorld {
 public:
  static constexpr int kNumActions = 2;
  static constexpr std::size_t kObsDim = 2;
  static constexpr int kActNoWater = 0;
  static constexpr int kActWater = 1;

  int num_actions() const { return kNumActions; }
  std::size_t obs_dim() const { return kObsDim; }
  int phase() const { return phase_; }

  StepResult reset() {
    phase_ = 0;
    StepResult r;
    r.observation = {0.0, 1.0};
    r.info.phase = phase_;
    return r;
  }

  StepResult step(int action) {
    if (action != kActNoWater && action != kActWater) {
      throw config_error("MonsoonWorld::step: invalid action");
    }
    const bool drought = phase_ < 2;
    const double reward =
        ((drought && action == kActWater) || (!drought && action == kActNoWater)) ? 1.0 : 0.0;
    phase_ = (phase_ + 1) % 4;
    StepResult r;
    r.observation = {reward, 1.0};
    r.reward = reward;
    r.info.phase = phase_;
    return r;
  }

  // The correct first action pays immediately.
  static int min_steps_to_reward() { return 1; }

 private:
  int phase_ = 0;
};

// Frost Hollow: a linear walk with a fire in the centre and shelters at both
// ends. Standing at the fire accumulates heat; a wind hazard gusts for
// `gust_steps` consecutive steps out of every `period`, wiping the heat of
// any agent caught outside a shelter. Accumulating `heat_threshold` units
// pays a single reward and resets the heat.
//
// Step order: the move resolves first, then hazard exposure is checked
// against the post-move position, then heat accrues at the fire, then the
// reward check runs, then the clock advances. The observation is
// [one-hot position (walk_length), hazard bit, heat / heat_threshold].
class FrostHollow {
 public:
  struct Params {
    int walk_length = 7;
    int heat_threshold = 12;
    int period = 8;
    int gust_steps = 2;  // hazard active on the last `gust_steps` clocks
  };

  static constexpr int kNumActions = 3;
  static constexpr int kActLeft = 0;
  static constexpr int kActRight = 1;
  static constexpr int kActStay = 2;

  FrostHollow() : FrostHollow(Params{}) {}
  explicit FrostHollow(const Params& p) : p_(p), fire_(p.walk_length / 2) {
    if (p_.walk_length < 3 || p_.period < 1 || p_.gust_steps < 0 || p_.gust_steps > p_.period ||
        p_.heat_threshold < 1) {
      throw config_error("FrostHollow: bad parameters");
    }
  }

  int num_actions() const { return kNumActions; }
  std::size_t obs_dim() const { return static_cast<std::size_t>(p_.walk_length) + 2; }
  const Params& params() const { return p_; }
  int fire_position() const { return fire_; }
  int position() const { return pos_; }
  int heat() const { return heat_; }
  int clock() const { return clock_; }

  bool hazard_active(int clock) const { return clock >= p_.period - p_.gust_steps; }
  bool shelter(int pos) const { return pos == 0 || pos == p_.walk_length - 1; }

  // Diagnostic hook for exhaustive-search oracles; not used by learners.
  void set_state(int pos, int heat, int clock) {
    if (pos < 0 || pos >= p_.walk_length || heat < 0 || heat > p_.heat_threshold || clock < 0 ||
        clock >= p_.period) {
      throw config_error("FrostHollow::set_state: out of range");
    }
    pos_ = pos;
    heat_ = heat;
    clock_ = clock;
  }

  // The walk starts at the fire with no heat and the hazard clock at zero.
  StepResult reset() {
    pos_ = fire_;
    heat_ = 0;
    clock_ = 0;
    StepResult r;
    r.observation = observe();
    fill_info(r.info);
    return r;
  }

  StepResult step(int action) {
    int delta;
    switch (action) {
      case kActLeft: delta = -1; break;
      case kActRight: delta = 1; break;
      case kActStay: delta = 0; break;
      default: throw config_error("FrostHollow::step: invalid action");
    }
    pos_ = std::min(std::max(pos_ + delta, 0), p_.walk_length - 1);
    double reward = 0.0;
    if (hazard_active(clock_) && !shelter(pos_)) {
      heat_ = 0;
    } else if (pos_ == fire_) {
      heat_ += 1;
    }
    if (heat_ >= p_.heat_threshold) {
      reward = 1.0;
      heat_ = 0;
    }
    clock_ = (clock_ + 1) % p_.period;
    StepResult r;
    r.observation = observe();
    r.reward = reward;
    fill_info(r.info);
    return r;
  }

  // Analytic minimum steps to the first reward under optimal play for a walk
  // starting at the fire. Derivation: the first safe window allows
  // (safe - dist + 1) units before the retreat must begin, every later
  // window carries (safe - 2*dist + 2) units through the hazard, and the
  // final window needs no retreat. safe = period - gust_steps, dist =
  // fire-to-shelter distance. The BFS oracle in the test suite enumerates
  // the full state space and confirms these numbers.
  int min_steps_to_reward() const {
    const int T = p_.heat_threshold;
    if (p_.gust_steps == 0) return T;
    const int dist = fire_;
    const int safe = p_.period - p_.gust_steps;
    const int first = safe - dist + 1;
    if (first >= T) return T;
    const int steady = std::max(safe - 2 * dist + 2, 0);
    const int final_window = safe - dist + 1;
    if (steady == 0 && final_window < T - first) return -1;  // unreachable
    int k = 0;
    if (steady > 0) {
      const int need = T - first - final_window;
      k = need > 0 ? (need + steady - 1) / steady : 0;
    }
    const int in_final = T - first - k * steady;
    const int clock_of_last = (dist - 1) + in_final - 1;
    return (k + 1) * p_.period + clock_of_last + 1;
  }

 private:
  FeatureVector observe() const {
    FeatureVector o(obs_dim(), 0.0);
    o[static_cast<std::size_t>(pos_)] = 1.0;
    o[static_cast<std::size_t>(p_.walk_length)] = hazard_active(clock_) ? 1.0 : 0.0;
    o[static_cast<std::size_t>(p_.walk_length) + 1] =
        static_cast<double>(heat_) / static_cast<double>(p_.heat_threshold);
    return o;
  }

  void fill_info(EnvInfo& info) const {
    info.clock = clock_;
    info.position = pos_;
    info.heat = heat_;
  }

  Params p_;
  int fire_;
  int pos_ = 0;
  int heat_ = 0;
  int clock_ = 0;
};

}  // namespace gvfmeta
