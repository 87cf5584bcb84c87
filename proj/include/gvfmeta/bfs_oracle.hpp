#pragma once

#include <deque>
#include <tuple>
#include <vector>

#include "gvfmeta/envs.hpp"

namespace gvfmeta {

// Brute-force search over the full (position, heat, clock) product space of
// Frost Hollow. These routines drive the real environment step function
// through the set_state hook, so they are independent of the closed-form
// min_steps_to_reward derivation they are used to check.

namespace bfs_detail {

inline int state_index(const FrostHollow::Params& p, int pos, int heat, int clock) {
  return (pos * (p.heat_threshold + 1) + heat) * p.period + clock;
}

}  // namespace bfs_detail

// Minimum number of steps until the first reward, starting from the given
// state (defaults to the reset state).
inline int bfs_min_steps_to_reward(const FrostHollow::Params& params, int pos0 = -1, int heat0 = 0,
                                   int clock0 = 0) {
  FrostHollow probe(params);
  if (pos0 < 0) {
    probe.reset();
    pos0 = probe.position();
    heat0 = probe.heat();
    clock0 = probe.clock();
  }
  const int n_states = params.walk_length * (params.heat_threshold + 1) * params.period;
  std::vector<int> dist(static_cast<std::size_t>(n_states), -1);
  std::deque<std::tuple<int, int, int>> queue;
  dist[static_cast<std::size_t>(bfs_detail::state_index(params, pos0, heat0, clock0))] = 0;
  queue.emplace_back(pos0, heat0, clock0);
  while (!queue.empty()) {
    auto [pos, heat, clock] = queue.front();
    queue.pop_front();
    const int d = dist[static_cast<std::size_t>(bfs_detail::state_index(params, pos, heat, clock))];
    for (int a = 0; a < FrostHollow::kNumActions; ++a) {
      probe.set_state(pos, heat, clock);
      const StepResult r = probe.step(a);
      if (r.reward > 0.0) return d + 1;
      const int idx =
          bfs_detail::state_index(params, probe.position(), probe.heat(), probe.clock());
      if (dist[static_cast<std::size_t>(idx)] < 0) {
        dist[static_cast<std::size_t>(idx)] = d + 1;
        queue.emplace_back(probe.position(), probe.heat(), probe.clock());
      }
    }
  }
  return -1;
}

// Follows a shortest-path-to-reward policy repeatedly and returns the gaps
// between consecutive rewards. Demonstrates what a deterministic optimal
// controller achieves in steady state.
inline std::vector<int> bfs_reward_spacings(const FrostHollow::Params& params, int num_rewards) {
  FrostHollow env(params);
  env.reset();
  std::vector<int> spacings;
  int steps_since = 0;
  while (static_cast<int>(spacings.size()) < num_rewards) {
    // One BFS from the current state, then walk the first step of the
    // shortest path; recomputing each step keeps this simple and exact.
    int best_action = -1;
    int best = -1;
    for (int a = 0; a < FrostHollow::kNumActions; ++a) {
      FrostHollow probe(params);
      probe.set_state(env.position(), env.heat(), env.clock());
      StepResult r = probe.step(a);
      int d = r.reward > 0.0
                  ? 0
                  : bfs_min_steps_to_reward(params, probe.position(), probe.heat(), probe.clock());
      if (d >= 0 && (best < 0 || d < best)) {
        best = d;
        best_action = a;
      }
    }
    StepResult r = env.step(best_action);
    ++steps_since;
    if (r.reward > 0.0) {
      spacings.push_back(steps_since);
      steps_since = 0;
    }
    if (steps_since > 10000) throw numeric_error("bfs_reward_spacings: no reward reachable");
  }
  return spacings;
}

// Exact maximum cumulative reward attainable over a fixed horizon from the
// reset state (dynamic program over the full state space).
inline int max_rewards_over_horizon(const FrostHollow::Params& params, int horizon) {
  FrostHollow probe(params);
  probe.reset();
  const int n_states = params.walk_length * (params.heat_threshold + 1) * params.period;
  std::vector<int> value(static_cast<std::size_t>(n_states), 0);
  std::vector<int> next(static_cast<std::size_t>(n_states), 0);
  for (int t = 0; t < horizon; ++t) {
    for (int pos = 0; pos < params.walk_length; ++pos) {
      for (int heat = 0; heat <= params.heat_threshold; ++heat) {
        for (int clock = 0; clock < params.period; ++clock) {
          int best = 0;
          for (int a = 0; a < FrostHollow::kNumActions; ++a) {
            probe.set_state(pos, heat, clock);
            const StepResult r = probe.step(a);
            const int v =
                (r.reward > 0.0 ? 1 : 0) +
                value[static_cast<std::size_t>(
                    bfs_detail::state_index(params, probe.position(), probe.heat(), probe.clock()))];
            best = std::max(best, v);
          }
          next[static_cast<std::size_t>(bfs_detail::state_index(params, pos, heat, clock))] = best;
        }
      }
    }
    value.swap(next);
  }
  probe.reset();
  return value[static_cast<std::size_t>(
      bfs_detail::state_index(params, probe.position(), probe.heat(), probe.clock()))];
}

}  // namespace gvfmeta
