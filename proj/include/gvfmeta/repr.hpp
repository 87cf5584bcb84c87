#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// --- Prediction-to-feature transforms -------------------------------------

// Recovers a time-to-event reading from a discounted echo value and
// normalises it by a horizon cap: clip((log v / log gamma_max) / cap, 0, 1).
// Values at or below gamma_max^cap saturate at 1.
inline FeatureVector log_transform(const FeatureVector& v, double gamma_max, int horizon_cap) {
  if (gamma_max <= 0.0 || gamma_max >= 1.0) throw config_error("log_transform: bad gamma_max");
  if (horizon_cap < 1) throw config_error("log_transform: bad horizon_cap");
  FeatureVector out(v.size(), 0.0);
  const double log_gamma = std::log(gamma_max);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double vi = std::max(v[i], 1e-12);
    const double steps = std::log(vi) / log_gamma;
    const double x = steps / static_cast<double>(horizon_cap);
    out[i] = std::min(std::max(x, 0.0), 1.0);
  }
  return out;
}

// Scales a transformed prediction from [0,1] into the [0,10) range the
// aggregator expects. The top end is nudged below 10 so a saturated
// transform (cold-start predictions clip to exactly 1) stays in range.
inline double aggregate_scale(double transformed) {
  const double v = 10.0 * std::min(std::max(transformed, 0.0), 1.0);
  return std::min(v, 10.0 - 1e-9);
}

// State aggregation of two scaled predictions into a one-hot memory:
// i = floor(v0 + v1 * 10). Pure function of its inputs.
inline FeatureVector aggregate(const FeatureVector& v_scaled, std::size_t memsize) {
  if (v_scaled.size() != 2) throw config_error("aggregate: expects exactly 2 predictions");
  if (memsize < 110) throw config_error("aggregate: memsize must be >= 110");
  for (double x : v_scaled) {
    if (!(x >= 0.0 && x < 10.0)) throw config_error("aggregate: input outside [0,10)");
  }
  const auto idx = static_cast<std::size_t>(std::floor(v_scaled[0] + v_scaled[1] * 10.0));
  if (idx >= memsize) throw config_error("aggregate: index out of range");
  FeatureVector out(memsize, 0.0);
  out[idx] = 1.0;
  return out;
}

// --- Bit cascade ------------------------------------------------------------

// Binary encoding of time elapsed since the last hazard onset: one
// single-step bin per clock tick of the hazard period plus the raw hazard
// bit. All bins stay zero until the first onset is seen.
class BitCascade {
 public:
  explicit BitCascade(std::size_t num_bins = 8) : num_bins_(num_bins) {}

  std::size_t dim() const { return num_bins_ + 1; }

  void reset() {
    steps_since_onset_ = -1;
    prev_bit_ = false;
  }

  // Call exactly once per environment step with the current hazard bit.
  FeatureVector update(bool hazard_bit) {
    if (hazard_bit && !prev_bit_) {
      steps_since_onset_ = 0;
    } else if (steps_since_onset_ >= 0) {
      ++steps_since_onset_;
    }
    prev_bit_ = hazard_bit;
    FeatureVector out(dim(), 0.0);
    if (steps_since_onset_ >= 0 && steps_since_onset_ < static_cast<long>(num_bins_)) {
      out[static_cast<std::size_t>(steps_since_onset_)] = 1.0;
    }
    out[num_bins_] = hazard_bit ? 1.0 : 0.0;
    return out;
  }

 private:
  std::size_t num_bins_;
  long steps_since_onset_ = -1;
  bool prev_bit_ = false;
};

// --- GVF state construction -------------------------------------------------

enum class GvfRepr {
  kIdentityBias,    // [obs, 1]
  kMonsoonAgg,      // one-hot of the growth bit
  kBitCascade,      // time-since-hazard-onset encoding (stateful)
  kPredictionAgg,   // one-hot cell of the previous step's prediction pair
  kActionOutcome,   // joint one-hots of the last two (action, outcome-bit) pairs
};

inline GvfRepr parse_gvf_repr(const std::string& id) {
  if (id == "identity_bias") return GvfRepr::kIdentityBias;
  if (id == "monsoon_agg") return GvfRepr::kMonsoonAgg;
  if (id == "bit_cascade") return GvfRepr::kBitCascade;
  if (id == "prediction_agg") return GvfRepr::kPredictionAgg;
  if (id == "action_outcome") return GvfRepr::kActionOutcome;
  throw config_error("unknown gvf representation: " + id);
}

// Builds a GVF's own feature vector from the raw observation. The bit
// cascade variant is stateful, so each GVF owns one builder and feeds it
// exactly once per step. The prediction-aggregation variant is built by the
// agent from the previous step's predictions instead of the observation.
class GvfStateBuilder {
 public:
  GvfStateBuilder() = default;
  GvfStateBuilder(GvfRepr repr, std::size_t obs_dim, std::size_t stimulus_index = 0,
                  std::size_t cascade_bins = 8, std::size_t agg_memsize = 110,
                  bool cascade_invert = false, std::size_t num_actions = 2)
      : repr_(repr), obs_dim_(obs_dim), stimulus_index_(stimulus_index), cascade_(cascade_bins),
        agg_memsize_(agg_memsize), cascade_invert_(cascade_invert), num_actions_(num_actions) {}

  GvfRepr repr() const { return repr_; }

  std::size_t dim() const {
    switch (repr_) {
      case GvfRepr::kIdentityBias: return obs_dim_ + 1;
      case GvfRepr::kMonsoonAgg: return 2;
      case GvfRepr::kBitCascade: return cascade_.dim();
      case GvfRepr::kPredictionAgg: return obs_dim_ + agg_memsize_;
      case GvfRepr::kActionOutcome: return 2 * num_actions_ * 2;
    }
    throw config_error("GvfStateBuilder: unknown representation");
  }

  void reset() {
    cascade_.reset();
    have_pair_[0] = have_pair_[1] = false;
  }

  // `action` is the action whose execution produced this observation; only
  // the action-outcome representation consumes it.
  FeatureVector build(const FeatureVector& obs, int action = -1) {
    check_dim(obs, obs_dim_, "GvfStateBuilder::build");
    switch (repr_) {
      case GvfRepr::kIdentityBias: {
        FeatureVector s = obs;
        s.push_back(1.0);
        return s;
      }
      case GvfRepr::kMonsoonAgg: {
        // The growth bit is the first observation entry.
        return obs[0] > 0.5 ? FeatureVector{0.0, 1.0} : FeatureVector{1.0, 0.0};
      }
      case GvfRepr::kBitCascade: {
        const bool bit = obs[stimulus_index_] > 0.5;
        return cascade_.update(cascade_invert_ ? !bit : bit);
      }
      case GvfRepr::kPredictionAgg:
        throw config_error("prediction_agg state is built from predictions, not observations");
      case GvfRepr::kActionOutcome: {
        // Shift in the newest (action, outcome-bit) pair; emit the last two
        // as joint one-hots. All zero until the pairs exist.
        pair_[1] = pair_[0];
        have_pair_[1] = have_pair_[0];
        if (action >= 0) {
          pair_[0] = static_cast<std::size_t>(action) * 2 +
                     (obs[stimulus_index_] > 0.5 ? 1 : 0);
          have_pair_[0] = true;
        } else {
          have_pair_[0] = false;
        }
        const std::size_t block = num_actions_ * 2;
        FeatureVector s(2 * block, 0.0);
        if (have_pair_[0]) s[pair_[0]] = 1.0;
        if (have_pair_[1]) s[block + pair_[1]] = 1.0;
        return s;
      }
    }
    throw config_error("GvfStateBuilder: unknown representation");
  }

 private:
  GvfRepr repr_ = GvfRepr::kIdentityBias;
  std::size_t obs_dim_ = 0;
  std::size_t stimulus_index_ = 0;
  BitCascade cascade_;
  std::size_t agg_memsize_ = 110;
  bool cascade_invert_ = false;
  std::size_t num_actions_ = 2;
  std::size_t pair_[2] = {0, 0};
  bool have_pair_[2] = {false, false};
};

// Joint prediction-and-observation state shared by the GVF collection:
// [obs | one-hot cell of the previous step's prediction pair]. The
// observation part is what lets the recurrent state track the environment
// rather than orbit on its own. Echo-style estimates live in log-space, so
// they pass through the time-to-event transform before aggregation;
// otherwise raw values are clamped into [0,10).
inline FeatureVector prediction_agg_state(const FeatureVector& obs, const FeatureVector& v_prev,
                                          std::size_t memsize, bool transform = false,
                                          double gamma_max = 0.9, int horizon_cap = 10) {
  if (v_prev.size() != 2) {
    throw config_error("prediction_agg_state: expects exactly 2 predictions");
  }
  FeatureVector scaled(2, 0.0);
  if (transform) {
    const FeatureVector tr = log_transform(v_prev, gamma_max, horizon_cap);
    for (std::size_t i = 0; i < 2; ++i) scaled[i] = aggregate_scale(tr[i]);
  } else {
    for (std::size_t i = 0; i < 2; ++i) {
      scaled[i] = std::min(std::max(v_prev[i], 0.0), 10.0 - 1e-9);
    }
  }
  FeatureVector s = obs;
  const FeatureVector cell = aggregate(scaled, memsize);
  s.insert(s.end(), cell.begin(), cell.end());
  return s;
}

}  // namespace gvfmeta
