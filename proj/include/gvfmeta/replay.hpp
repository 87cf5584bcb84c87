#pragma once

#include <cstddef>
#include <vector>

#include "gvfmeta/rng.hpp"
#include "gvfmeta/vec.hpp"

namespace gvfmeta {

// Uniform replay memory for the network control learner. Transitions never
// terminate (continuing tasks), so no done flag is stored.
class ReplayBuffer {
 public:
  struct Transition {
    FeatureVector s;
    int action = 0;
    double reward = 0.0;
    FeatureVector s_next;
  };

  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  void push(FeatureVector s, int action, double reward, FeatureVector s_next) {
    Transition t{std::move(s), action, reward, std::move(s_next)};
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[write_] = std::move(t);
    }
    write_ = (write_ + 1) % capacity_;
  }

  const Transition& sample(Rng& rng) const {
    return data_[static_cast<std::size_t>(rng.uniform_int(data_.size()))];
  }

 private:
  std::size_t capacity_;
  std::size_t write_ = 0;
  std::vector<Transition> data_;
};

}  // namespace gvfmeta
