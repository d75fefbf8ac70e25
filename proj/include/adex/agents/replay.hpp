#pragma once

#include <cstddef>
#include <vector>

#include "adex/nn/network.hpp"
#include "adex/rng.hpp"

namespace adex::agents {

struct Transition {
  nn::History input;
  std::size_t action = 0;
  double reward = 0.0;
  nn::History next_input;
  bool terminal = false;
};

/// FIFO ring buffer of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 2000);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  void push(Transition t);

  /// i-th oldest transition still held.
  const Transition& at(std::size_t i) const;

  /// Uniform sample of `count` distinct transitions (partial Fisher-Yates).
  std::vector<const Transition*> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // index of the oldest entry once full
  std::vector<Transition> items_;
};

/// eps_k = max(start * decay^k, floor), k counting gradient updates.
struct EpsilonSchedule {
  double start = 0.95;
  double decay = 0.99;
  double floor = 0.01;

  double value(std::size_t k) const;
};

}  // namespace adex::agents
