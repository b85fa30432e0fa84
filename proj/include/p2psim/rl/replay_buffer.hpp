#pragma once

#include <cstddef>
#include <vector>

#include "p2psim/util/random.hpp"

namespace p2psim::rl {

struct Transition {
  std::vector<double> obs;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_obs;
  bool done = false;
};

// Fixed-capacity ring buffer; the oldest transition is overwritten first.
class ReplayBuffer {
public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return items_.at(i); }

  // Uniform sampling with replacement.
  std::vector<std::size_t> sample_indices(std::size_t batch, util::Rng& rng) const;

private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

} // namespace p2psim::rl
