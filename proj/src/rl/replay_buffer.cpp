#include "p2psim/rl/replay_buffer.hpp"

#include "p2psim/error.hpp"

namespace p2psim::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ValidationError("replay buffer capacity must be positive");
  items_.reserve(capacity);
}

void ReplayBuffer::add(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, util::Rng& rng) const {
  if (items_.empty()) throw ValidationError("cannot sample from an empty replay buffer");
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = static_cast<std::size_t>(rng.below(items_.size()));
  return out;
}

} // namespace p2psim::rl
