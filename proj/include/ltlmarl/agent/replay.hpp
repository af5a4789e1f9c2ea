#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>
#include <vector>

namespace ltlmarl::agent {

/// Fixed-capacity ring buffer with uniform sampling (with replacement).
template <class T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 25000) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
    items_.reserve(capacity);
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[next_] = std::move(item);
    }
    next_ = (next_ + 1) % capacity_;
    ++pushed_;
  }

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  /// Items ever pushed, including overwritten ones.
  std::size_t total_pushed() const noexcept { return pushed_; }
  const T& operator[](std::size_t i) const { return items_.at(i); }

  /// `n` uniformly drawn items; empty when fewer than `n` are stored.
  template <class Rng>
  std::vector<const T*> sample(std::size_t n, Rng& rng) const {
    std::vector<const T*> out;
    if (items_.size() < n) return out;
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(&items_[pick(rng)]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<T> items_;
  std::size_t next_ = 0;
  std::size_t pushed_ = 0;
};

}  // namespace ltlmarl::agent
