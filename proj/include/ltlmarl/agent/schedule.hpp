#pragma once

#include <algorithm>
#include <stdexcept>

namespace ltlmarl::agent {

struct EpsilonConfig {
  double start = 1.0;
  double floor = 0.05;
  double decay = 0.999;  // multiplicative, per anneal call
};

/// Exploration rate that only ever shrinks, never below its floor.
class EpsilonSchedule {
 public:
  explicit EpsilonSchedule(EpsilonConfig cfg = {}) : cfg_(cfg), value_(cfg.start) {
    if (!(cfg.floor >= 0 && cfg.floor <= cfg.start && cfg.start <= 1)) {
      throw std::invalid_argument("epsilon needs 0 <= floor <= start <= 1");
    }
    if (!(cfg.decay > 0 && cfg.decay <= 1)) throw std::invalid_argument("epsilon decay in (0, 1]");
  }

  double value() const noexcept { return value_; }
  void anneal() { value_ = std::max(cfg_.floor, value_ * cfg_.decay); }
  /// Restores a saved position; clamped into [floor, start].
  void restore(double value) { value_ = std::clamp(value, cfg_.floor, cfg_.start); }

 private:
  EpsilonConfig cfg_;
  double value_;
};

}  // namespace ltlmarl::agent
