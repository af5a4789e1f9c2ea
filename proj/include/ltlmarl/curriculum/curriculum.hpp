#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ltlmarl/ltl/parser.hpp"

namespace ltlmarl::curriculum {

struct TaskStats {
  long successes = 0;
  long episodes = 0;

  /// Success rate; a task never tried counts as 0.
  double rate() const {
    return episodes == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(episodes);
  }
};

/// Ordered tasks gated by per-task success rates over the whole run.
class Curriculum {
 public:
  explicit Curriculum(std::vector<ltl::NamedTask> tasks, double threshold = 0.98)
      : tasks_(std::move(tasks)), stats_(tasks_.size()), threshold_(threshold) {
    if (!(threshold > 0 && threshold <= 1)) {
      throw std::invalid_argument("curriculum threshold must be in (0, 1]");
    }
  }

  const std::vector<ltl::NamedTask>& tasks() const noexcept { return tasks_; }
  const std::vector<TaskStats>& stats() const noexcept { return stats_; }
  double threshold() const noexcept { return threshold_; }

  /// First task, in order, whose success rate is below the threshold. When
  /// every task is mastered, the one with the lowest rate (earliest on ties).
  std::size_t next_task() const {
    if (tasks_.empty()) throw std::logic_error("curriculum has no tasks");
    for (std::size_t i = 0; i < stats_.size(); ++i) {
      if (stats_[i].rate() < threshold_) return i;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < stats_.size(); ++i) {
      if (stats_[i].rate() < stats_[worst].rate()) worst = i;
    }
    return worst;
  }

  void record_outcome(std::size_t index, bool success) {
    if (index >= stats_.size()) throw std::out_of_range("record_outcome: task index");
    ++stats_[index].episodes;
    stats_[index].successes += success ? 1 : 0;
  }

 private:
  std::vector<ltl::NamedTask> tasks_;
  std::vector<TaskStats> stats_;
  double threshold_;
};

}  // namespace ltlmarl::curriculum
