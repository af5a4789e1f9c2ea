#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "ltlmarl/harness/train.hpp"

namespace ltlmarl::harness {

namespace fs = std::filesystem;

// Relative paths in a config are resolved against the config's directory.
inline fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

inline std::vector<ltl::NamedTask> load_tasks(const RunConfig& cfg, const fs::path& base = {}) {
  if (cfg.task_file.empty()) return make_experiment(parse_preset(cfg.preset));
  auto tasks = ltl::parse_task_file(read_file(resolve(base, cfg.task_file)));
  if (tasks.empty()) throw DataError("task file " + cfg.task_file + " has no tasks");
  return tasks;
}

/// Candidate seeds for adversarial selection: the run seed's block.
inline std::vector<std::uint64_t> candidate_seeds(std::uint64_t seed, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(seed * 1000003ULL + static_cast<std::uint64_t>(i));
  return out;
}

inline world::GridMap load_map(const RunConfig& cfg, const std::vector<ltl::NamedTask>& tasks,
                               const fs::path& base = {}) {
  const auto n = static_cast<std::size_t>(cfg.agents);
  if (cfg.map == "random") {
    return world::random_map(cfg.seed, cfg.map_width, cfg.map_height, cfg.map_counts, n);
  }
  if (cfg.map == "adversarial") {
    const ltl::NamedTask* task = &tasks.front();
    if (!cfg.adversarial_task.empty()) {
      task = nullptr;
      for (const auto& t : tasks) {
        if (t.name == cfg.adversarial_task) task = &t;
      }
      if (!task) throw DataError("adversarial_task '" + cfg.adversarial_task + "' is not a task");
    }
    return world::adversarial_select(candidate_seeds(cfg.seed, cfg.adversarial_candidates),
                                     task->formula, cfg.map_width, cfg.map_height,
                                     cfg.map_counts, n)
        .map;
  }
  return world::parse_map(read_file(resolve(base, cfg.map)));
}

inline std::string metrics_header() { return "step,task,outcome,total,seed\n"; }

inline std::string metrics_rows(const EvalRecord& r, const std::vector<ltl::NamedTask>& tasks,
                                std::uint64_t seed) {
  std::ostringstream out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    out << r.step << ',' << tasks[i].name << ',' << r.outcomes.at(i) << ',' << r.total << ','
        << seed << '\n';
  }
  return out.str();
}

struct RunResult {
  fs::path dir;
  std::vector<EvalRecord> records;
};

/// Trains one run and writes its directory:
///   config.txt  tasks.txt  map.txt     snapshot sufficient to reproduce it
///   metrics.csv                        step,task,outcome,total,seed
///   timing.csv                         step,seconds (wall clock)
///   agent_<i>.ckpt                     final agent state
inline RunResult train_run(const RunConfig& cfg, const fs::path& config_dir = {},
                           const StepHook& hook = {}) {
  validate(cfg);
  auto tasks = load_tasks(cfg, config_dir);
  auto map = load_map(cfg, tasks, config_dir);
  Trainer trainer(cfg, tasks, map);

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_file(dir / "config.txt", format_config(cfg));
  write_file(dir / "tasks.txt", ltl::format_task_file(tasks));
  write_file(dir / "map.txt", world::format_map(map));

  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  std::ofstream timing(dir / "timing.csv", std::ios::binary);
  if (!metrics || !timing) throw DataError("cannot write metrics in " + dir.string());
  metrics << metrics_header();
  timing << "step,seconds\n" << std::fixed << std::setprecision(3);

  RunResult result{dir, {}};
  result.records = trainer.run(hook, [&](const EvalRecord& r) {
    metrics << metrics_rows(r, tasks, cfg.seed) << std::flush;
    timing << r.step << ',' << r.wall_seconds << '\n' << std::flush;
  });

  for (std::size_t i = 0; i < trainer.agents().size(); ++i) {
    std::ofstream ck(dir / ("agent_" + std::to_string(i) + ".ckpt"), std::ios::binary);
    trainer.agents()[i].save(ck);
    if (!ck) throw DataError("cannot write checkpoint in " + dir.string());
  }
  return result;
}

/// Rebuilds a finished run from its directory and evaluates the saved agents.
inline EvalRecord evaluate_run(const fs::path& dir) {
  RunConfig cfg = parse_config(read_file(dir / "config.txt"));
  auto tasks = ltl::parse_task_file(read_file(dir / "tasks.txt"));
  auto map = world::parse_map(read_file(dir / "map.txt"));
  Trainer trainer(cfg, tasks, map);
  for (std::size_t i = 0; i < trainer.agents().size(); ++i) {
    std::ifstream ck(dir / ("agent_" + std::to_string(i) + ".ckpt"), std::ios::binary);
    if (!ck) throw DataError("missing checkpoint agent_" + std::to_string(i) + ".ckpt");
    trainer.agents()[i].load(ck);
  }
  return trainer.evaluate(cfg.total_steps);
}

inline std::vector<ltl::NamedTask> run_tasks(const fs::path& dir) {
  return ltl::parse_task_file(read_file(dir / "tasks.txt"));
}

}  // namespace ltlmarl::harness
