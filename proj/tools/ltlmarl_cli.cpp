// Command-line front end. Exit codes: 0 success, 1 usage, 2 data error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "ltlmarl/harness/report.hpp"
#include "ltlmarl/harness/run.hpp"
#include "ltlmarl/shaping/transformation.hpp"

namespace {

using namespace ltlmarl;
namespace fs = std::filesystem;

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed, bool no_shaping,
              bool no_ltl, bool shared_goal, bool paper_literal) {
  auto cfg = harness::parse_config(harness::read_file(config_path));
  if (seed) cfg.seed = *seed;
  if (no_shaping) cfg.shaping = false;
  if (no_ltl) cfg.ltl_rewards = false;
  if (shared_goal) cfg.shared_goal = true;
  if (paper_literal) cfg.paper_literal_always = true;
  auto result = harness::train_run(cfg, fs::path(config_path).parent_path());
  std::cout << "run directory: " << result.dir.string() << '\n';
  if (!result.records.empty()) {
    const auto& last = result.records.back();
    std::cout << "final evaluation at step " << last.step << ": total " << last.total << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& dir) {
  auto tasks = harness::run_tasks(dir);
  auto rec = harness::evaluate_run(dir);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    std::cout << tasks[i].name << ' ' << (rec.outcomes[i] > 0 ? "+1" : "-1") << '\n';
  }
  std::cout << "total " << rec.total << '\n';
  return 0;
}

int cmd_genmap(std::uint64_t seed, bool adversarial, int candidates, const std::string& task_name,
               const std::string& preset, int width, int height, int agents) {
  if (!adversarial) {
    std::cout << world::format_map(world::random_map(seed, width, height, world::kDefaultCounts,
                                                     static_cast<std::size_t>(agents)));
    return 0;
  }
  auto tasks = harness::make_experiment(harness::parse_preset(preset));
  const ltl::NamedTask* task = nullptr;
  for (const auto& t : tasks) {
    if (t.name == task_name) task = &t;
  }
  if (!task) throw DataError("unknown task '" + task_name + "'");
  auto r = world::adversarial_select(harness::candidate_seeds(seed, candidates), task->formula,
                                     width, height, world::kDefaultCounts,
                                     static_cast<std::size_t>(agents));
  std::cerr << "chosen seed " << r.chosen.seed << ": greedy " << r.chosen.greedy << ", optimal "
            << r.chosen.optimal << ", ratio " << r.chosen.ratio << '\n';
  std::cout << world::format_map(r.map);
  return 0;
}

int cmd_prog(const std::string& formula, const std::string& labels) {
  auto f = ltl::parse(formula);
  auto sigma = ltl::parse_label_set(labels);
  auto next = ltl::progress(sigma, f);
  std::cout << next.to_string() << '\n';
  return 0;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& curve_path) {
  std::vector<harness::RunCurve> runs;
  for (const auto& d : dirs) runs.push_back(harness::load_run_curve(d));
  auto summary = harness::summarize(runs);
  std::cout << harness::format_summary(summary);
  harness::write_file(curve_path, harness::format_curve(summary));
  std::cerr << "curve written to " << curve_path << '\n';
  return 0;
}

int cmd_verify(const std::string& path) {
  auto game = shaping::parse_game(harness::read_file(path));
  auto r = shaping::verify_transformation(game);
  std::cout << "histories " << r.histories << "\nmax_abs_diff_optimal " << r.max_abs_diff_optimal
            << "\nmax_abs_diff_uniform " << r.max_abs_diff_uniform << "\nargmax_agreement "
            << r.argmax_agreement << "\nroot_value " << r.root_value << '\n';
  return r.max_abs_diff_optimal < 1e-9 && r.argmax_agreement == 1.0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent hierarchical learning with LTL task progression"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train one run from a config file");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool no_shaping = false, no_ltl = false, shared_goal = false, paper_literal = false;
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--seed", seed, "override the config seed");
  train->add_flag("--no-shaping", no_shaping, "use the base reward only");
  train->add_flag("--no-ltl", no_ltl, "final-event checker instead of progression rewards");
  train->add_flag("--shared-goal", shared_goal, "one goal for all agents");
  train->add_flag("--paper-literal-always", paper_literal, "vacuous progression rule for G");

  auto* eval = app.add_subcommand("eval", "evaluate the saved agents of a run");
  std::string run_dir;
  eval->add_option("--run", run_dir, "run directory")->required();

  auto* genmap = app.add_subcommand("genmap", "print a generated map");
  std::uint64_t map_seed = 0;
  bool adversarial = false;
  int candidates = 1000, width = 21, height = 21, agents = 2;
  std::string task_name = "axe", preset = "sequential";
  genmap->add_option("--seed", map_seed, "generator seed")->required();
  genmap->add_flag("--adversarial", adversarial, "pick the highest greedy/optimal ratio");
  genmap->add_option("--candidates", candidates, "number of candidate maps")
      ->check(CLI::PositiveNumber);
  genmap->add_option("--task", task_name, "catalog task scored by adversarial selection");
  genmap->add_option("--preset", preset, "catalog style for --task");
  genmap->add_option("--width", width)->check(CLI::Range(3, 1000));
  genmap->add_option("--height", height)->check(CLI::Range(3, 1000));
  genmap->add_option("--agents", agents)->check(CLI::Range(1, 9));

  auto* tasks = app.add_subcommand("tasks", "print a preset task file");
  std::string tasks_preset;
  tasks->add_option("--preset", tasks_preset, "sequential, interleaving or constrained")
      ->required();

  auto* prog = app.add_subcommand("prog", "progress a formula through one label set");
  std::string formula, labels;
  prog->add_option("formula", formula)->required();
  prog->add_option("labelset", labels, "e.g. \"got_wood,is_night\" or \"{}\"")->required();

  auto* report = app.add_subcommand("report", "summarise finished runs");
  std::vector<std::string> report_dirs;
  std::string curve_path = "curve.csv";
  report->add_option("dirs", report_dirs, "run directories")->required();
  report->add_option("--curve", curve_path, "where to write the step/mean curve CSV");

  auto* verify = app.add_subcommand("verify-transform", "compare history and product values");
  std::string game_path;
  verify->add_option("game", game_path, "game file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train) return cmd_train(config_path, seed, no_shaping, no_ltl, shared_goal, paper_literal);
    if (*eval) return cmd_eval(run_dir);
    if (*genmap) {
      return cmd_genmap(map_seed, adversarial, candidates, task_name, preset, width, height, agents);
    }
    if (*tasks) {
      std::cout << ltl::format_task_file(
          harness::make_experiment(harness::parse_preset(tasks_preset)));
      return 0;
    }
    if (*prog) return cmd_prog(formula, labels);
    if (*report) return cmd_report(report_dirs, curve_path);
    if (*verify) return cmd_verify(game_path);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
