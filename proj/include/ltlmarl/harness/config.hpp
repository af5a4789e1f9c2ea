#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ltlmarl/error.hpp"
#include "ltlmarl/world/mapgen.hpp"

namespace ltlmarl::harness {

/// Every knob of a training run. Serialised as flat `key = value` lines;
/// `#` starts a comment. Unknown keys are errors.
struct RunConfig {
  std::uint64_t seed = 0;
  int agents = 2;

  // Map source: "random", "adversarial", or a path to a map file.
  std::string map = "random";
  int map_width = 21;
  int map_height = 21;
  world::KindCounts map_counts = world::kDefaultCounts;
  int adversarial_candidates = 1000;
  std::string adversarial_task;  // task name; empty = first task

  // Tasks: a task file, or a preset name when task_file is empty.
  std::string task_file;
  std::string preset = "sequential";

  long total_steps = 200000;
  long eval_period = 1000;
  int horizon = 0;  // 0: 160 when a task mentions is_night, else 300
  int option_steps = 20;
  double gamma = 0.9;

  bool shaping = true;
  bool ltl_rewards = true;
  bool shared_goal = false;
  bool paper_literal_always = false;
  double xi = 1.0;
  double v_init = 0.01;

  double eps_start = 1.0;
  double eps_floor = 0.05;
  double eps_decay = 0.999;
  double learning_rate = 5e-4;
  int batch_size = 32;
  int buffer_capacity = 25000;
  int sync_period = 100;
  std::vector<int> hidden{64, 64};
  int learn_every = 1;
  double curriculum_threshold = 0.98;

  std::string output_dir = "runs/run";
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof()) {
    throw DataError("config: bad value '" + v + "' for " + key);
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw DataError("config: bad boolean '" + v + "' for " + key);
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  std::vector<T> out;
  std::string word;
  while (in >> word) out.push_back(parse_number<T>(key, word));
  return out;
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void set_option(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  auto num = [&]<class T>(T& field) { field = parse_number<T>(key, value); };
  if (key == "seed") num(c.seed);
  else if (key == "agents") num(c.agents);
  else if (key == "map") c.map = value;
  else if (key == "map_width") num(c.map_width);
  else if (key == "map_height") num(c.map_height);
  else if (key == "map_counts") {
    auto v = parse_list<int>(key, value);
    if (v.size() != c.map_counts.size()) {
      throw DataError("config: map_counts needs 7 integers (wood grass iron toolshed workbench "
                      "factory shelter)");
    }
    std::copy(v.begin(), v.end(), c.map_counts.begin());
  }
  else if (key == "adversarial_candidates") num(c.adversarial_candidates);
  else if (key == "adversarial_task") c.adversarial_task = value;
  else if (key == "task_file") c.task_file = value;
  else if (key == "preset") c.preset = value;
  else if (key == "total_steps") num(c.total_steps);
  else if (key == "eval_period") num(c.eval_period);
  else if (key == "horizon") num(c.horizon);
  else if (key == "option_steps") num(c.option_steps);
  else if (key == "gamma") num(c.gamma);
  else if (key == "shaping") c.shaping = parse_bool(key, value);
  else if (key == "ltl_rewards") c.ltl_rewards = parse_bool(key, value);
  else if (key == "shared_goal") c.shared_goal = parse_bool(key, value);
  else if (key == "paper_literal_always") c.paper_literal_always = parse_bool(key, value);
  else if (key == "xi") num(c.xi);
  else if (key == "v_init") num(c.v_init);
  else if (key == "eps_start") num(c.eps_start);
  else if (key == "eps_floor") num(c.eps_floor);
  else if (key == "eps_decay") num(c.eps_decay);
  else if (key == "learning_rate") num(c.learning_rate);
  else if (key == "batch_size") num(c.batch_size);
  else if (key == "buffer_capacity") num(c.buffer_capacity);
  else if (key == "sync_period") num(c.sync_period);
  else if (key == "hidden") c.hidden = parse_list<int>(key, value);
  else if (key == "learn_every") num(c.learn_every);
  else if (key == "curriculum_threshold") num(c.curriculum_threshold);
  else if (key == "output_dir") c.output_dir = value;
  else throw DataError("config: unknown key '" + key + "'");
}

/// Range checks that do not need the task file or map.
inline void validate(const RunConfig& c) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw DataError(std::string("config: ") + what);
  };
  need(c.agents >= 1 && c.agents <= 9, "agents must be in 1..9");
  need(c.map_width >= 3 && c.map_height >= 3, "map must be at least 3x3");
  need(c.adversarial_candidates >= 1, "adversarial_candidates must be positive");
  need(c.total_steps >= 0, "total_steps must be non-negative");
  need(c.eval_period >= 1, "eval_period must be positive");
  need(c.horizon >= 0, "horizon must be non-negative");
  need(c.option_steps >= 1, "option_steps must be positive");
  need(c.gamma >= 0 && c.gamma <= 1, "gamma must be in [0, 1]");
  need(c.xi >= 0 && c.xi <= 1, "xi must be in [0, 1]");
  need(c.eps_floor >= 0 && c.eps_floor <= c.eps_start && c.eps_start <= 1,
       "need 0 <= eps_floor <= eps_start <= 1");
  need(c.eps_decay > 0 && c.eps_decay <= 1, "eps_decay must be in (0, 1]");
  need(c.learning_rate > 0, "learning_rate must be positive");
  need(c.batch_size >= 1 && c.buffer_capacity >= c.batch_size,
       "need 1 <= batch_size <= buffer_capacity");
  need(c.sync_period >= 1, "sync_period must be positive");
  need(!c.hidden.empty(), "hidden needs at least one layer");
  for (int h : c.hidden) need(h >= 1, "hidden layer widths must be positive");
  need(c.learn_every >= 1, "learn_every must be positive");
  need(c.curriculum_threshold > 0 && c.curriculum_threshold <= 1,
       "curriculum_threshold must be in (0, 1]");
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_option(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const DataError& e) {
      throw DataError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

inline std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
    return s;
  };
  auto flag = [](bool b) { return b ? "true" : "false"; };
  out.precision(17);
  out << "seed = " << c.seed << "\nagents = " << c.agents << "\nmap = " << c.map
      << "\nmap_width = " << c.map_width << "\nmap_height = " << c.map_height
      << "\nmap_counts = " << list(c.map_counts)
      << "\nadversarial_candidates = " << c.adversarial_candidates
      << "\nadversarial_task = " << c.adversarial_task << "\ntask_file = " << c.task_file
      << "\npreset = " << c.preset << "\ntotal_steps = " << c.total_steps
      << "\neval_period = " << c.eval_period << "\nhorizon = " << c.horizon
      << "\noption_steps = " << c.option_steps << "\ngamma = " << c.gamma
      << "\nshaping = " << flag(c.shaping) << "\nltl_rewards = " << flag(c.ltl_rewards)
      << "\nshared_goal = " << flag(c.shared_goal)
      << "\npaper_literal_always = " << flag(c.paper_literal_always) << "\nxi = " << c.xi
      << "\nv_init = " << c.v_init << "\neps_start = " << c.eps_start
      << "\neps_floor = " << c.eps_floor << "\neps_decay = " << c.eps_decay
      << "\nlearning_rate = " << c.learning_rate << "\nbatch_size = " << c.batch_size
      << "\nbuffer_capacity = " << c.buffer_capacity << "\nsync_period = " << c.sync_period
      << "\nhidden = " << list(c.hidden) << "\nlearn_every = " << c.learn_every
      << "\ncurriculum_threshold = " << c.curriculum_threshold
      << "\noutput_dir = " << c.output_dir << '\n';
  return out.str();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
}

}  // namespace ltlmarl::harness
