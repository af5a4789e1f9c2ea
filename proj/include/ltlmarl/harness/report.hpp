#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ltlmarl/harness/config.hpp"

namespace ltlmarl::harness {

/// (step, total) for every evaluation in one run, in file order.
struct RunCurve {
  std::string variant;
  std::vector<std::pair<long, int>> totals;
};

/// Label for the switches that define an ablation.
inline std::string variant_name(const RunConfig& c) {
  std::string v = c.shaping && c.ltl_rewards ? "full"
                  : c.ltl_rewards            ? "no-shaping"
                  : c.shaping                ? "no-ltl"
                                             : "no-shaping-no-ltl";
  if (c.shared_goal) v += "+shared-goal";
  if (c.paper_literal_always) v += "+paper-literal-always";
  return v;
}

/// Parses metrics.csv text. Every row of one evaluation must repeat the
/// same total, and that total must equal the sum of its outcomes.
inline std::vector<std::pair<long, int>> parse_metrics(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "step,task,outcome,total,seed") {
    throw DataError("metrics: missing header step,task,outcome,total,seed");
  }
  std::vector<std::pair<long, int>> out;
  long cur_step = -1;
  int cur_sum = 0;
  int line_no = 1;
  auto close = [&] {
    if (cur_step >= 0 && cur_sum != out.back().second) {
      throw DataError("metrics: total at step " + std::to_string(cur_step) +
                      " does not match its outcomes");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) f.push_back(cell);
    const std::string where = "metrics line " + std::to_string(line_no);
    if (f.size() != 5) throw DataError(where + ": expected 5 fields");
    long step = detail::parse_number<long>("step", f[0]);
    int outcome = detail::parse_number<int>("outcome", f[2]);
    int total = detail::parse_number<int>("total", f[3]);
    detail::parse_number<std::uint64_t>("seed", f[4]);
    if (outcome != 1 && outcome != -1) throw DataError(where + ": outcome must be +1 or -1");
    if (step != cur_step) {
      close();
      if (step < cur_step) throw DataError(where + ": steps must not decrease");
      out.emplace_back(step, total);
      cur_step = step;
      cur_sum = 0;
    } else if (total != out.back().second) {
      throw DataError(where + ": inconsistent total within one evaluation");
    }
    cur_sum += outcome;
  }
  close();
  if (out.empty()) throw DataError("metrics: no evaluations recorded");
  return out;
}

inline RunCurve load_run_curve(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  RunCurve r;
  r.variant = variant_name(parse_config(read_file(dir / "config.txt")));
  try {
    r.totals = parse_metrics(read_file(dir / "metrics.csv"));
  } catch (const DataError& e) {
    throw DataError(dir.string() + ": " + e.what());
  }
  return r;
}

struct VariantSummary {
  std::string variant;
  std::size_t runs = 0;
  int max_total = 0;
  double average_total = 0;  // over every evaluation of every run
  std::vector<std::pair<long, double>> curve;  // per-step mean across runs
};

inline std::vector<VariantSummary> summarize(const std::vector<RunCurve>& runs) {
  if (runs.empty()) throw DataError("report needs at least one run");
  std::map<std::string, std::vector<const RunCurve*>> groups;
  for (const auto& r : runs) groups[r.variant].push_back(&r);
  std::vector<VariantSummary> out;
  for (const auto& [name, members] : groups) {
    VariantSummary s{name, members.size(), 0, 0, {}};
    bool first = true;
    long count = 0;
    long sum = 0;
    std::map<long, std::pair<long, long>> by_step;  // step -> (sum, n)
    for (const RunCurve* r : members) {
      for (auto [step, total] : r->totals) {
        s.max_total = first ? total : std::max(s.max_total, total);
        first = false;
        sum += total;
        ++count;
        by_step[step].first += total;
        ++by_step[step].second;
      }
    }
    s.average_total = static_cast<double>(sum) / static_cast<double>(count);
    for (auto [step, acc] : by_step) {
      s.curve.emplace_back(step, static_cast<double>(acc.first) / static_cast<double>(acc.second));
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string format_summary(const std::vector<VariantSummary>& s) {
  std::ostringstream out;
  out << "variant,runs,max_total,average_total\n";
  for (const auto& v : s) {
    out << v.variant << ',' << v.runs << ',' << v.max_total << ',' << v.average_total << '\n';
  }
  return out.str();
}

inline std::string format_curve(const std::vector<VariantSummary>& s) {
  std::ostringstream out;
  out.precision(10);
  out << "variant,step,mean_total\n";
  for (const auto& v : s) {
    for (auto [step, mean] : v.curve) out << v.variant << ',' << step << ',' << mean << '\n';
  }
  return out.str();
}

}  // namespace ltlmarl::harness
