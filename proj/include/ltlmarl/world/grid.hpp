#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ltlmarl/error.hpp"
#include "ltlmarl/ltl/formula.hpp"

namespace ltlmarl::world {

enum class ObjectKind : std::uint8_t {
  kWood,
  kGrass,
  kIron,
  kToolshed,
  kWorkbench,
  kFactory,
  kShelter,
  kWall,
  kEmpty,
};

/// Kinds that agents can sense and reach: everything except wall and empty.
inline constexpr std::size_t kNumObjectKinds = 7;

inline constexpr std::array<ObjectKind, kNumObjectKinds> kObjectKinds{
    ObjectKind::kWood,      ObjectKind::kGrass,   ObjectKind::kIron,   ObjectKind::kToolshed,
    ObjectKind::kWorkbench, ObjectKind::kFactory, ObjectKind::kShelter};

constexpr std::size_t index_of(ObjectKind k) { return static_cast<std::size_t>(k); }

/// Raw materials are picked up (and removed) on entry.
constexpr bool is_material(ObjectKind k) {
  return k == ObjectKind::kWood || k == ObjectKind::kGrass || k == ObjectKind::kIron;
}
/// Tools stay in place and fire every step an agent stands on them.
constexpr bool is_tool(ObjectKind k) {
  return k == ObjectKind::kToolshed || k == ObjectKind::kWorkbench || k == ObjectKind::kFactory;
}

constexpr std::string_view kind_name(ObjectKind k) {
  switch (k) {
    case ObjectKind::kWood: return "wood";
    case ObjectKind::kGrass: return "grass";
    case ObjectKind::kIron: return "iron";
    case ObjectKind::kToolshed: return "toolshed";
    case ObjectKind::kWorkbench: return "workbench";
    case ObjectKind::kFactory: return "factory";
    case ObjectKind::kShelter: return "shelter";
    case ObjectKind::kWall: return "wall";
    case ObjectKind::kEmpty: return "empty";
  }
  return "?";
}

constexpr char kind_char(ObjectKind k) {
  constexpr std::string_view chars = "wgitbfs#.";
  return chars[static_cast<std::size_t>(k)];
}

inline std::optional<ObjectKind> kind_from_char(char c) {
  constexpr std::string_view chars = "wgitbfs#.";
  auto pos = chars.find(c);
  if (pos == std::string_view::npos) return std::nullopt;
  return static_cast<ObjectKind>(pos);
}

/// The propositions the world can emit. Interned once per process.
struct EventProps {
  /// got_<material> for materials, used_<tool> for tools; shelter has none.
  std::array<std::optional<ltl::Proposition>, kNumObjectKinds> on_enter;
  ltl::Proposition is_night;
  ltl::Proposition at_shelter;

  static const EventProps& get() {
    static const EventProps props = [] {
      EventProps p{{}, ltl::Proposition::intern("is_night"),
                   ltl::Proposition::intern("at_shelter")};
      for (auto k : kObjectKinds) {
        if (is_material(k)) {
          p.on_enter[index_of(k)] = ltl::Proposition::intern("got_" + std::string(kind_name(k)));
        } else if (is_tool(k)) {
          p.on_enter[index_of(k)] = ltl::Proposition::intern("used_" + std::string(kind_name(k)));
        }
      }
      return p;
    }();
    return props;
  }

  /// Object kind whose entry emits `p`, if any.
  std::optional<ObjectKind> kind_of(ltl::Proposition p) const {
    for (auto k : kObjectKinds) {
      if (on_enter[index_of(k)] == p) return k;
    }
    return std::nullopt;
  }

  ltl::PropSet all() const {
    ltl::PropSet s{is_night, at_shelter};
    for (const auto& p : on_enter) {
      if (p) s.insert(*p);
    }
    return s;
  }
};

/// Column x, row y; (0, 0) is the top-left corner.
struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell& a, const Cell& b) {
    // row-major order
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

using AgentPose = Cell;

inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

/// Static layout of a world: object cells plus agent start poses.
class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height) : width_(width), height_(height) {
    if (width < 3 || height < 3) throw DataError("map must be at least 3x3");
    cells_.assign(static_cast<std::size_t>(width * height), ObjectKind::kEmpty);
    for (int x = 0; x < width; ++x) {
      set({x, 0}, ObjectKind::kWall);
      set({x, height - 1}, ObjectKind::kWall);
    }
    for (int y = 0; y < height; ++y) {
      set({0, y}, ObjectKind::kWall);
      set({width - 1, y}, ObjectKind::kWall);
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint64_t seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t s) noexcept { seed_ = s; }

  bool in_bounds(Cell c) const noexcept {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  ObjectKind at(Cell c) const { return cells_[index(c)]; }
  void set(Cell c, ObjectKind k) { cells_[index(c)] = k; }
  bool walkable(Cell c) const { return in_bounds(c) && at(c) != ObjectKind::kWall; }

  const std::vector<Cell>& starts() const noexcept { return starts_; }
  void set_starts(std::vector<Cell> s) { starts_ = std::move(s); }

  std::size_t count(ObjectKind k) const {
    std::size_t n = 0;
    for (auto c : cells_) n += c == k;
    return n;
  }

  /// Cells of kind `k` in row-major order.
  std::vector<Cell> cells_of(ObjectKind k) const {
    std::vector<Cell> out;
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        if (at({x, y}) == k) out.push_back({x, y});
      }
    }
    return out;
  }

  /// Throws DataError naming the first violated invariant: walled border,
  /// agents in bounds and off walls, and every kind in `required` present.
  void validate(const std::vector<ObjectKind>& required = {}) const {
    for (int x = 0; x < width_; ++x) {
      if (at({x, 0}) != ObjectKind::kWall || at({x, height_ - 1}) != ObjectKind::kWall) {
        throw DataError("map border must be wall");
      }
    }
    for (int y = 0; y < height_; ++y) {
      if (at({0, y}) != ObjectKind::kWall || at({width_ - 1, y}) != ObjectKind::kWall) {
        throw DataError("map border must be wall");
      }
    }
    if (starts_.empty()) throw DataError("map has no agent start poses");
    for (auto s : starts_) {
      if (!walkable(s)) throw DataError("agent start pose is out of bounds or on a wall");
    }
    for (auto k : required) {
      if (count(k) == 0) {
        throw DataError("map has no " + std::string(kind_name(k)) + " cell");
      }
    }
  }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  std::size_t index(Cell c) const {
    if (!in_bounds(c)) throw std::out_of_range("cell outside map");
    return static_cast<std::size_t>(c.y * width_ + c.x);
  }

  int width_ = 0;
  int height_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<ObjectKind> cells_;
  std::vector<Cell> starts_;
};

/// Kinds whose events occur in `props` (got_wood -> wood, used_factory ->
/// factory, at_shelter -> shelter).
inline std::vector<ObjectKind> kinds_referenced(ltl::PropSet props) {
  const auto& ev = EventProps::get();
  std::vector<ObjectKind> out;
  for (auto k : kObjectKinds) {
    auto p = ev.on_enter[index_of(k)];
    if ((p && props.contains(*p)) || (k == ObjectKind::kShelter && props.contains(ev.at_shelter))) {
      out.push_back(k);
    }
  }
  return out;
}

// Map text: one row per line, one char per cell. Agents are digits 1..9 and
// stand on empty cells. A leading "# seed N" line carries the generator seed;
// it is told apart from wall rows by the space.

inline GridMap parse_map(std::string_view text) {
  std::vector<std::string> rows;
  std::optional<std::uint64_t> seed;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      std::istringstream meta(line.substr(2));
      std::string key;
      std::uint64_t value = 0;
      if (meta >> key && key == "seed" && meta >> value) seed = value;
      continue;
    }
    rows.push_back(line);
  }
  if (rows.empty()) throw DataError("map file has no rows");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows.front().size());
  GridMap map(width, height);
  std::array<std::optional<Cell>, 9> agents;
  for (int y = 0; y < height; ++y) {
    if (static_cast<int>(rows[y].size()) != width) {
      throw DataError("map row " + std::to_string(y + 1) + " has length " +
                      std::to_string(rows[y].size()) + ", expected " + std::to_string(width));
    }
    for (int x = 0; x < width; ++x) {
      char c = rows[y][x];
      if (c >= '1' && c <= '9') {
        auto& slot = agents[static_cast<std::size_t>(c - '1')];
        if (slot) throw DataError(std::string("agent ") + c + " appears twice in map");
        slot = Cell{x, y};
        map.set({x, y}, ObjectKind::kEmpty);
        continue;
      }
      auto k = kind_from_char(c);
      if (!k) {
        throw DataError("unknown map character '" + std::string(1, c) + "' at row " +
                        std::to_string(y + 1) + ", column " + std::to_string(x + 1));
      }
      map.set({x, y}, *k);
    }
  }
  std::vector<Cell> starts;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!agents[i]) break;
    starts.push_back(*agents[i]);
  }
  for (std::size_t i = starts.size(); i < agents.size(); ++i) {
    if (agents[i]) throw DataError("agent digits must be consecutive from 1");
  }
  map.set_starts(std::move(starts));
  if (seed) map.set_seed(*seed);
  map.validate();
  return map;
}

inline std::string format_map(const GridMap& map) {
  std::string out = "# seed " + std::to_string(map.seed()) + "\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      char c = kind_char(map.at({x, y}));
      for (std::size_t i = 0; i < map.starts().size(); ++i) {
        if (map.starts()[i] == Cell{x, y}) c = static_cast<char>('1' + i);
      }
      out += c;
    }
    out += '\n';
  }
  return out;
}

}  // namespace ltlmarl::world
