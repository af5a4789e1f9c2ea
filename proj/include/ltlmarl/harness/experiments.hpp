#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltlmarl/error.hpp"
#include "ltlmarl/ltl/parser.hpp"
#include "ltlmarl/world/grid.hpp"

namespace ltlmarl::harness {

enum class Preset { kSequential, kInterleaving, kConstrained };

inline Preset parse_preset(std::string_view name) {
  if (name == "sequential") return Preset::kSequential;
  if (name == "interleaving") return Preset::kInterleaving;
  if (name == "constrained") return Preset::kConstrained;
  throw DataError("unknown preset '" + std::string(name) +
                  "' (expected sequential, interleaving or constrained)");
}

// The ten crafting tasks. Axe and both fishing-rod variants are the
// published formulas; the other entries are repository-defined and follow
// the same got_* / used_* template. Each entry has a fully ordered form and
// a form with only the orderings the recipe needs.
struct CatalogEntry {
  std::string_view name;
  std::string_view sequential;
  std::string_view interleaving;
};

inline constexpr std::array<CatalogEntry, 10> kCatalog{{
    {"axe", "F (got_wood & F used_workbench) & F (got_iron & F used_factory)",
     "F (got_wood & F used_workbench) & F (got_iron & F used_factory)"},
    {"fishing_rod", "F (got_wood & F (used_workbench & F (got_grass & F used_toolshed)))",
     "F (got_wood & F (used_toolshed & F used_workbench)) & F (got_grass & F used_workbench)"},
    {"bow_and_arrow",
     "F (got_wood & F (used_workbench & F (got_grass & F (used_toolshed & F (got_iron & F "
     "used_factory)))))",
     "F (got_wood & F used_workbench) & F (got_grass & F used_toolshed) & F (got_iron & F "
     "used_factory)"},
    {"bridge", "F (got_iron & F (got_wood & F used_factory))",
     "F (got_iron & F used_factory) & F (got_wood & F used_factory)"},
    {"bed", "F (got_wood & F (used_toolshed & F (got_grass & F used_workbench)))",
     "F (got_wood & F used_toolshed) & F (got_grass & F used_workbench)"},
    {"shears", "F (got_iron & F used_workbench)", "F (got_iron & F used_workbench)"},
    {"cloth", "F (got_grass & F used_factory)", "F (got_grass & F used_factory)"},
    {"rope", "F (got_grass & F used_toolshed)", "F (got_grass & F used_toolshed)"},
    {"plank", "F (got_wood & F used_toolshed)", "F (got_wood & F used_toolshed)"},
    {"gold_tool", "F (got_iron & F (used_toolshed & F used_workbench))",
     "F (got_iron & F used_workbench) & F (got_iron & F used_toolshed)"},
}};

/// safety U (body & safety) with safety = is_night -> at_shelter.
inline ltl::Formula with_night_safety(const ltl::Formula& body) {
  auto safety = ltl::Formula::implies(ltl::Formula::prop("is_night"),
                                      ltl::Formula::prop("at_shelter"));
  return ltl::Formula::until(safety, ltl::Formula::conj(body, safety));
}

/// The ten tasks in catalog order, styled by `preset`. The constrained
/// preset wraps the interleaving bodies.
inline std::vector<ltl::NamedTask> make_experiment(Preset preset) {
  std::vector<ltl::NamedTask> out;
  for (const auto& e : kCatalog) {
    auto body = ltl::parse(preset == Preset::kSequential ? e.sequential : e.interleaving);
    out.push_back({std::string(e.name),
                   preset == Preset::kConstrained ? with_night_safety(body) : body});
  }
  return out;
}

/// The last got_* / used_* proposition in the formula's left-to-right
/// reading; the event a hand-written checker would treat as "crafted".
inline std::optional<ltl::Proposition> final_event(const ltl::Formula& f) {
  if (f.op() == ltl::Op::kProp) {
    const auto& ev = world::EventProps::get();
    if (ev.kind_of(f.proposition())) return f.proposition();
    return std::nullopt;
  }
  if (ltl::arity(f.op()) == 2) {
    if (auto r = final_event(f.right())) return r;
  }
  if (ltl::arity(f.op()) >= 1) return final_event(f.left());
  return std::nullopt;
}

/// True when the task refers to the clock, which shortens the episode.
inline bool mentions_night(const ltl::Formula& f) {
  return ltl::propositions(f).contains(world::EventProps::get().is_night);
}

}  // namespace ltlmarl::harness
