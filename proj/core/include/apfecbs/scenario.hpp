#pragma once

#include "apfecbs/apf.hpp"
#include "apfecbs/collision.hpp"
#include "apfecbs/highlevel.hpp"
#include "apfecbs/kinematics.hpp"
#include "apfecbs/lowlevel.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apfecbs {

/// Axis-aligned region the end effectors are sampled in.
struct Workspace {
  Vec3 min = Vec3::Constant(-1.0);
  Vec3 max = Vec3::Constant(1.0);

  bool contains(const Vec3& p) const { return (p.array() >= min.array()).all() && (p.array() <= max.array()).all(); }
};

/// One planning instance plus the default parameters to run it with.
/// JSON, schema 1; SI units, radians.
struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  std::vector<std::string> robot_names;
  std::vector<SerialChain> robots;
  std::vector<Obstacle> obstacles;
  std::vector<Configuration> starts;
  std::vector<Configuration> goals;
  std::optional<Workspace> workspace;
  APFParams apf;
  PlannerParams planner;
  SearchParams search;

  Problem problem() const { return Problem{robots, obstacles, starts, goals}; }
  /// Checks sizes and that every start and goal is statically free.
  void validate() const;
};

inline constexpr int kScenarioSchema = 1;

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string scenario_to_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace apfecbs
