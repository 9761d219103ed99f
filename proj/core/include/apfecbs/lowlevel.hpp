#pragma once

#include "apfecbs/collision.hpp"
#include "apfecbs/kinematics.hpp"
#include "apfecbs/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace apfecbs {

/// Forbids `robot_id` from being within L-infinity distance `radius` of
/// `q_forbidden` at grid index `time_index`.
struct Constraint {
  std::size_t robot_id = 0;
  Configuration q_forbidden;
  std::size_t time_index = 0;
  double radius = 0.05;
};

/// Grid configuration of a trajectory at index k; robots past their goal hold it.
const Configuration& config_at_index(const Trajectory& traj, std::size_t k);

bool violates(const Trajectory& traj, const Constraint& c);
/// True if any constraint naming traj.robot_id is violated.
bool violates_any(const Trajectory& traj, std::span<const Constraint> constraints);
std::size_t count_violations(const Trajectory& traj, std::span<const Constraint> constraints);

struct Timing {
  double dt = 0.1;     // grid interval [s]
  double v_max = 0.8;  // joint speed limit [rad/s]
};

struct PlannerParams {
  std::size_t max_samples = 4000;
  double goal_bias = 0.1;
  double eta = 0.3;                // steering step, L2 in joint space [rad]
  double edge_resolution = 0.02;   // static check spacing along edges, L-inf [rad]
  std::size_t shortcut_iterations = 60;
  std::size_t max_holds = 10;      // wait-in-place retries at q_start
  std::uint64_t seed = 1;
};

enum class PlanStatus { Success, InfeasibleEndpoints, NoPath, ConstraintsUnsatisfiable };

std::string_view to_string(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::NoPath;
  Trajectory trajectory;
  std::size_t samples_used = 0;

  bool ok() const { return status == PlanStatus::Success; }
};

/// Goal-biased joint-space RRT with shortcut smoothing and uniform-speed timing.
/// Only constraints naming `robot_id` apply. They are enforced on the timed,
/// grid-resampled result; when timing lands inside a constraint ball the start
/// is held for extra grid steps before a fresh tree is grown. The output starts at (q_start, 0), lies on
/// the dt grid and ends at q_goal; lb = L1(q_goal - q_start).
PlanResult plan(const SerialChain& chain, const Configuration& q_start, const Configuration& q_goal,
                std::span<const Obstacle> obstacles, std::span<const Constraint> constraints,
                const PlannerParams& params, const Timing& timing, std::size_t robot_id = 0);

/// Uniform-speed timing of a geometric path with `holds` grid steps spent at
/// the first vertex, resampled onto the dt grid.
Trajectory time_path(std::span<const Configuration> path, std::size_t holds, const Timing& timing,
                     std::size_t robot_id = 0);

}  // namespace apfecbs
