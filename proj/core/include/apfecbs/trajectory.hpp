#pragma once

#include "apfecbs/kinematics.hpp"

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace apfecbs {

struct Waypoint {
  Configuration q;
  double t = 0.0;
};

/// Timed joint-space path of one robot, piecewise linear between waypoints.
struct Trajectory {
  std::size_t robot_id = 0;
  std::vector<Waypoint> waypoints;
  double lb = 0.0;  // lower bound on cost()

  bool empty() const { return waypoints.empty(); }
  std::size_t size() const { return waypoints.size(); }
  const Configuration& start() const { return waypoints.front().q; }
  const Configuration& goal() const { return waypoints.back().q; }
  double start_time() const { return waypoints.front().t; }
  double goal_time() const { return waypoints.back().t; }

  /// Linear interpolation; clamps to the end points outside [t_start, t_goal].
  Configuration at(double t) const;
};

/// Trajectories sampled on one shared time grid. `times` is usually uniform
/// with spacing `dt`; after scale_time() the spacing varies per segment but
/// stays common to every robot.
struct SyncedTrajectorySet {
  std::vector<Trajectory> trajectories;
  std::vector<double> times;
  double dt = 0.0;

  std::size_t robots() const { return trajectories.size(); }
  std::size_t steps() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  const Configuration& config(std::size_t robot, std::size_t k) const {
    return trajectories[robot].waypoints[k].q;
  }
};

/// Sum of |q_goal - q_start| over joints: the movement-cost lower bound.
double l1_distance(const Configuration& a, const Configuration& b);
double linf_distance(const Configuration& a, const Configuration& b);

/// Resamples every trajectory onto t_start, t_start + dt, ... up to the
/// latest goal time. Robots that have arrived hold their goal.
SyncedTrajectorySet synchronize(std::span<const Trajectory> trajs, double dt);

/// Cuts the rest-at-goal tail off a grid trajectory (keeps the first sample
/// at which the robot reaches and then stays at its goal).
Trajectory trim_rest(const Trajectory& traj);

double cost(const Trajectory& traj);
double cost(std::span<const Trajectory> trajs);
double cost(const SyncedTrajectorySet& set);

double makespan(std::span<const Trajectory> trajs);
double makespan(const SyncedTrajectorySet& set);

/// Largest per-joint speed |dq|/dt over all segments of all robots.
double max_joint_speed(const SyncedTrajectorySet& set);
double max_joint_speed(const Trajectory& traj);

/// Stretches every segment whose fastest joint exceeds v_max so that it moves
/// at exactly v_max; later grid times shift by the same amount for all robots.
SyncedTrajectorySet scale_time(const SyncedTrajectorySet& set,
                               double v_max = std::numeric_limits<double>::infinity());

/// Retimes one trajectory the same way, then resamples it onto a uniform dt grid.
Trajectory retime_on_grid(const Trajectory& traj, double v_max, double dt);

/// Line-oriented dump: "robot <id> <n_waypoints> <dof>" then rows "t q1 .. qd".
void write_trajectories(std::ostream& os, std::span<const Trajectory> trajs);
std::vector<Trajectory> read_trajectories(std::istream& is);

}  // namespace apfecbs
