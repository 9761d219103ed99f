#pragma once

#include "apfecbs/kinematics.hpp"
#include "apfecbs/trajectory.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace apfecbs {

struct SphereObstacle {
  Vec3 center;
  double radius = 0.0;
};

struct BoxObstacle {
  Vec3 min;
  Vec3 max;
};

/// Static obstacle; closed set (touching counts as contact).
class Obstacle {
 public:
  Obstacle(SphereObstacle s);
  Obstacle(BoxObstacle b);

  /// Signed clearance between the obstacle and a ball (negative = overlap).
  double clearance(const Vec3& center, double radius) const;

  const std::variant<SphereObstacle, BoxObstacle>& shape() const { return shape_; }

 private:
  std::variant<SphereObstacle, BoxObstacle> shape_;
};

/// Inter-robot contact at grid index `time_index`. Robots are ordered i < j.
struct Conflict {
  std::size_t robot_i = 0;
  std::size_t robot_j = 0;
  std::size_t time_index = 0;
  double time = 0.0;
  Configuration q_i;
  Configuration q_j;
  double distance = 0.0;  // min sphere clearance at the conflict
};

/// Minimum over sphere pairs of (centre distance - r_a - r_b). `margin`
/// inflates every sphere radius.
double min_sphere_distance(std::span<const WorldSphere> a, std::span<const WorldSphere> b, double margin = 0.0);

double min_robot_distance(const SerialChain& chain_i, const Configuration& q_i, const SerialChain& chain_j,
                          const Configuration& q_j, double margin = 0.0);

bool is_config_free(const SerialChain& chain, const Configuration& q, std::span<const Obstacle> obstacles);

/// Static freedom of every waypoint (joint limits + obstacles).
bool is_trajectory_free(const SerialChain& chain, const Trajectory& traj, std::span<const Obstacle> obstacles);

/// All (i < j, k) grid points where the robots touch, ordered by k then (i, j).
/// Conflicts with robot pairs listed in the same order as `chains`.
std::vector<Conflict> get_conflicts(const SyncedTrajectorySet& set, std::span<const SerialChain> chains,
                                    double margin = 0.0);

/// Stops at the first conflict; cheaper than get_conflicts().empty().
bool has_conflict(const SyncedTrajectorySet& set, std::span<const SerialChain> chains, double margin = 0.0);

/// Dense sweep: checks `substeps` evenly spaced points inside every grid
/// segment (joint-space linear interpolation). A hit inside segment
/// [k, k+1] is reported at whichever end index is nearer, with the grid
/// configurations at that index.
std::vector<Conflict> dense_conflicts(const SyncedTrajectorySet& set, std::span<const SerialChain> chains,
                                      std::size_t substeps, double margin = 0.0);

}  // namespace apfecbs
