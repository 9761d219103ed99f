#pragma once

#include "apfecbs/collision.hpp"
#include "apfecbs/kinematics.hpp"
#include "apfecbs/lowlevel.hpp"
#include "apfecbs/trajectory.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace apfecbs {

struct APFParams {
  double k_rep = 0.05;   // repulsive gain
  double d0 = 0.2;       // influence radius between sphere centroids [m]
  double alpha = 1e-7;   // gradient step
  std::size_t max_iter = 100;
  double rho = 0.05;     // constraint ball radius [rad]
  // Per-iteration cap on each waypoint's update, L-infinity [rad]. Zero
  // leaves the update unclamped.
  double max_step = 0.0;

  void validate() const;
};

/// Raised when two centroids coincide and the field is singular.
class SingularField : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// 1/2 k (1/d - 1/d0)^2 inside the influence radius, 0 outside.
double repulsive_potential(const Vec3& p, const Vec3& o, const APFParams& params);

/// Negative gradient of repulsive_potential w.r.t. p; points from o toward p.
Vec3 repulsive_force(const Vec3& p, const Vec3& o, const APFParams& params);

/// Joint-space repulsion on one robot: sum over other robots, own spheres and
/// their spheres of J_p^T F(p, o), with J taken at the own sphere centroid.
Eigen::VectorXd joint_force(const SerialChain& chain, const Configuration& q,
                            std::span<const std::vector<WorldSphere>> others, const APFParams& params);

/// Per-grid-index joint forces. Entries at the first and last index of
/// `traj` are zero so that start and goal stay fixed.
struct JointForceProfile {
  std::vector<Eigen::VectorXd> forces;

  bool all_zero() const;
};

/// `traj` and `others` live on the same uniform grid starting at index 0.
/// Trajectories shorter than `traj` hold their last configuration.
JointForceProfile compute_repulsive_force(const Trajectory& traj, const SerialChain& chain,
                                          std::span<const Trajectory> others,
                                          std::span<const SerialChain> other_chains, const APFParams& params);

enum class ModifyStop { MaxIterations, Converged, StaticCollision, JointLimit, Singular };

struct ModifyResult {
  Trajectory trajectory;      // last safe iterate
  std::size_t iterations = 0; // updates accepted into the running iterate
  std::size_t safe_iteration = 0;
  ModifyStop stop = ModifyStop::MaxIterations;
  bool input_violates_constraints = false;
};

/// Repulsive trajectory modification: T <- T + alpha * Gamma, repeated up to
/// max_iter times. Stops when an update would leave joint limits or touch a
/// static obstacle. Returns the last iterate that is collision-free and
/// satisfies every constraint for this robot (the input if none does).
ModifyResult modify_motion(const Trajectory& traj, const SerialChain& chain, std::span<const Trajectory> others,
                           std::span<const SerialChain> other_chains, std::span<const Constraint> constraints,
                           std::span<const Obstacle> obstacles, const APFParams& params);

/// Sum of pairwise repulsive potentials between `traj` spheres and the other
/// robots' spheres over all grid indices.
double trajectory_potential(const Trajectory& traj, const SerialChain& chain, std::span<const Trajectory> others,
                            std::span<const SerialChain> other_chains, const APFParams& params);

}  // namespace apfecbs
