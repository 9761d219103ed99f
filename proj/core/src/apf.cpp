#include "apfecbs/apf.hpp"

#include <algorithm>

namespace apfecbs {

void APFParams::validate() const {
  if (!(k_rep > 0.0)) throw std::invalid_argument("APFParams: k_rep must be positive");
  if (!(d0 > 0.0)) throw std::invalid_argument("APFParams: d0 must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("APFParams: alpha must be positive");
  if (max_iter < 1) throw std::invalid_argument("APFParams: max_iter must be >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("APFParams: rho must be positive");
  if (!(max_step >= 0.0)) throw std::invalid_argument("APFParams: max_step must be non-negative");
}

double repulsive_potential(const Vec3& p, const Vec3& o, const APFParams& params) {
  const double d = (p - o).norm();
  if (d == 0.0) throw SingularField("repulsive_potential: coincident points");
  if (d > params.d0) return 0.0;
  const double gap = 1.0 / d - 1.0 / params.d0;
  return 0.5 * params.k_rep * gap * gap;
}

Vec3 repulsive_force(const Vec3& p, const Vec3& o, const APFParams& params) {
  const Vec3 diff = p - o;
  const double d = diff.norm();
  if (d == 0.0) throw SingularField("repulsive_force: coincident points");
  if (d > params.d0) return Vec3::Zero();
  const double magnitude = params.k_rep * (1.0 / d - 1.0 / params.d0) / (d * d);
  return magnitude * (diff / d);
}

Eigen::VectorXd joint_force(const SerialChain& chain, const Configuration& q,
                            std::span<const std::vector<WorldSphere>> others, const APFParams& params) {
  const ChainPose pose = compute_pose(chain, q);
  const auto own = sphere_centers(chain, pose);
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.dof()));
  for (const auto& s : own) {
    Vec3 force = Vec3::Zero();
    for (const auto& other : others) {
      for (const auto& o : other) force += repulsive_force(s.center, o.center, params);
    }
    if (force.isZero(0.0)) continue;
    tau += point_jacobian(pose, s.link, s.center).transpose() * force;
  }
  return tau;
}

bool JointForceProfile::all_zero() const {
  return std::all_of(forces.begin(), forces.end(), [](const Eigen::VectorXd& f) { return f.isZero(0.0); });
}

JointForceProfile compute_repulsive_force(const Trajectory& traj, const SerialChain& chain,
                                          std::span<const Trajectory> others,
                                          std::span<const SerialChain> other_chains, const APFParams& params) {
  if (others.size() != other_chains.size()) {
    throw std::invalid_argument("compute_repulsive_force: trajectory/chain count mismatch");
  }
  JointForceProfile profile;
  const std::size_t n = traj.size();
  const auto dof = static_cast<Eigen::Index>(chain.dof());
  profile.forces.assign(n, Eigen::VectorXd::Zero(dof));
  std::vector<std::vector<WorldSphere>> other_spheres(others.size());
  for (std::size_t k = 1; k + 1 < n; ++k) {
    for (std::size_t r = 0; r < others.size(); ++r) {
      other_spheres[r] = forward_kinematics(other_chains[r], config_at_index(others[r], k));
    }
    profile.forces[k] = joint_force(chain, traj.waypoints[k].q, other_spheres, params);
  }
  return profile;
}

ModifyResult modify_motion(const Trajectory& traj, const SerialChain& chain, std::span<const Trajectory> others,
                           std::span<const SerialChain> other_chains, std::span<const Constraint> constraints,
                           std::span<const Obstacle> obstacles, const APFParams& params) {
  params.validate();
  ModifyResult result;
  result.trajectory = traj;
  result.input_violates_constraints = violates_any(traj, constraints);

  Trajectory current = traj;
  for (std::size_t iter = 1; iter <= params.max_iter; ++iter) {
    JointForceProfile gamma;
    try {
      gamma = compute_repulsive_force(current, chain, others, other_chains, params);
    } catch (const SingularField&) {
      result.stop = ModifyStop::Singular;
      return result;
    }
    if (gamma.all_zero()) {
      result.stop = ModifyStop::Converged;
      return result;
    }

    Trajectory next = current;
    for (std::size_t k = 1; k + 1 < next.size(); ++k) {
      Eigen::VectorXd step = params.alpha * gamma.forces[k];
      if (params.max_step > 0.0) {
        const double largest = step.cwiseAbs().maxCoeff();
        if (largest > params.max_step) step *= params.max_step / largest;
      }
      next.waypoints[k].q += step;
    }
    for (std::size_t k = 1; k + 1 < next.size(); ++k) {
      if (!chain.within_limits(next.waypoints[k].q)) {
        result.stop = ModifyStop::JointLimit;
        return result;
      }
      if (!is_config_free(chain, next.waypoints[k].q, obstacles)) {
        result.stop = ModifyStop::StaticCollision;
        return result;
      }
    }

    current = std::move(next);
    result.iterations = iter;
    if (!violates_any(current, constraints)) {
      result.trajectory = current;
      result.safe_iteration = iter;
    }
  }
  result.stop = ModifyStop::MaxIterations;
  return result;
}

double trajectory_potential(const Trajectory& traj, const SerialChain& chain, std::span<const Trajectory> others,
                            std::span<const SerialChain> other_chains, const APFParams& params) {
  double total = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto own = forward_kinematics(chain, traj.waypoints[k].q);
    for (std::size_t r = 0; r < others.size(); ++r) {
      const auto theirs = forward_kinematics(other_chains[r], config_at_index(others[r], k));
      for (const auto& a : own) {
        for (const auto& b : theirs) total += repulsive_potential(a.center, b.center, params);
      }
    }
  }
  return total;
}

}  // namespace apfecbs
