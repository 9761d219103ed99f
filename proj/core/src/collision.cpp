#include "apfecbs/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace apfecbs {

Obstacle::Obstacle(SphereObstacle s) : shape_(s) {
  if (!(s.radius > 0.0)) throw std::invalid_argument("sphere obstacle radius must be positive");
}

Obstacle::Obstacle(BoxObstacle b) : shape_(b) {
  if (!((b.min.array() < b.max.array()).all())) {
    throw std::invalid_argument("box obstacle needs min < max componentwise");
  }
}

double Obstacle::clearance(const Vec3& center, double radius) const {
  if (const auto* s = std::get_if<SphereObstacle>(&shape_)) {
    return (center - s->center).norm() - s->radius - radius;
  }
  const auto& b = std::get<BoxObstacle>(shape_);
  const Vec3 closest = center.cwiseMax(b.min).cwiseMin(b.max);
  return (center - closest).norm() - radius;
}

double min_sphere_distance(std::span<const WorldSphere> a, std::span<const WorldSphere> b, double margin) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& sa : a) {
    for (const auto& sb : b) {
      const double d = (sa.center - sb.center).norm() - sa.radius - sb.radius - 2.0 * margin;
      best = std::min(best, d);
    }
  }
  return best;
}

double min_robot_distance(const SerialChain& chain_i, const Configuration& q_i, const SerialChain& chain_j,
                          const Configuration& q_j, double margin) {
  const auto a = forward_kinematics(chain_i, q_i);
  const auto b = forward_kinematics(chain_j, q_j);
  return min_sphere_distance(a, b, margin);
}

bool is_config_free(const SerialChain& chain, const Configuration& q, std::span<const Obstacle> obstacles) {
  if (!chain.within_limits(q)) return false;
  if (obstacles.empty()) return true;
  for (const auto& s : forward_kinematics(chain, q)) {
    for (const auto& o : obstacles) {
      if (o.clearance(s.center, s.radius) <= 0.0) return false;
    }
  }
  return true;
}

bool is_trajectory_free(const SerialChain& chain, const Trajectory& traj, std::span<const Obstacle> obstacles) {
  return std::all_of(traj.waypoints.begin(), traj.waypoints.end(),
                     [&](const Waypoint& w) { return is_config_free(chain, w.q, obstacles); });
}

namespace {

void check_shape(const SyncedTrajectorySet& set, std::span<const SerialChain> chains) {
  if (set.robots() != chains.size()) {
    throw std::invalid_argument("conflict check: trajectory count does not match chain count");
  }
  for (const auto& tr : set.trajectories) {
    if (tr.size() != set.steps()) throw std::invalid_argument("conflict check: set is not synchronized");
  }
}

// spheres[robot][k]
std::vector<std::vector<std::vector<WorldSphere>>> grid_spheres(const SyncedTrajectorySet& set,
                                                                std::span<const SerialChain> chains) {
  std::vector<std::vector<std::vector<WorldSphere>>> out(set.robots());
  for (std::size_t r = 0; r < set.robots(); ++r) {
    out[r].reserve(set.steps());
    for (std::size_t k = 0; k < set.steps(); ++k) {
      out[r].push_back(forward_kinematics(chains[r], set.config(r, k)));
    }
  }
  return out;
}

}  // namespace

std::vector<Conflict> get_conflicts(const SyncedTrajectorySet& set, std::span<const SerialChain> chains,
                                    double margin) {
  check_shape(set, chains);
  std::vector<Conflict> out;
  const auto spheres = grid_spheres(set, chains);
  for (std::size_t k = 0; k < set.steps(); ++k) {
    for (std::size_t i = 0; i < set.robots(); ++i) {
      for (std::size_t j = i + 1; j < set.robots(); ++j) {
        const double d = min_sphere_distance(spheres[i][k], spheres[j][k], margin);
        if (d <= 0.0) {
          out.push_back({i, j, k, set.times[k], set.config(i, k), set.config(j, k), d});
        }
      }
    }
  }
  return out;
}

bool has_conflict(const SyncedTrajectorySet& set, std::span<const SerialChain> chains, double margin) {
  check_shape(set, chains);
  for (std::size_t k = 0; k < set.steps(); ++k) {
    std::vector<std::vector<WorldSphere>> at_k;
    at_k.reserve(set.robots());
    for (std::size_t r = 0; r < set.robots(); ++r) at_k.push_back(forward_kinematics(chains[r], set.config(r, k)));
    for (std::size_t i = 0; i < set.robots(); ++i) {
      for (std::size_t j = i + 1; j < set.robots(); ++j) {
        if (min_sphere_distance(at_k[i], at_k[j], margin) <= 0.0) return true;
      }
    }
  }
  return false;
}

std::vector<Conflict> dense_conflicts(const SyncedTrajectorySet& set, std::span<const SerialChain> chains,
                                      std::size_t substeps, double margin) {
  check_shape(set, chains);
  if (substeps == 0) throw std::invalid_argument("dense_conflicts: substeps must be >= 1");
  std::vector<Conflict> out;
  const std::size_t n = set.robots();
  std::vector<std::vector<WorldSphere>> at(n);
  for (std::size_t k = 0; k < set.steps(); ++k) {
    const std::size_t inner = (k + 1 < set.steps()) ? substeps : 1;
    for (std::size_t s = 0; s < inner; ++s) {
      const double frac = static_cast<double>(s) / static_cast<double>(substeps);
      for (std::size_t r = 0; r < n; ++r) {
        const Configuration& a = set.config(r, k);
        at[r] = forward_kinematics(chains[r], s == 0 ? a : Configuration(a + frac * (set.config(r, k + 1) - a)));
      }
      const std::size_t index = frac <= 0.5 ? k : k + 1;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double d = min_sphere_distance(at[i], at[j], margin);
          if (d <= 0.0) {
            out.push_back({i, j, index, set.times[index], set.config(i, index), set.config(j, index), d});
          }
        }
      }
    }
  }
  // One record per (index, pair); keep the deepest.
  std::sort(out.begin(), out.end(), [](const Conflict& a, const Conflict& b) {
    return std::tie(a.time_index, a.robot_i, a.robot_j, a.distance) <
           std::tie(b.time_index, b.robot_i, b.robot_j, b.distance);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Conflict& a, const Conflict& b) {
                          return a.time_index == b.time_index && a.robot_i == b.robot_i && a.robot_j == b.robot_j;
                        }),
            out.end());
  return out;
}

}  // namespace apfecbs
