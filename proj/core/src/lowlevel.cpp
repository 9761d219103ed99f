#include "apfecbs/lowlevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace apfecbs {

const Configuration& config_at_index(const Trajectory& traj, std::size_t k) {
  return traj.waypoints[std::min(k, traj.size() - 1)].q;
}

bool violates(const Trajectory& traj, const Constraint& c) {
  if (c.robot_id != traj.robot_id || traj.empty()) return false;
  return linf_distance(config_at_index(traj, c.time_index), c.q_forbidden) <= c.radius;
}

bool violates_any(const Trajectory& traj, std::span<const Constraint> constraints) {
  return std::any_of(constraints.begin(), constraints.end(), [&](const Constraint& c) { return violates(traj, c); });
}

std::size_t count_violations(const Trajectory& traj, std::span<const Constraint> constraints) {
  return static_cast<std::size_t>(
      std::count_if(constraints.begin(), constraints.end(), [&](const Constraint& c) { return violates(traj, c); }));
}

std::string_view to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Success: return "success";
    case PlanStatus::InfeasibleEndpoints: return "infeasible_endpoints";
    case PlanStatus::NoPath: return "no_path";
    case PlanStatus::ConstraintsUnsatisfiable: return "constraints_unsatisfiable";
  }
  return "unknown";
}

Trajectory time_path(std::span<const Configuration> path, std::size_t holds, const Timing& timing,
                     std::size_t robot_id) {
  Trajectory timed;
  timed.robot_id = robot_id;
  if (path.empty()) return timed;
  timed.waypoints.push_back({path.front(), 0.0});
  double t = static_cast<double>(holds) * timing.dt;
  if (holds > 0) timed.waypoints.push_back({path.front(), t});
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double duration = linf_distance(path[i], path[i - 1]) / timing.v_max;
    if (duration <= 0.0) continue;
    t += duration;
    timed.waypoints.push_back({path[i], t});
  }
  timed.lb = l1_distance(path.front(), path.back());
  if (timed.waypoints.size() == 1) return timed;
  const Trajectory single[] = {timed};
  Trajectory out = synchronize(single, timing.dt).trajectories.front();
  out.robot_id = robot_id;
  out.lb = timed.lb;
  return out;
}

namespace {

class JointSpaceRrt {
 public:
  JointSpaceRrt(const SerialChain& chain, std::span<const Obstacle> obstacles, const PlannerParams& params,
                std::mt19937_64& rng)
      : chain_(chain), obstacles_(obstacles), params_(params), rng_(rng) {}

  bool edge_free(const Configuration& a, const Configuration& b) const {
    const double span = linf_distance(a, b);
    const auto steps = static_cast<std::size_t>(std::ceil(span / params_.edge_resolution));
    for (std::size_t s = 1; s <= steps; ++s) {
      const double f = static_cast<double>(s) / static_cast<double>(steps);
      if (!is_config_free(chain_, a + f * (b - a), obstacles_)) return false;
    }
    return true;
  }

  // Empty result on failure; `samples` accumulates the budget consumed.
  std::vector<Configuration> grow(const Configuration& start, const Configuration& goal, std::size_t budget,
                                  std::size_t& samples, bool try_direct) {
    if (try_direct && edge_free(start, goal)) return {start, goal};

    std::vector<Configuration> nodes{start};
    std::vector<std::size_t> parent{0};
    const Configuration lo = chain_.lower_limits();
    const Configuration hi = chain_.upper_limits();
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t n = 0; n < budget; ++n) {
      ++samples;
      Configuration target(chain_.dof());
      if (unit(rng_) < params_.goal_bias) {
        target = goal;
      } else {
        for (std::size_t j = 0; j < chain_.dof(); ++j) target[j] = lo[j] + unit(rng_) * (hi[j] - lo[j]);
      }

      std::size_t nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double d = (nodes[i] - target).squaredNorm();
        if (d < best) {
          best = d;
          nearest = i;
        }
      }
      const Configuration& from = nodes[nearest];
      const double dist = std::sqrt(best);
      Configuration next = dist <= params_.eta ? target : Configuration(from + (params_.eta / dist) * (target - from));
      if (!edge_free(from, next)) continue;
      nodes.push_back(next);
      parent.push_back(nearest);

      if ((next - goal).norm() <= params_.eta && edge_free(next, goal)) {
        std::vector<Configuration> path{goal};
        for (std::size_t i = nodes.size() - 1;; i = parent[i]) {
          path.push_back(nodes[i]);
          if (i == 0) break;
        }
        std::reverse(path.begin(), path.end());
        if (path[path.size() - 2] == goal) path.pop_back();
        return path;
      }
    }
    return {};
  }

  // Random shortcutting; a shortcut is kept only if it is statically free and
  // does not increase the number of violated constraints once timed.
  std::vector<Configuration> shortcut(std::vector<Configuration> path, std::size_t holds, const Timing& timing,
                                      std::size_t robot_id, std::span<const Constraint> constraints) {
    auto violations = [&](const std::vector<Configuration>& p) {
      return count_violations(time_path(p, holds, timing, robot_id), constraints);
    };
    std::size_t current = violations(path);
    for (std::size_t it = 0; it < params_.shortcut_iterations && path.size() > 2; ++it) {
      std::uniform_int_distribution<std::size_t> pick(0, path.size() - 1);
      std::size_t a = pick(rng_);
      std::size_t b = pick(rng_);
      if (a > b) std::swap(a, b);
      if (b - a < 2) continue;
      if (!edge_free(path[a], path[b])) continue;
      std::vector<Configuration> candidate(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(a) + 1);
      candidate.insert(candidate.end(), path.begin() + static_cast<std::ptrdiff_t>(b), path.end());
      const std::size_t v = constraints.empty() ? 0 : violations(candidate);
      if (v <= current) {
        path = std::move(candidate);
        current = v;
      }
    }
    return path;
  }

 private:
  const SerialChain& chain_;
  std::span<const Obstacle> obstacles_;
  const PlannerParams& params_;
  std::mt19937_64& rng_;
};

}  // namespace

PlanResult plan(const SerialChain& chain, const Configuration& q_start, const Configuration& q_goal,
                std::span<const Obstacle> obstacles, std::span<const Constraint> constraints,
                const PlannerParams& params, const Timing& timing, std::size_t robot_id) {
  PlanResult result;
  if (!is_config_free(chain, q_start, obstacles) || !is_config_free(chain, q_goal, obstacles)) {
    result.status = PlanStatus::InfeasibleEndpoints;
    return result;
  }

  std::vector<Constraint> mine;
  for (const auto& c : constraints) {
    if (c.robot_id == robot_id) mine.push_back(c);
  }

  // The start is occupied at index 0 whatever the path; a goal-side
  // constraint forces arrival after its index.
  std::size_t latest_goal_block = 0;
  bool goal_blocked = false;
  for (const auto& c : mine) {
    if (c.time_index == 0 && linf_distance(q_start, c.q_forbidden) <= c.radius) {
      result.status = PlanStatus::ConstraintsUnsatisfiable;
      return result;
    }
    if (linf_distance(q_goal, c.q_forbidden) <= c.radius) {
      goal_blocked = true;
      latest_goal_block = std::max(latest_goal_block, c.time_index);
    }
  }

  std::mt19937_64 rng(params.seed);
  JointSpaceRrt rrt(chain, obstacles, params, rng);

  if (q_start == q_goal) {
    std::vector<Configuration> path{q_start};
    Trajectory tr = time_path(path, 0, timing, robot_id);
    if (!violates_any(tr, mine)) {
      result.status = PlanStatus::Success;
      result.trajectory = std::move(tr);
      return result;
    }
    result.status = PlanStatus::ConstraintsUnsatisfiable;
    return result;
  }

  bool found_any = false;
  for (std::size_t attempt = 0; result.samples_used < params.max_samples; ++attempt) {
    const std::size_t before = result.samples_used;
    auto raw = rrt.grow(q_start, q_goal, params.max_samples - result.samples_used, result.samples_used, attempt == 0);
    if (raw.empty()) break;
    found_any = true;
    if (result.samples_used == before) ++result.samples_used;  // direct connection still costs one sample

    std::size_t min_holds = 0;
    if (goal_blocked) {
      const Trajectory unheld = time_path(raw, 0, timing, robot_id);
      const std::size_t arrival = unheld.size() - 1;
      if (arrival <= latest_goal_block) min_holds = latest_goal_block + 1 - arrival;
    }
    for (std::size_t holds = min_holds; holds <= min_holds + params.max_holds; ++holds) {
      auto path = rrt.shortcut(raw, holds, timing, robot_id, mine);
      Trajectory tr = time_path(path, holds, timing, robot_id);
      if (violates_any(tr, mine)) continue;
      if (!is_trajectory_free(chain, tr, obstacles)) continue;
      result.status = PlanStatus::Success;
      result.trajectory = std::move(tr);
      return result;
    }
    if (mine.empty()) break;
  }
  result.status = found_any && !mine.empty() ? PlanStatus::ConstraintsUnsatisfiable : PlanStatus::NoPath;
  return result;
}

}  // namespace apfecbs
