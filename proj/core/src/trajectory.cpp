#include "apfecbs/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace apfecbs {

namespace {

std::size_t grid_steps(double span, double dt) {
  if (span <= 0.0) return 0;
  return static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
}

double segment_speed(const Configuration& a, const Configuration& b, double duration) {
  const double delta = linf_distance(a, b);
  if (delta == 0.0) return 0.0;
  if (duration <= 0.0) return std::numeric_limits<double>::infinity();
  return delta / duration;
}

}  // namespace

Configuration Trajectory::at(double t) const {
  if (waypoints.empty()) throw std::logic_error("Trajectory::at on empty trajectory");
  if (t <= waypoints.front().t) return waypoints.front().q;
  if (t >= waypoints.back().t) return waypoints.back().q;
  auto it = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                             [](double value, const Waypoint& w) { return value < w.t; });
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return a.q + s * (b.q - a.q);
}

double l1_distance(const Configuration& a, const Configuration& b) { return (a - b).cwiseAbs().sum(); }

double linf_distance(const Configuration& a, const Configuration& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

SyncedTrajectorySet synchronize(std::span<const Trajectory> trajs, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("synchronize: dt must be positive");
  SyncedTrajectorySet set;
  set.dt = dt;
  if (trajs.empty()) return set;

  double t0 = std::numeric_limits<double>::infinity();
  double t_end = -std::numeric_limits<double>::infinity();
  for (const auto& tr : trajs) {
    if (tr.empty()) throw std::invalid_argument("synchronize: empty trajectory");
    t0 = std::min(t0, tr.start_time());
    t_end = std::max(t_end, tr.goal_time());
  }
  const std::size_t steps = grid_steps(t_end - t0, dt);
  set.times.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) set.times.push_back(t0 + static_cast<double>(k) * dt);

  set.trajectories.reserve(trajs.size());
  for (const auto& tr : trajs) {
    Trajectory out;
    out.robot_id = tr.robot_id;
    out.lb = tr.lb;
    out.waypoints.reserve(set.times.size());
    for (double t : set.times) out.waypoints.push_back({tr.at(t), t});
    set.trajectories.push_back(std::move(out));
  }
  return set;
}

Trajectory trim_rest(const Trajectory& traj) {
  Trajectory out = traj;
  if (out.waypoints.size() <= 1) return out;
  const Configuration& goal = out.waypoints.back().q;
  std::size_t keep = out.waypoints.size();
  while (keep > 1 && out.waypoints[keep - 2].q == goal) --keep;
  out.waypoints.resize(keep);
  return out;
}

double cost(const Trajectory& traj) {
  double sum = 0.0;
  for (std::size_t k = 1; k < traj.waypoints.size(); ++k) {
    sum += l1_distance(traj.waypoints[k].q, traj.waypoints[k - 1].q);
  }
  return sum;
}

double cost(std::span<const Trajectory> trajs) {
  double sum = 0.0;
  for (const auto& tr : trajs) sum += cost(tr);
  return sum;
}

double cost(const SyncedTrajectorySet& set) { return cost(std::span<const Trajectory>(set.trajectories)); }

double makespan(std::span<const Trajectory> trajs) {
  double m = 0.0;
  for (const auto& tr : trajs) {
    if (!tr.empty()) m = std::max(m, trim_rest(tr).goal_time());
  }
  return m;
}

double makespan(const SyncedTrajectorySet& set) {
  return makespan(std::span<const Trajectory>(set.trajectories));
}

double max_joint_speed(const Trajectory& traj) {
  double v = 0.0;
  for (std::size_t k = 1; k < traj.waypoints.size(); ++k) {
    const auto& a = traj.waypoints[k - 1];
    const auto& b = traj.waypoints[k];
    v = std::max(v, segment_speed(a.q, b.q, b.t - a.t));
  }
  return v;
}

double max_joint_speed(const SyncedTrajectorySet& set) {
  double v = 0.0;
  for (const auto& tr : set.trajectories) v = std::max(v, max_joint_speed(tr));
  return v;
}

SyncedTrajectorySet scale_time(const SyncedTrajectorySet& set, double v_max) {
  if (!(v_max > 0.0)) throw std::invalid_argument("scale_time: v_max must be positive");
  SyncedTrajectorySet out = set;
  if (set.times.size() < 2 || std::isinf(v_max)) return out;

  double shift = 0.0;
  for (std::size_t k = 1; k < set.times.size(); ++k) {
    const double duration = set.times[k] - set.times[k - 1];
    double needed = 0.0;
    for (const auto& tr : set.trajectories) {
      needed = std::max(needed, linf_distance(tr.waypoints[k].q, tr.waypoints[k - 1].q) / v_max);
    }
    if (needed > duration) shift += needed - duration;
    out.times[k] = set.times[k] + shift;
  }
  for (auto& tr : out.trajectories) {
    for (std::size_t k = 0; k < tr.waypoints.size(); ++k) tr.waypoints[k].t = out.times[k];
  }
  return out;
}

Trajectory retime_on_grid(const Trajectory& traj, double v_max, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("retime_on_grid: dt must be positive");
  if (traj.waypoints.size() < 2) return traj;
  Trajectory stretched = traj;
  double shift = 0.0;
  for (std::size_t k = 1; k < traj.waypoints.size(); ++k) {
    const double duration = traj.waypoints[k].t - traj.waypoints[k - 1].t;
    const double needed = linf_distance(traj.waypoints[k].q, traj.waypoints[k - 1].q) / v_max;
    if (needed > duration) shift += needed - duration;
    stretched.waypoints[k].t = traj.waypoints[k].t + shift;
  }
  if (shift == 0.0) return traj;
  const Trajectory single[] = {stretched};
  Trajectory out = synchronize(single, dt).trajectories.front();
  return out;
}

void write_trajectories(std::ostream& os, std::span<const Trajectory> trajs) {
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(17);
  for (const auto& tr : trajs) {
    const auto dof = tr.empty() ? 0 : tr.start().size();
    os << "robot " << tr.robot_id << ' ' << tr.waypoints.size() << ' ' << dof << '\n';
    for (const auto& w : tr.waypoints) {
      os << w.t;
      for (Eigen::Index j = 0; j < w.q.size(); ++j) os << ' ' << w.q[j];
      os << '\n';
    }
  }
  os.flags(flags);
  os.precision(precision);
}

std::vector<Trajectory> read_trajectories(std::istream& is) {
  std::vector<Trajectory> out;
  std::string tag;
  while (is >> tag) {
    if (tag != "robot") throw std::runtime_error("read_trajectories: expected 'robot', got '" + tag + "'");
    Trajectory tr;
    std::size_t n = 0;
    Eigen::Index dof = 0;
    if (!(is >> tr.robot_id >> n >> dof)) throw std::runtime_error("read_trajectories: bad header");
    tr.waypoints.resize(n);
    for (auto& w : tr.waypoints) {
      w.q.resize(dof);
      if (!(is >> w.t)) throw std::runtime_error("read_trajectories: truncated row");
      for (Eigen::Index j = 0; j < dof; ++j) {
        if (!(is >> w.q[j])) throw std::runtime_error("read_trajectories: truncated row");
      }
    }
    if (!tr.empty()) tr.lb = l1_distance(tr.start(), tr.goal());
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace apfecbs
