#include "apfecbs/highlevel.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

namespace apfecbs {

std::string_view to_string(SearchMode m) {
  switch (m) {
    case SearchMode::CBS: return "cbs";
    case SearchMode::ECBS: return "ecbs";
    case SearchMode::APF_ECBS: return "apf-ecbs";
    case SearchMode::APF_ECBS_NF: return "apf-ecbs-nf";
  }
  return "unknown";
}

SearchMode parse_mode(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(lower.begin(), lower.end(), '_', '-');
  if (lower == "cbs") return SearchMode::CBS;
  if (lower == "ecbs") return SearchMode::ECBS;
  if (lower == "apf-ecbs") return SearchMode::APF_ECBS;
  if (lower == "apf-ecbs-nf") return SearchMode::APF_ECBS_NF;
  throw std::invalid_argument("unknown search mode '" + std::string(s) + "'");
}

std::string_view to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Solved: return "solved";
    case SearchStatus::Timeout: return "timeout";
    case SearchStatus::NodeLimit: return "node_limit";
    case SearchStatus::RootFailure: return "root_failure";
    case SearchStatus::OpenExhausted: return "open_exhausted";
    case SearchStatus::FocalEmpty: return "focal_empty";
  }
  return "unknown";
}

void SearchParams::validate() const {
  if (!(w >= 1.0)) throw std::invalid_argument("SearchParams: w must be >= 1");
  if (!(timing.dt > 0.0)) throw std::invalid_argument("SearchParams: dt must be positive");
  if (!(timing.v_max > 0.0)) throw std::invalid_argument("SearchParams: v_max must be positive");
  if (!(margin >= 0.0)) throw std::invalid_argument("SearchParams: margin must be non-negative");
  if (dense_substeps < 1) throw std::invalid_argument("SearchParams: dense_substeps must be >= 1");
}

void Problem::validate() const {
  if (chains.empty()) throw std::invalid_argument("Problem: no robots");
  if (starts.size() != chains.size() || goals.size() != chains.size()) {
    throw std::invalid_argument("Problem: need one start and one goal per robot");
  }
  for (std::size_t r = 0; r < chains.size(); ++r) {
    if (static_cast<std::size_t>(starts[r].size()) != chains[r].dof() ||
        static_cast<std::size_t>(goals[r].size()) != chains[r].dof()) {
      throw std::invalid_argument("Problem: start/goal of robot " + std::to_string(r) + " has wrong dimension");
    }
  }
}

std::vector<std::size_t> build_focal(std::span<const FocalEntry> open, double w) {
  std::vector<std::size_t> focal;
  if (open.empty()) return focal;
  double min_lb = std::numeric_limits<double>::infinity();
  for (const auto& n : open) min_lb = std::min(min_lb, n.lb);
  const double bound = w * min_lb;
  for (std::size_t i = 0; i < open.size(); ++i) {
    if (open[i].cost <= bound) focal.push_back(i);
  }
  return focal;
}

std::optional<std::size_t> best_in_focal(std::span<const FocalEntry> open, std::span<const std::size_t> candidates) {
  std::optional<std::size_t> best;
  for (std::size_t idx : candidates) {
    if (!best) {
      best = idx;
      continue;
    }
    const auto& a = open[idx];
    const auto& b = open[*best];
    if (std::tie(a.conflicts, a.cost, a.id) < std::tie(b.conflicts, b.cost, b.id)) best = idx;
  }
  return best;
}

std::optional<std::size_t> best_by_cost(std::span<const FocalEntry> open) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < open.size(); ++i) {
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = open[i];
    const auto& b = open[*best];
    if (std::tie(a.cost, a.conflicts, a.id) < std::tie(b.cost, b.conflicts, b.id)) best = i;
  }
  return best;
}

std::optional<std::size_t> find_critical_robot(std::span<const Conflict> conflicts) {
  if (conflicts.empty()) return std::nullopt;
  std::map<std::pair<std::size_t, std::size_t>, bool> pairs;
  for (const auto& c : conflicts) pairs[{std::min(c.robot_i, c.robot_j), std::max(c.robot_i, c.robot_j)}] = true;
  std::map<std::size_t, std::size_t> appearances;
  for (const auto& [pair, unused] : pairs) {
    ++appearances[pair.first];
    ++appearances[pair.second];
  }
  for (const auto& [robot, count] : appearances) {  // ascending robot index
    if (count == pairs.size()) return robot;
  }
  return std::nullopt;
}

ConflictSearch::ConflictSearch(Problem problem, SearchParams search, APFParams apf, PlannerParams planner)
    : problem_(std::move(problem)), search_(search), apf_(apf), planner_(planner) {
  problem_.validate();
  search_.validate();
  apf_.validate();
}

std::uint64_t ConflictSearch::seed_for(std::uint64_t node_id, std::size_t robot) const {
  if (node_id == 0) return planner_.seed ^ (static_cast<std::uint64_t>(robot + 1) << 32);
  return planner_.seed ^ node_id;
}

SyncedTrajectorySet ConflictSearch::synced(const CTNode& node) const {
  return synchronize(node.trajectories, search_.timing.dt);
}

std::vector<Conflict> ConflictSearch::conflicts_of(std::span<const Trajectory> trajectories) const {
  const SyncedTrajectorySet set = synchronize(trajectories, search_.timing.dt);
  auto out = get_conflicts(set, problem_.chains, search_.margin);
  // Contacts between grid samples are charged to the nearest index.
  auto dense = dense_conflicts(set, problem_.chains, search_.dense_substeps, 0.0);
  out.insert(out.end(), dense.begin(), dense.end());
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

void ConflictSearch::refresh(CTNode& node) const {
  node.cost = cost(node.trajectories);
  node.lb_sum = 0.0;
  for (const auto& tr : node.trajectories) node.lb_sum += tr.lb;
  node.conflicts = conflicts_of(node.trajectories);
}

Trajectory ConflictSearch::modify(const Trajectory& traj, std::size_t robot, std::span<const Trajectory> all,
                                  std::span<const Constraint> constraints) {
  ++stats_.modify_calls;
  std::vector<Trajectory> others;
  std::vector<SerialChain> other_chains;
  for (std::size_t r = 0; r < all.size(); ++r) {
    if (r == robot) continue;
    others.push_back(all[r]);
    other_chains.push_back(problem_.chains[r]);
  }
  // Deform over the common horizon so a robot already resting at its goal
  // can still yield.
  std::vector<Trajectory> current(all.begin(), all.end());
  current[robot] = traj;
  const SyncedTrajectorySet set = synchronize(current, search_.timing.dt);
  Trajectory padded = set.trajectories[robot];
  padded.lb = traj.lb;
  auto result = modify_motion(padded, problem_.chains[robot], others, other_chains, constraints, problem_.obstacles, apf_);
  Trajectory out = trim_rest(result.trajectory);
  out.lb = traj.lb;
  if (search_.rescale_after_modify) {
    Trajectory retimed = retime_on_grid(out, search_.timing.v_max, search_.timing.dt);
    retimed.robot_id = out.robot_id;
    retimed.lb = out.lb;
    if (!violates_any(retimed, constraints) && is_trajectory_free(problem_.chains[robot], retimed, problem_.obstacles)) {
      out = std::move(retimed);
    }
  }
  return out;
}

std::optional<CTNode> ConflictSearch::make_root() {
  CTNode root;
  root.id = next_id_++;
  root.parent = root.id;
  for (std::size_t r = 0; r < problem_.robots(); ++r) {
    PlannerParams params = planner_;
    params.seed = seed_for(root.id, r);
    ++stats_.low_level_calls;
    auto res = plan(problem_.chains[r], problem_.starts[r], problem_.goals[r], problem_.obstacles, {}, params,
                    search_.timing, r);
    if (!res.ok()) {
      ++stats_.low_level_failures;
      return std::nullopt;
    }
    root.trajectories.push_back(std::move(res.trajectory));
  }
  refresh(root);
  return root;
}

bool ConflictSearch::fast_track(CTNode& node) {
  if (node.fast_track_attempted) return false;
  const auto critical = find_critical_robot(node.conflicts);
  if (!critical) return false;
  node.fast_track_attempted = true;
  ++stats_.fast_track_attempts;

  std::vector<Trajectory> trial = node.trajectories;
  trial[*critical] = modify(trial[*critical], *critical, trial, node.constraints);
  auto remaining = conflicts_of(trial);
  if (!remaining.empty()) return false;

  node.trajectories = std::move(trial);
  node.cost = cost(node.trajectories);
  node.conflicts.clear();
  ++stats_.fast_track_successes;
  return true;
}

std::vector<CTNode> ConflictSearch::branch(const CTNode& node) {
  std::vector<CTNode> children;
  if (node.conflicts.empty()) return children;
  const Conflict& first = node.conflicts.front();
  const std::pair<std::size_t, const Configuration*> sides[] = {{first.robot_i, &first.q_i},
                                                                {first.robot_j, &first.q_j}};
  for (const auto& [robot, q] : sides) {
    CTNode child;
    child.id = next_id_++;
    child.parent = node.id;
    child.trajectories = node.trajectories;
    child.constraints = node.constraints;
    child.constraints.push_back({robot, *q, first.time_index, apf_.rho});

    PlannerParams params = planner_;
    params.seed = seed_for(child.id, robot);
    ++stats_.low_level_calls;
    auto res = plan(problem_.chains[robot], problem_.starts[robot], problem_.goals[robot], problem_.obstacles,
                    child.constraints, params, search_.timing, robot);
    if (!res.ok()) {
      ++stats_.low_level_failures;
      continue;
    }
    Trajectory replanned = std::move(res.trajectory);
    if (uses_modification(search_.mode)) {
      replanned = modify(replanned, robot, child.trajectories, child.constraints);
    }
    child.trajectories[robot] = std::move(replanned);
    refresh(child);
    child.fast_track_attempted = false;
    children.push_back(std::move(child));
  }
  return children;
}

SearchResult ConflictSearch::solve() {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - started).count(); };

  SearchResult result;
  stats_ = {};
  next_id_ = 0;

  auto root = make_root();
  if (!root) {
    result.status = SearchStatus::RootFailure;
    stats_.elapsed = elapsed();
    result.stats = stats_;
    return result;
  }
  std::vector<CTNode> open;
  open.push_back(std::move(*root));
  stats_.generated = 1;

  const bool focal_mode = search_.mode != SearchMode::CBS;
  result.status = SearchStatus::OpenExhausted;

  while (!open.empty()) {
    if (elapsed() > search_.time_limit) {
      result.status = SearchStatus::Timeout;
      break;
    }
    if (stats_.generated > search_.node_limit) {
      result.status = SearchStatus::NodeLimit;
      break;
    }

    std::vector<FocalEntry> entries;
    entries.reserve(open.size());
    double min_lb = std::numeric_limits<double>::infinity();
    for (const auto& n : open) {
      entries.push_back({n.cost, n.lb_sum, n.conflicts.size(), n.id});
      min_lb = std::min(min_lb, n.lb_sum);
    }

    std::optional<std::size_t> pick;
    if (focal_mode) {
      const auto focal = build_focal(entries, search_.w);
      pick = best_in_focal(entries, focal);
      if (!pick) {
        result.status = SearchStatus::FocalEmpty;
        break;
      }
      ++stats_.focal_checks;
      if (open[*pick].cost > search_.w * min_lb) ++stats_.focal_violations;
    } else {
      pick = best_by_cost(entries);
    }

    CTNode& node = open[*pick];
    ++stats_.pops;
    result.expansion_order.push_back(node.id);

    if (node.conflicts.empty()) {
      SyncedTrajectorySet set = synced(node);
      auto dense = dense_conflicts(set, problem_.chains, search_.dense_substeps, 0.0);
      if (dense.empty()) {
        Solution sol;
        sol.trajectories = scale_time(set, search_.timing.v_max);
        sol.cost = cost(sol.trajectories);
        sol.makespan = makespan(sol.trajectories);
        result.solution = std::move(sol);
        result.status = SearchStatus::Solved;
        break;
      }
      // Contact between grid samples: resolve it like any other conflict.
      ++stats_.dense_rejections;
      node.conflicts = std::move(dense);
      continue;
    }

    ++stats_.expanded;
    if (uses_fast_track(search_.mode) && fast_track(node)) continue;

    CTNode parent = std::move(node);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(*pick));
    auto children = branch(parent);
    if (children.empty()) ++stats_.dead_ends;
    for (auto& c : children) {
      open.push_back(std::move(c));
      ++stats_.generated;
    }
  }

  stats_.elapsed = elapsed();
  result.stats = stats_;
  return result;
}

SearchResult plan_all(const Problem& problem, const SearchParams& search, const APFParams& apf,
                      const PlannerParams& planner) {
  ConflictSearch engine(problem, search, apf, planner);
  return engine.solve();
}

}  // namespace apfecbs
