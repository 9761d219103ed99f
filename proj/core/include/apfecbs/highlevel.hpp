#pragma once

#include "apfecbs/apf.hpp"
#include "apfecbs/collision.hpp"
#include "apfecbs/kinematics.hpp"
#include "apfecbs/lowlevel.hpp"
#include "apfecbs/trajectory.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace apfecbs {

enum class SearchMode { CBS, ECBS, APF_ECBS, APF_ECBS_NF };

std::string_view to_string(SearchMode m);
/// Accepts "cbs", "ecbs", "apf-ecbs", "apf-ecbs-nf" (case-insensitive).
SearchMode parse_mode(std::string_view s);

/// Whether the mode runs repulsive modification after low-level replanning.
constexpr bool uses_modification(SearchMode m) { return m == SearchMode::APF_ECBS || m == SearchMode::APF_ECBS_NF; }
constexpr bool uses_fast_track(SearchMode m) { return m == SearchMode::APF_ECBS; }

struct SearchParams {
  SearchMode mode = SearchMode::APF_ECBS;
  double w = 1.5;
  double time_limit = 60.0;  // seconds, wall clock
  std::size_t node_limit = 2000;
  Timing timing;
  double margin = 0.0;             // sphere inflation for grid conflict checks [m]
  std::size_t dense_substeps = 10; // final interpolated recheck per grid segment
  bool rescale_after_modify = false;

  void validate() const;
};

/// Multi-robot planning problem: one chain, start and goal per robot.
struct Problem {
  std::vector<SerialChain> chains;
  std::vector<Obstacle> obstacles;
  std::vector<Configuration> starts;
  std::vector<Configuration> goals;

  std::size_t robots() const { return chains.size(); }
  void validate() const;
};

/// Constraint-tree node. Trajectories are stored on the dt grid without the
/// rest-at-goal tail; synchronization pads them on demand.
struct CTNode {
  std::uint64_t id = 0;
  std::uint64_t parent = 0;
  std::vector<Trajectory> trajectories;
  std::vector<Constraint> constraints;
  std::vector<Conflict> conflicts;
  double cost = 0.0;
  double lb_sum = 0.0;
  bool fast_track_attempted = false;
};

/// Minimal view of a node used for FOCAL bookkeeping.
struct FocalEntry {
  double cost = 0.0;
  double lb = 0.0;
  std::size_t conflicts = 0;
  std::uint64_t id = 0;
};

/// Indices into `open` of {N : N.cost <= w * min lb}.
std::vector<std::size_t> build_focal(std::span<const FocalEntry> open, double w);
/// Fewest conflicts, then lower cost, then lower id. `candidates` index `open`.
std::optional<std::size_t> best_in_focal(std::span<const FocalEntry> open, std::span<const std::size_t> candidates);
/// Lowest cost, then fewest conflicts, then lower id (CBS ordering).
std::optional<std::size_t> best_by_cost(std::span<const FocalEntry> open);

/// Robot present in every unique conflict pair (lowest index on ties).
std::optional<std::size_t> find_critical_robot(std::span<const Conflict> conflicts);

enum class SearchStatus { Solved, Timeout, NodeLimit, RootFailure, OpenExhausted, FocalEmpty };

std::string_view to_string(SearchStatus s);

struct SearchStats {
  std::size_t expanded = 0;   // pops of nodes with conflicts
  std::size_t generated = 0;  // nodes inserted into OPEN, root included
  std::size_t pops = 0;
  std::size_t fast_track_attempts = 0;
  std::size_t fast_track_successes = 0;
  std::size_t modify_calls = 0;
  std::size_t low_level_calls = 0;
  std::size_t low_level_failures = 0;
  std::size_t dead_ends = 0;
  std::size_t dense_rejections = 0;
  std::size_t focal_checks = 0;
  std::size_t focal_violations = 0;
  double elapsed = 0.0;
};

struct Solution {
  SyncedTrajectorySet trajectories;  // time-scaled, common grid
  double cost = 0.0;
  double makespan = 0.0;
};

struct SearchResult {
  SearchStatus status = SearchStatus::OpenExhausted;
  std::optional<Solution> solution;
  SearchStats stats;
  std::vector<std::uint64_t> expansion_order;  // node ids in pop order

  bool solved() const { return status == SearchStatus::Solved; }
};

/// Two-level conflict search over a constraint tree. The mode switch gates
/// repulsive modification (APF modes) and the critical-robot fast-track
/// (APF_ECBS only); CBS pops OPEN by cost, the others pop FOCAL by conflicts.
class ConflictSearch {
 public:
  ConflictSearch(Problem problem, SearchParams search, APFParams apf, PlannerParams planner);

  SearchResult solve();

  std::optional<CTNode> make_root();
  /// Attempts a one-shot repulsive resolution on the critical robot. Returns
  /// true if the node's trajectories were replaced by a conflict-free set.
  bool fast_track(CTNode& node);
  /// Children for the first conflict; failed replans are dropped.
  std::vector<CTNode> branch(const CTNode& node);

  SyncedTrajectorySet synced(const CTNode& node) const;
  std::vector<Conflict> conflicts_of(std::span<const Trajectory> trajectories) const;

  const SearchStats& stats() const { return stats_; }
  const Problem& problem() const { return problem_; }
  const SearchParams& search_params() const { return search_; }

 private:
  Trajectory modify(const Trajectory& traj, std::size_t robot, std::span<const Trajectory> all,
                    std::span<const Constraint> constraints);
  void refresh(CTNode& node) const;
  std::uint64_t seed_for(std::uint64_t node_id, std::size_t robot) const;

  Problem problem_;
  SearchParams search_;
  APFParams apf_;
  PlannerParams planner_;
  SearchStats stats_;
  std::uint64_t next_id_ = 0;
};

/// Convenience wrapper: one search with fresh statistics.
SearchResult plan_all(const Problem& problem, const SearchParams& search, const APFParams& apf,
                      const PlannerParams& planner);

}  // namespace apfecbs
