#include "oracles.hpp"

#include "apfecbs/bench.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>

using namespace apfecbs;

namespace {

Configuration cfg(std::initializer_list<double> v) {
  Configuration q(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) q[i++] = x;
  return q;
}

Conflict pair(std::size_t i, std::size_t j, std::size_t k = 0) {
  Conflict c;
  c.robot_i = i;
  c.robot_j = j;
  c.time_index = k;
  return c;
}

SerialChain left_arm() { return SerialChain::planar(make_transform(Vec3(-0.45, 0, 0)), {0.5, 0.4}, 4, 0.05); }
SerialChain right_arm() {
  return SerialChain::planar(make_transform(Vec3(0.45, 0, 0), Vec3(0, 0, EIGEN_PI)), {0.5, 0.4}, 4, 0.05);
}

// The left arm sweeps past the right arm's shoulder; the right arm stays put.
Problem grazing() {
  Problem p;
  p.chains = {left_arm(), right_arm()};
  p.starts = {cfg({1.2, 0.6}), cfg({2.0, 0.0})};
  p.goals = {cfg({-1.2, 0.6}), cfg({2.0, 0.0})};
  return p;
}

// Mirrored sweeps straight through each other's workspace.
Problem crossing() {
  Problem p;
  p.chains = {left_arm(), right_arm()};
  p.starts = {cfg({1.0, 0.4}), cfg({1.0, 0.4})};
  p.goals = {cfg({-1.0, -0.4}), cfg({-1.0, -0.4})};
  return p;
}

// A generated three-arm desk instance with conflicts at the root that every mode resolves.
Problem desk_instance() {
  const auto base = load_scenario(std::string(APFECBS_SCENARIO_DIR) + "/planar3x2.json");
  return generate_instances(base, 14, 5)[13].problem();
}

SearchParams search(SearchMode mode) {
  SearchParams s;
  s.mode = mode;
  s.margin = 0.03;
  s.node_limit = 300;
  return s;
}

APFParams apf() {
  APFParams a;
  a.d0 = 0.3;
  a.alpha = 3e-4;
  a.max_step = 0.02;
  return a;
}

}  // namespace

TEST(Focal, WeightOneKeepsMinimumCost) {
  const FocalEntry open[] = {{5, 5, 2, 0}, {7, 7, 0, 1}, {5, 5, 1, 2}};
  EXPECT_EQ(build_focal(open, 1.0), (std::vector<std::size_t>{0, 2}));
}

TEST(Focal, HandExample) {
  const FocalEntry open[] = {{10, 10, 3, 0}, {14, 12, 1, 1}, {16, 11, 0, 2}};
  const auto focal = build_focal(open, 1.5);
  EXPECT_EQ(focal, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(best_in_focal(open, focal), 1u);
}

TEST(Focal, SingleNode) {
  const FocalEntry open[] = {{3, 2.5, 4, 9}};
  EXPECT_EQ(build_focal(open, 1.5), (std::vector<std::size_t>{0}));
  EXPECT_EQ(best_in_focal(open, build_focal(open, 1.5)), 0u);
}

TEST(Focal, TieBreaks) {
  const FocalEntry open[] = {{12, 10, 2, 5}, {11, 10, 2, 7}, {11, 10, 2, 6}, {10, 10, 3, 1}};
  const std::vector<std::size_t> all = {0, 1, 2, 3};
  EXPECT_EQ(best_in_focal(open, all), 2u);
  EXPECT_EQ(best_by_cost(open), 3u);
  EXPECT_FALSE(best_in_focal(open, {}).has_value());
  EXPECT_FALSE(best_by_cost({}).has_value());
}

TEST(CriticalRobot, SharedRobot) {
  const Conflict cs[] = {pair(1, 2, 0), pair(1, 3, 4), pair(1, 2, 7)};
  EXPECT_EQ(find_critical_robot(cs), 1u);
}

TEST(CriticalRobot, DisjointPairs) {
  const Conflict cs[] = {pair(1, 2), pair(3, 4)};
  EXPECT_FALSE(find_critical_robot(cs).has_value());
}

TEST(CriticalRobot, SinglePairPicksLowerIndex) {
  const Conflict cs[] = {pair(1, 2)};
  EXPECT_EQ(find_critical_robot(cs), 1u);
  const Conflict cs2[] = {pair(0, 2), pair(1, 2)};
  EXPECT_EQ(find_critical_robot(cs2), 2u);
  EXPECT_FALSE(find_critical_robot({}).has_value());
}

TEST(FastTrack, GuardSkipsAttemptedNode) {
  ConflictSearch cs(grazing(), search(SearchMode::APF_ECBS), apf(), PlannerParams{});
  auto root = cs.make_root();
  ASSERT_TRUE(root && !root->conflicts.empty());
  root->fast_track_attempted = true;
  const auto before = root->trajectories;
  EXPECT_FALSE(cs.fast_track(*root));
  EXPECT_EQ(cs.stats().fast_track_attempts, 0u);
  EXPECT_EQ(cs.stats().modify_calls, 0u);
  for (std::size_t r = 0; r < before.size(); ++r) EXPECT_EQ(root->trajectories[r].size(), before[r].size());
}

TEST(FastTrack, ResolvesGrazingContact) {
  ConflictSearch cs(grazing(), search(SearchMode::APF_ECBS), apf(), PlannerParams{});
  auto root = cs.make_root();
  ASSERT_TRUE(root);
  ASSERT_FALSE(root->conflicts.empty());
  ASSERT_EQ(find_critical_robot(root->conflicts), 0u);
  EXPECT_TRUE(cs.fast_track(*root));
  EXPECT_TRUE(root->fast_track_attempted);
  EXPECT_TRUE(root->conflicts.empty());
  const auto set = cs.synced(*root);
  const std::vector<SerialChain> chains = grazing().chains;
  EXPECT_TRUE(get_conflicts(set, chains, 0.03).empty());
  EXPECT_NEAR(root->cost, cost(root->trajectories), 1e-12);
  EXPECT_EQ(cs.stats().fast_track_successes, 1u);
  // The second call is a no-op.
  EXPECT_FALSE(cs.fast_track(*root));
  EXPECT_EQ(cs.stats().fast_track_attempts, 1u);
}

TEST(FastTrack, FailedAttemptLeavesNodeUnchanged) {
  ConflictSearch cs(crossing(), search(SearchMode::APF_ECBS), apf(), PlannerParams{});
  auto root = cs.make_root();
  ASSERT_TRUE(root && !root->conflicts.empty());
  const CTNode before = *root;
  EXPECT_FALSE(cs.fast_track(*root));
  EXPECT_TRUE(root->fast_track_attempted);
  EXPECT_EQ(cs.stats().fast_track_attempts, 1u);
  EXPECT_EQ(root->cost, before.cost);
  EXPECT_EQ(root->conflicts.size(), before.conflicts.size());
  for (std::size_t r = 0; r < before.trajectories.size(); ++r) {
    ASSERT_EQ(root->trajectories[r].size(), before.trajectories[r].size());
    for (std::size_t k = 0; k < before.trajectories[r].size(); ++k) {
      EXPECT_EQ(root->trajectories[r].waypoints[k].q, before.trajectories[r].waypoints[k].q);
    }
  }
}

TEST(Branch, TwoChildrenOneNewConstraintEach) {
  ConflictSearch cs(crossing(), search(SearchMode::ECBS), apf(), PlannerParams{});
  auto root = cs.make_root();
  ASSERT_TRUE(root && !root->conflicts.empty());
  const Conflict first = root->conflicts.front();
  for (const auto& c : root->conflicts) {
    EXPECT_LE(first.time_index, c.time_index);
  }
  const auto children = cs.branch(*root);
  ASSERT_EQ(children.size(), 2u);
  std::set<std::size_t> named;
  for (const auto& child : children) {
    ASSERT_EQ(child.constraints.size(), root->constraints.size() + 1);
    const Constraint& added = child.constraints.back();
    named.insert(added.robot_id);
    EXPECT_EQ(added.time_index, first.time_index);
    EXPECT_FALSE(child.fast_track_attempted);
    EXPECT_EQ(child.parent, root->id);
    // Independent predicate check on the grid.
    const auto& tr = child.trajectories[added.robot_id];
    const Configuration& at =
        added.time_index < tr.size() ? tr.waypoints[added.time_index].q : tr.waypoints.back().q;
    EXPECT_GT((at - added.q_forbidden).cwiseAbs().maxCoeff(), added.radius);
  }
  EXPECT_EQ(named, (std::set<std::size_t>{0, 1}));
  EXPECT_EQ(cs.stats().modify_calls, 0u);
}

TEST(Branch, ApfModesModifyChildren) {
  ConflictSearch cs(crossing(), search(SearchMode::APF_ECBS_NF), apf(), PlannerParams{});
  auto root = cs.make_root();
  ASSERT_TRUE(root);
  const auto children = cs.branch(*root);
  EXPECT_EQ(cs.stats().modify_calls, children.size());
}

TEST(Search, SingleRobotEmptyWorld) {
  Problem p;
  p.chains = {left_arm()};
  p.starts = {cfg({0.5, 0.5})};
  p.goals = {cfg({-0.5, 1.5})};
  const auto r = plan_all(p, search(SearchMode::APF_ECBS), apf(), PlannerParams{});
  ASSERT_TRUE(r.solved());
  EXPECT_EQ(r.stats.expanded, 0u);
  EXPECT_EQ(r.stats.pops, 1u);
  EXPECT_EQ(r.solution->trajectories.robots(), 1u);
}

TEST(Search, IndependentRobotsSolvedAtRoot) {
  Problem p;
  p.chains = {SerialChain::planar(make_transform(Vec3(-3, 0, 0)), {0.5, 0.4}, 4, 0.05),
              SerialChain::planar(make_transform(Vec3(3, 0, 0)), {0.5, 0.4}, 4, 0.05)};
  p.starts = {cfg({0.0, 0.0}), cfg({1.0, 0.0})};
  p.goals = {cfg({2.0, 1.0}), cfg({-1.0, 0.5})};
  const auto r = plan_all(p, search(SearchMode::ECBS), apf(), PlannerParams{});
  ASSERT_TRUE(r.solved());
  EXPECT_EQ(r.stats.generated, 1u);
  EXPECT_EQ(r.expansion_order, (std::vector<std::uint64_t>{0}));
}

class CrossingModes : public ::testing::TestWithParam<SearchMode> {};

TEST_P(CrossingModes, SolutionPassesDenseRecheck) {
  const auto p = desk_instance();
  {
    ConflictSearch probe(p, search(GetParam()), apf(), PlannerParams{});
    const auto root = probe.make_root();
    ASSERT_TRUE(root);
    ASSERT_FALSE(root->conflicts.empty());
  }
  const auto s = search(GetParam());
  const auto r = plan_all(p, s, apf(), PlannerParams{});
  ASSERT_TRUE(r.solved()) << to_string(r.status);
  const auto& set = r.solution->trajectories;
  EXPECT_GT(oracle::dense_min_distance(set, p.chains, 10), 0.0);
  EXPECT_LE(max_joint_speed(set), s.timing.v_max + 1e-9);
  for (std::size_t i = 0; i < p.robots(); ++i) {
    EXPECT_EQ(set.config(i, 0), p.starts[i]);
    EXPECT_EQ(set.trajectories[i].goal(), p.goals[i]);
  }
  EXPECT_EQ(r.stats.focal_violations, 0u);
  if (!uses_modification(GetParam())) EXPECT_EQ(r.stats.modify_calls, 0u);
  if (!uses_fast_track(GetParam())) EXPECT_EQ(r.stats.fast_track_attempts, 0u);
  EXPECT_LE(r.stats.fast_track_attempts, r.stats.generated);
}

INSTANTIATE_TEST_SUITE_P(AllModes, CrossingModes,
                         ::testing::Values(SearchMode::CBS, SearchMode::ECBS, SearchMode::APF_ECBS,
                                           SearchMode::APF_ECBS_NF),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           std::replace(name.begin(), name.end(), '-', '_');
                           return name;
                         });

TEST(Search, DeterministicExpansionOrder) {
  const auto a = plan_all(desk_instance(), search(SearchMode::ECBS), apf(), PlannerParams{});
  const auto b = plan_all(desk_instance(), search(SearchMode::ECBS), apf(), PlannerParams{});
  ASSERT_TRUE(a.solved());
  EXPECT_GT(a.expansion_order.size(), 1u);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.expansion_order, b.expansion_order);
  if (a.solved()) EXPECT_EQ(a.solution->cost, b.solution->cost);
}

TEST(Search, ModeNames) {
  EXPECT_EQ(parse_mode("APF-ECBS"), SearchMode::APF_ECBS);
  EXPECT_EQ(parse_mode("apf_ecbs_nf"), SearchMode::APF_ECBS_NF);
  EXPECT_EQ(to_string(SearchMode::CBS), "cbs");
  EXPECT_THROW(parse_mode("astar"), std::invalid_argument);
}

TEST(Search, RootFailureReported) {
  // A one-link arm whose only route to the goal is blocked; the joint limit
  // rules out going the long way round.
  Problem p;
  p.chains = {SerialChain::planar(Transform::Identity(), {0.5}, 2, 0.05)};
  p.obstacles = {SphereObstacle{Vec3(0.5 * std::cos(0.75), 0.5 * std::sin(0.75), 0), 0.1}};
  p.starts = {cfg({0.0})};
  p.goals = {cfg({1.5})};
  PlannerParams planner;
  planner.max_samples = 300;
  const auto r = plan_all(p, search(SearchMode::ECBS), apf(), planner);
  EXPECT_EQ(r.status, SearchStatus::RootFailure);
  EXPECT_FALSE(r.solution.has_value());
}
