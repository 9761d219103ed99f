#include "apfecbs/apfecbs.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace apfecbs;

namespace {

Scenario desk(const char* name) { return load_scenario(std::string(APFECBS_SCENARIO_DIR) + "/" + name + ".json"); }

Configuration random_q(std::mt19937_64& rng, std::size_t dof) {
  std::uniform_real_distribution<double> u(-EIGEN_PI, EIGEN_PI);
  Configuration q(static_cast<Eigen::Index>(dof));
  for (auto& v : q) v = u(rng);
  return q;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const auto links = static_cast<std::size_t>(state.range(0));
  const auto chain = SerialChain::planar(Transform::Identity(), std::vector<double>(links, 0.3), 4, 0.05);
  std::mt19937_64 rng(1);
  const auto q = random_q(rng, links);
  for (auto _ : state) benchmark::DoNotOptimize(forward_kinematics(chain, q));
}
BENCHMARK(BM_ForwardKinematics)->Arg(2)->Arg(6);

void BM_JointForce(benchmark::State& state) {
  const auto a = SerialChain::planar(make_transform(Vec3(-0.3, 0, 0)), {0.5, 0.4}, 4, 0.05);
  const auto b = SerialChain::planar(make_transform(Vec3(0.3, 0, 0), Vec3(0, 0, EIGEN_PI)), {0.5, 0.4}, 4, 0.05);
  Configuration qa(2), qb(2);
  qa << 0.3, 0.2;
  qb << -0.3, -0.2;
  const std::vector<std::vector<WorldSphere>> others = {forward_kinematics(b, qb)};
  APFParams p;
  p.d0 = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(joint_force(a, qa, others, p));
}
BENCHMARK(BM_JointForce);

void BM_GetConflicts(benchmark::State& state) {
  const auto sc = desk("planar3x2");
  std::vector<Trajectory> trajs;
  for (std::size_t r = 0; r < sc.robots.size(); ++r) {
    Trajectory t;
    t.robot_id = r;
    t.waypoints = {{sc.starts[r], 0.0}, {sc.goals[r], 5.0}};
    trajs.push_back(t);
  }
  const auto set = synchronize(trajs, sc.search.timing.dt);
  for (auto _ : state) benchmark::DoNotOptimize(get_conflicts(set, sc.robots, sc.search.margin));
}
BENCHMARK(BM_GetConflicts);

void BM_ModifyMotion(benchmark::State& state) {
  const auto sc = desk("planar3x2");
  std::vector<Trajectory> trajs;
  for (std::size_t r = 0; r < sc.robots.size(); ++r) {
    Trajectory t;
    t.robot_id = r;
    t.waypoints = {{sc.starts[r], 0.0}, {sc.goals[r], 5.0}};
    trajs.push_back(t);
  }
  const auto set = synchronize(trajs, sc.search.timing.dt);
  const std::vector<Trajectory> others(set.trajectories.begin() + 1, set.trajectories.end());
  const std::vector<SerialChain> other_chains(sc.robots.begin() + 1, sc.robots.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        modify_motion(set.trajectories[0], sc.robots[0], others, other_chains, {}, sc.obstacles, sc.apf));
  }
}
BENCHMARK(BM_ModifyMotion)->Unit(benchmark::kMillisecond);

void BM_PlanAll(benchmark::State& state) {
  const auto sc = desk("planar3x2");
  SearchParams search = sc.search;
  search.mode = static_cast<SearchMode>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(plan_all(sc.problem(), search, sc.apf, sc.planner));
  state.SetLabel(std::string(to_string(search.mode)));
}
BENCHMARK(BM_PlanAll)
    ->Arg(static_cast<int>(SearchMode::ECBS))
    ->Arg(static_cast<int>(SearchMode::APF_ECBS))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
