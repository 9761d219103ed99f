// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 on any FAIL.

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace apfecbs;

namespace {

constexpr std::uint64_t kInstanceSeed = 5;
constexpr std::size_t kInstances = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scenario desk(const std::string& name) {
  return load_scenario(std::string(APFECBS_SCENARIO_DIR) + "/" + name + ".json");
}

// ---------------------------------------------------------------------------

Outcome field_gradient() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0), gain(0.01, 2.0), radius(0.1, 1.0);
  const double h = 1e-7;
  double worst = 0.0;
  std::size_t nonzero_outside = 0;
  for (int i = 0; i < 1000; ++i) {
    APFParams p;
    p.k_rep = gain(rng);
    p.d0 = radius(rng);
    const Vec3 o(u(rng), u(rng), u(rng));
    Vec3 dir(u(rng), u(rng), u(rng));
    dir.normalize();
    std::uniform_real_distribution<double> dist(0.05 * p.d0, 0.95 * p.d0);
    const Vec3 a = o + dist(rng) * dir;
    Vec3 grad;
    for (int c = 0; c < 3; ++c) {
      Vec3 ap = a, am = a;
      ap[c] += h;
      am[c] -= h;
      grad[c] = (repulsive_potential(ap, o, p) - repulsive_potential(am, o, p)) / (2 * h);
    }
    const Vec3 f = repulsive_force(a, o, p);
    worst = std::max(worst, (f + grad).norm() / f.norm());

    const Vec3 far = o + p.d0 * (1.0 + 0.5 * std::abs(u(rng)) + 1e-9) * dir;
    if (repulsive_potential(far, o, p) != 0.0 || !repulsive_force(far, o, p).isZero(0.0)) ++nonzero_outside;
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-4 && nonzero_outside == 0 && t < 1.0,
          fmt("max rel err %.2e (<= 1e-4), nonzero beyond d0 %zu, %.3f s (< 1 s)", worst, nonzero_outside, t)};
}

SerialChain random_chain(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dofs(1, 7);
  std::uniform_real_distribution<double> u(-1.0, 1.0), len(0.05, 0.6);
  const int n = dofs(rng);
  std::vector<RevoluteJoint> joints(static_cast<std::size_t>(n));
  for (auto& j : joints) {
    j.axis = Vec3(u(rng), u(rng), u(rng)).normalized();
    j.offset = make_transform(Vec3(len(rng), u(rng) * 0.2, u(rng) * 0.2), Vec3(u(rng), u(rng), u(rng)));
  }
  return SerialChain(make_transform(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))), joints,
                     make_transform(Vec3(len(rng), 0, 0)), SerialChain::uniform_layout(joints.size(), 2, 0.03));
}

Outcome jacobian_fd() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  double worst = 0.0;
  std::size_t cases = 0;
  while (cases < 200) {
    const auto chain = random_chain(rng);
    const auto q = oracle::random_config(rng, chain.dof());
    const auto spheres = forward_kinematics(chain, q);
    std::uniform_int_distribution<std::size_t> pick(0, spheres.size() - 1);
    const auto& s = spheres[pick(rng)];
    // Also move the point off the sphere centre, still rigidly on the link.
    std::uniform_real_distribution<double> off(-0.1, 0.1);
    const Vec3 point = s.center + Vec3(off(rng), off(rng), off(rng));
    const auto J = point_jacobian(chain, q, s.link, point);
    const auto F = oracle::fd_jacobian(chain, q, s.link, point);
    worst = std::max(worst, (J - F).cwiseAbs().maxCoeff());
    ++cases;
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-5 && t < 5.0, fmt("%zu cases, max abs err %.2e (<= 1e-5), %.3f s (< 5 s)", cases, worst, t)};
}

Outcome joint_force_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0), len(0.3, 0.6);
  double worst = 0.0;
  std::size_t poses = 0, draws = 0;
  while (poses < 100 && draws < 100000) {
    ++draws;
    oracle::PlanarArm a{-0.3 + 0.1 * u(rng), 0.1 * u(rng), 0.3 * u(rng), {len(rng), len(rng)}, 2, 0.04};
    oracle::PlanarArm b{0.3 + 0.1 * u(rng), 0.1 * u(rng), static_cast<double>(EIGEN_PI) + 0.3 * u(rng), {len(rng), len(rng)}, 2, 0.04};
    const auto qa = oracle::random_config(rng, 2), qb = oracle::random_config(rng, 2);
    APFParams p;
    p.k_rep = 0.05;
    p.d0 = 0.4;
    const auto want = oracle::brute_joint_force(a, qa, {{b, qb}}, p.k_rep, p.d0);
    if (want.isZero(0.0)) continue;
    const std::vector<std::vector<WorldSphere>> others = {forward_kinematics(b.chain(), qb)};
    const auto got = joint_force(a.chain(), qa, others, p);
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
    ++poses;
  }
  const double t = seconds_since(t0);
  return {poses == 100 && worst <= 1e-9 && t < 5.0,
          fmt("%zu in-range poses, max abs err %.2e (<= 1e-9), %.3f s (< 5 s)", poses, worst, t)};
}

// ---------------------------------------------------------------------------
// Benchmark runs shared by criteria 4-7, 9 and 10.

struct Run {
  RunRecord record;
  std::optional<SearchResult> raw;
  const Scenario* scenario = nullptr;
};

struct Batch {
  std::vector<Scenario> scenarios;
  std::vector<Run> runs;
  double seconds = 0.0;
};

Batch run_instances(const Scenario& base, std::span<const SearchMode> modes, bool include_base) {
  Batch b;
  if (include_base) b.scenarios.push_back(base);
  for (auto& sc : generate_instances(base, kInstances, kInstanceSeed)) b.scenarios.push_back(std::move(sc));
  const auto t0 = Clock::now();
  for (const auto& sc : b.scenarios) {
    for (auto m : modes) {
      Run r;
      r.scenario = &sc;
      r.record = run_one(sc, m, {}, &r.raw);
      b.runs.push_back(std::move(r));
    }
  }
  b.seconds = seconds_since(t0);
  return b;
}

std::vector<RunRecord> records_of(const Batch& b, bool include_base) {
  std::vector<RunRecord> out;
  for (const auto& r : b.runs) {
    if (!include_base && r.scenario == &b.scenarios.front()) continue;
    out.push_back(r.record);
  }
  return out;
}

// Dense pairwise clearance and joint speeds, recomputed outside the library.
struct Recheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string first;
};

void recheck(const Run& run, double v_max, std::size_t substeps, Recheck& acc) {
  if (!run.raw || !run.raw->solution) return;
  const auto& sc = *run.scenario;
  const auto& set = run.raw->solution->trajectories;
  ++acc.checked;
  std::string why;
  const double dmin = oracle::dense_min_distance(set, sc.robots, static_cast<int>(substeps));
  if (!(dmin > 0.0)) why = fmt("dense clearance %.4f", dmin);
  for (const auto& tr : set.trajectories) {
    for (std::size_t k = 1; k < tr.size(); ++k) {
      const double dt = tr.waypoints[k].t - tr.waypoints[k - 1].t;
      for (Eigen::Index j = 0; j < tr.waypoints[k].q.size(); ++j) {
        const double v = std::abs(tr.waypoints[k].q[j] - tr.waypoints[k - 1].q[j]) / dt;
        if (v > v_max + 1e-9 && why.empty()) why = fmt("speed %.6f on robot %zu", v, tr.robot_id);
      }
    }
  }
  for (std::size_t r = 0; r < sc.robots.size(); ++r) {
    const auto& tr = set.trajectories[r];
    if (tr.start() != sc.starts[r] || tr.goal() != sc.goals[r]) why = "endpoint mismatch";
    for (const auto& w : tr.waypoints) {
      if (!is_config_free(sc.robots[r], w.q, sc.obstacles) && why.empty()) why = "static collision";
    }
  }
  if (!why.empty()) {
    ++acc.violations;
    if (acc.first.empty()) acc.first = run.record.scenario + "/" + run.record.mode + ": " + why;
  }
}

// ---------------------------------------------------------------------------

struct ModifyCase {
  SerialChain chain;
  Trajectory traj;
  std::vector<Trajectory> others;
  std::vector<SerialChain> other_chains;
  std::vector<Obstacle> obstacles;
};

Trajectory straight(std::size_t id, const Configuration& a, const Configuration& b, std::size_t steps) {
  Trajectory t;
  t.robot_id = id;
  for (std::size_t k = 0; k < steps; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(steps - 1);
    t.waypoints.push_back({(1 - f) * a + f * b, 0.1 * static_cast<double>(k)});
  }
  return t;
}

Outcome modify_contract() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.0, 1.0), len(0.3, 0.6), unit(0.0, 1.0);
  std::size_t random_cases = 0, endpoint_bad = 0, static_bad = 0, shape_bad = 0, constraint_bad = 0;
  std::size_t far_cases = 0, far_bad = 0;
  std::size_t wall_cases = 0, wall_bad = 0;

  while (random_cases < 200) {
    oracle::PlanarArm a{-0.35, 0.0, 0.0, {len(rng), len(rng)}, 3, 0.05};
    oracle::PlanarArm b{0.35, 0.0, EIGEN_PI, {len(rng), len(rng)}, 3, 0.05};
    const std::size_t steps = 10 + static_cast<std::size_t>(unit(rng) * 20);
    const auto mine = straight(0, oracle::random_config(rng, 2, -2.5, 2.5), oracle::random_config(rng, 2, -2.5, 2.5), steps);
    const auto theirs = straight(1, oracle::random_config(rng, 2, -2.5, 2.5), oracle::random_config(rng, 2, -2.5, 2.5), steps);
    std::vector<Obstacle> obstacles = {SphereObstacle{Vec3(u(rng), u(rng) + 1.2, 0), 0.1 + 0.2 * unit(rng)}};
    const auto chain = a.chain();
    if (!is_trajectory_free(chain, mine, obstacles)) continue;
    const Trajectory others[] = {theirs};
    const SerialChain other_chains[] = {b.chain()};
    APFParams p;
    p.d0 = 0.3;
    p.alpha = std::pow(10.0, -4.0 + 2.0 * unit(rng));
    p.max_step = unit(rng) < 0.5 ? 0.0 : 0.02;
    p.max_iter = 30;
    // One constraint the input satisfies, placed away from the input at a random interior index.
    std::uniform_int_distribution<std::size_t> idx(1, steps - 2);
    const std::size_t k = idx(rng);
    Constraint c{0, mine.waypoints[k].q + Eigen::Vector2d(0.2, -0.2), k, 0.05};
    const Constraint cs[] = {c};
    ModifyResult r;
    try {
      r = modify_motion(mine, chain, others, other_chains, cs, obstacles, p);
    } catch (const std::exception&) {
      continue;
    }
    ++random_cases;
    if (r.trajectory.start() != mine.start() || r.trajectory.goal() != mine.goal()) ++endpoint_bad;
    if (!is_trajectory_free(chain, r.trajectory, obstacles)) ++static_bad;
    if (violates(r.trajectory, c)) ++constraint_bad;
    bool shape_ok = r.trajectory.size() == mine.size();
    for (std::size_t i = 0; shape_ok && i < mine.size(); ++i) shape_ok = r.trajectory.waypoints[i].t == mine.waypoints[i].t;
    if (!shape_ok) ++shape_bad;

    // The same case with the other robot moved out of range.
    const SerialChain far_chains[] = {b.chain().with_base(make_transform(Vec3(20.0, 0, 0)))};
    const auto far = modify_motion(mine, chain, others, far_chains, cs, obstacles, p);
    ++far_cases;
    for (std::size_t i = 0; i < mine.size(); ++i) {
      if (far.trajectory.waypoints[i].q != mine.waypoints[i].q) {
        ++far_bad;
        break;
      }
    }
  }

  // A wall just below a tip that is pushed down by a sphere above it.
  while (wall_cases < 200) {
    const double L = 0.3 + 0.5 * unit(rng);
    const double h = 0.1 + 0.08 * unit(rng);
    const double gap = 0.001 + 0.019 * unit(rng);
    const auto arm = SerialChain::planar(Transform::Identity(), {L}, 1, 0.05);
    const auto pin = SerialChain::planar(make_transform(Vec3(L, h + 0.3, 0), Vec3(0, 0, -EIGEN_PI / 2)), {0.3}, 1, 0.05);
    const std::size_t steps = 3 + static_cast<std::size_t>(unit(rng) * 10);
    Trajectory mine;
    Trajectory theirs;
    theirs.robot_id = 1;
    for (std::size_t k = 0; k < steps; ++k) {
      mine.waypoints.push_back({Configuration::Zero(1), 0.1 * static_cast<double>(k)});
      theirs.waypoints.push_back({Configuration::Zero(1), 0.1 * static_cast<double>(k)});
    }
    const std::vector<Obstacle> wall = {BoxObstacle{Vec3(-2, -1, -1), Vec3(2, -0.05 - gap, 1)}};
    const Trajectory others[] = {theirs};
    const SerialChain other_chains[] = {pin};
    APFParams p;
    p.d0 = 0.2;
    // Torque on the joint is -mag * L (tip at (L, 0), pin sphere straight above).
    // Pick alpha so the first update turns the joint by `turn`, enough to put
    // the tip sphere into the wall but well inside joint limits.
    const double mag = p.k_rep * (1.0 / h - 1.0 / p.d0) / (h * h);
    const double turn = std::asin(gap / L) + 0.02 + 0.3 * unit(rng);
    p.alpha = turn / (mag * L);
    const auto r = modify_motion(mine, arm, others, other_chains, {}, wall, p);
    ++wall_cases;
    bool same = r.stop == ModifyStop::StaticCollision && r.safe_iteration == 0;
    for (std::size_t k = 0; same && k < steps; ++k) same = r.trajectory.waypoints[k].q == mine.waypoints[k].q;
    if (!same) ++wall_bad;
  }

  const std::size_t bad = endpoint_bad + static_bad + shape_bad + constraint_bad + far_bad + wall_bad;
  return {bad == 0, fmt("%zu random cases (endpoint %zu, static %zu, grid %zu, constraint %zu violations); "
                        "%zu out-of-range cases changed %zu; %zu first-update-collision cases not returning input %zu",
                        random_cases, endpoint_bad, static_bad, shape_bad, constraint_bad, far_cases, far_bad,
                        wall_cases, wall_bad)};
}

Outcome fast_track_logic(const Batch& desk3) {
  auto mk = [](std::size_t i, std::size_t j) {
    Conflict c;
    c.robot_i = i;
    c.robot_j = j;
    return c;
  };
  // R1, R2, R3 are robots 0, 1, 2.
  const Conflict example[] = {mk(0, 1), mk(0, 2)};
  const Conflict disjoint[] = {mk(0, 1), mk(2, 3)};
  const bool worked = find_critical_robot(example) == std::optional<std::size_t>(0);
  const bool none = !find_critical_robot(disjoint).has_value();

  // Guard: a second call on the same node must not attempt again.
  std::size_t guard_bad = 0, probed = 0;
  for (const auto& sc : desk3.scenarios) {
    ConflictSearch cs(sc.problem(), sc.search, sc.apf, sc.planner);
    auto root = cs.make_root();
    if (!root || !find_critical_robot(root->conflicts)) continue;
    ++probed;
    cs.fast_track(*root);
    const auto attempts = cs.stats().fast_track_attempts;
    const auto calls = cs.stats().modify_calls;
    cs.fast_track(*root);
    if (attempts != 1 || cs.stats().fast_track_attempts != attempts || cs.stats().modify_calls != calls) ++guard_bad;
  }

  // Across the benchmark: attempts never exceed the number of nodes ever created.
  std::size_t over = 0, attempts = 0;
  for (const auto& r : desk3.runs) {
    if (!r.raw) continue;
    attempts += r.raw->stats.fast_track_attempts;
    if (r.raw->stats.fast_track_attempts > r.raw->stats.generated) ++over;
  }
  return {worked && none && guard_bad == 0 && probed > 0 && over == 0,
          fmt("worked example -> R1: %s; disjoint -> none: %s; repeat-call guard %zu/%zu nodes ok; "
              "%zu attempts, %zu runs with attempts > nodes",
              worked ? "yes" : "no", none ? "yes" : "no", probed - guard_bad, probed, attempts, over)};
}

}  // namespace

int main() {
  std::map<int, Outcome> results;
  auto report = [&](int id, const char* title, const Outcome& o) {
    results[id] = o;
    std::printf("%s  [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
  };
  auto guarded = [&](int id, const char* title, const std::function<Outcome()>& fn) {
    try {
      report(id, title, fn());
    } catch (const std::exception& e) {
      report(id, title, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded(1, "field gradient", field_gradient);
  guarded(2, "jacobian vs finite differences", jacobian_fd);
  guarded(3, "joint force vs brute-force loop", joint_force_oracle);

  const SearchMode three[] = {SearchMode::ECBS, SearchMode::APF_ECBS_NF, SearchMode::APF_ECBS};
  const SearchMode apf_only[] = {SearchMode::APF_ECBS};
  Batch desk3, desk2, desk4;
  try {
    desk3 = run_instances(desk("planar3x2"), three, true);
    desk2 = run_instances(desk("planar2x2"), apf_only, true);
    desk4 = run_instances(desk("planar4x2"), apf_only, true);
  } catch (const std::exception& e) {
    for (int id = 4; id <= 10; ++id) {
      if (id != 8) report(id, "benchmark", {false, std::string("exception: ") + e.what()});
    }
    guarded(8, "modify_motion contract", modify_contract);
    return 1;
  }

  guarded(4, "solution validity", [&] {
    Recheck acc;
    std::size_t successes = 0, runs = 0;
    for (const Batch* b : {&desk2, &desk3, &desk4}) {
      for (const auto& r : b->runs) {
        ++runs;
        if (r.record.success) ++successes;
        recheck(r, r.scenario->search.timing.v_max, 10, acc);
      }
    }
    return Outcome{acc.violations == 0 && acc.checked > 0,
                   fmt("%zu runs, %zu successes, %zu solutions rechecked at dt/10, %zu violations%s%s", runs, successes,
                       acc.checked, acc.violations, acc.first.empty() ? "" : "; first: ", acc.first.c_str())};
  });

  guarded(5, "focal soundness", [&] {
    std::size_t checks = 0, violations = 0;
    for (const Batch* b : {&desk2, &desk3, &desk4}) {
      for (const auto& r : b->runs) {
        if (!r.raw || r.record.mode == "apf-ecbs-nf") continue;
        checks += r.raw->stats.focal_checks;
        violations += r.raw->stats.focal_violations;
      }
    }
    return Outcome{violations == 0 && checks > 0, fmt("%zu pops checked, %zu violations", checks, violations)};
  });

  const auto records3 = records_of(desk3, false);
  auto mean_over = [&](const std::vector<std::string>& names, const std::string& mode) {
    double sum = 0.0;
    for (const auto& r : records3) {
      if (r.mode == mode && std::find(names.begin(), names.end(), r.scenario) != names.end()) {
        sum += static_cast<double>(r.expanded_nodes);
      }
    }
    return names.empty() ? 0.0 : sum / static_cast<double>(names.size());
  };

  guarded(6, "node reduction vs ECBS", [&] {
    const std::vector<std::string> modes = {"ecbs", "apf-ecbs"};
    const auto common = commonly_solved(records3, modes);
    const double e = mean_over(common, "ecbs"), a = mean_over(common, "apf-ecbs");
    return Outcome{!common.empty() && a <= 0.7 * e && desk3.seconds <= 900.0,
                   fmt("%zu/%zu instances solved by both; mean expanded ECBS %.2f, APF-ECBS %.2f (ratio %.3f <= 0.7); "
                       "batch %.1f s (<= 900 s)",
                       common.size(), kInstances, e, a, e > 0 ? a / e : 0.0, desk3.seconds)};
  });

  guarded(7, "ablation vs APF-ECBS-NF", [&] {
    const std::vector<std::string> modes = {"apf-ecbs-nf", "apf-ecbs"};
    const auto common = commonly_solved(records3, modes);
    const double nf = mean_over(common, "apf-ecbs-nf"), a = mean_over(common, "apf-ecbs");
    std::size_t ft = 0;
    for (const auto& r : records3) {
      if (r.mode == "apf-ecbs") ft += r.fast_track_successes;
    }
    return Outcome{!common.empty() && a <= nf && ft > 0,
                   fmt("%zu/%zu instances solved by both; mean expanded APF-ECBS-NF %.2f, APF-ECBS %.2f; "
                       "fast-track successes %zu (> 0)",
                       common.size(), kInstances, nf, a, ft)};
  });

  guarded(8, "modify_motion contract", modify_contract);
  guarded(9, "fast-track logic", [&] { return fast_track_logic(desk3); });

  guarded(10, "determinism", [&] {
    const auto again = run_instances(desk("planar3x2"), three, true);
    std::ostringstream a, b;
    const auto ra = records_of(desk3, true), rb = records_of(again, true);
    emit_report(a, ra);
    emit_report(b, rb);
    return Outcome{a.str() == b.str() && !ra.empty(),
                   fmt("two planar3x2 benchmark runs (%zu records, %zu bytes): %s", ra.size(), a.str().size(),
                       a.str() == b.str() ? "byte-identical" : "differ")};
  });

  bool all = true;
  for (const auto& [id, o] : results) all = all && o.pass;
  std::printf("%s: %zu criteria\n", all ? "ALL PASS" : "SOME FAILED", results.size());
  return all ? 0 : 1;
}
