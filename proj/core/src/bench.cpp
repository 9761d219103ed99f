#include "apfecbs/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace apfecbs {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string instance_name(const std::string& base, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%03zu", index);
  return base + "-" + buf;
}

Configuration sample_uniform(const SerialChain& chain, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Configuration q(chain.dof());
  for (std::size_t j = 0; j < chain.dof(); ++j) {
    const auto& jt = chain.joints()[j];
    q[j] = jt.lower + unit(rng) * (jt.upper - jt.lower);
  }
  return q;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::vector<Scenario> generate_instances(const Scenario& base, std::size_t count, std::uint64_t seed,
                                         const GenerateOptions& options) {
  if (count < 1) throw std::invalid_argument("generate_instances: count must be >= 1");
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t instance_seed = splitmix64(seed ^ splitmix64(i));
    std::mt19937_64 rng(instance_seed);
    Scenario sc = base;
    sc.name = instance_name(base.name, i);
    sc.seed = instance_seed;
    sc.planner.seed = instance_seed;
    sc.starts.clear();
    sc.goals.clear();

    auto acceptable = [&](std::size_t r, const Configuration& q, const std::vector<Configuration>& placed) {
      const auto& chain = base.robots[r];
      if (!is_config_free(chain, q, base.obstacles)) return false;
      if (base.workspace && !base.workspace->contains(compute_pose(chain, q).tip)) return false;
      for (std::size_t o = 0; o < placed.size(); ++o) {
        if (min_robot_distance(chain, q, base.robots[o], placed[o]) < options.min_separation) return false;
      }
      return true;
    };

    for (std::size_t r = 0; r < base.robots.size(); ++r) {
      bool placed = false;
      for (std::size_t attempt = 0; attempt < options.max_attempts && !placed; ++attempt) {
        Configuration start = sample_uniform(base.robots[r], rng);
        if (!acceptable(r, start, sc.starts)) continue;
        for (std::size_t g = 0; g < options.max_attempts; ++g) {
          Configuration goal = sample_uniform(base.robots[r], rng);
          if (l1_distance(start, goal) < options.min_motion) continue;
          if (!acceptable(r, goal, sc.goals)) continue;
          sc.starts.push_back(start);
          sc.goals.push_back(goal);
          placed = true;
          break;
        }
      }
      if (!placed) {
        const std::string who = r < base.robot_names.size() ? base.robot_names[r] : "robot" + std::to_string(r);
        throw std::runtime_error("generate_instances: sampling budget exhausted for " + who);
      }
    }
    out.push_back(std::move(sc));
  }
  return out;
}

std::string VerificationReport::describe() const {
  std::ostringstream os;
  if (!endpoints_ok) os << "endpoints mismatch; ";
  if (!static_ok) os << "static collision or joint limit; ";
  if (!conflict_free) os << "inter-robot contact (min distance " << min_distance << "); ";
  if (!speed_ok) os << "joint speed " << max_speed << " above limit; ";
  std::string s = os.str();
  if (s.size() >= 2) s.resize(s.size() - 2);
  return s.empty() ? "ok" : s;
}

VerificationReport verify_solution(const Scenario& scenario, const SyncedTrajectorySet& solution,
                                   std::size_t substeps) {
  VerificationReport rep;
  const std::size_t n = scenario.robots.size();
  if (solution.trajectories.size() != n || substeps == 0) {
    rep.endpoints_ok = false;
    return rep;
  }
  const std::size_t steps = solution.times.size();
  for (std::size_t r = 0; r < n; ++r) {
    const auto& wp = solution.trajectories[r].waypoints;
    if (wp.size() != steps || wp.front().q != scenario.starts[r] || wp.back().q != scenario.goals[r]) {
      rep.endpoints_ok = false;
      return rep;
    }
  }

  const double v_max = scenario.search.timing.v_max;
  for (std::size_t k = 1; k < steps; ++k) {
    const double duration = solution.times[k] - solution.times[k - 1];
    for (std::size_t r = 0; r < n; ++r) {
      const auto& a = solution.trajectories[r].waypoints[k - 1].q;
      const auto& b = solution.trajectories[r].waypoints[k].q;
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double delta = std::abs(b[j] - a[j]);
        if (delta == 0.0) continue;
        const double speed = duration > 0.0 ? delta / duration : std::numeric_limits<double>::infinity();
        rep.max_speed = std::max(rep.max_speed, speed);
      }
    }
  }
  rep.speed_ok = rep.max_speed <= v_max + 1e-9;

  rep.min_distance = std::numeric_limits<double>::infinity();
  std::vector<std::vector<WorldSphere>> bodies(n);
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t inner = k + 1 < steps ? substeps : 1;
    for (std::size_t s = 0; s < inner; ++s) {
      const double f = static_cast<double>(s) / static_cast<double>(substeps);
      for (std::size_t r = 0; r < n; ++r) {
        const auto& a = solution.trajectories[r].waypoints[k].q;
        const Configuration q = s == 0 ? a : Configuration(a + f * (solution.trajectories[r].waypoints[k + 1].q - a));
        if (!scenario.robots[r].within_limits(q)) rep.static_ok = false;
        bodies[r] = forward_kinematics(scenario.robots[r], q);
        for (const auto& sphere : bodies[r]) {
          for (const auto& o : scenario.obstacles) {
            if (o.clearance(sphere.center, sphere.radius) <= 0.0) rep.static_ok = false;
          }
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          for (const auto& a : bodies[i]) {
            for (const auto& b : bodies[j]) {
              const double d = (a.center - b.center).norm() - a.radius - b.radius;
              rep.min_distance = std::min(rep.min_distance, d);
            }
          }
        }
      }
    }
  }
  rep.conflict_free = n < 2 || rep.min_distance > 0.0;
  return rep;
}

RunRecord run_one(const Scenario& scenario, SearchMode mode, const BatchOptions& options,
                  std::optional<SearchResult>* raw) {
  RunRecord rec;
  rec.scenario = scenario.name;
  rec.mode = std::string(to_string(mode));
  rec.seed = scenario.planner.seed;

  SearchParams search = scenario.search;
  search.mode = mode;
  if (options.time_limit) search.time_limit = *options.time_limit;
  if (options.node_limit) search.node_limit = *options.node_limit;

  SearchResult result;
  try {
    result = plan_all(scenario.problem(), search, scenario.apf, scenario.planner);
  } catch (const std::exception& e) {
    rec.failure_reason = std::string("error: ") + e.what();
    return rec;
  }
  rec.expanded_nodes = result.stats.expanded;
  rec.generated_nodes = result.stats.generated;
  rec.planning_time = result.stats.elapsed;
  rec.fast_track_successes = result.stats.fast_track_successes;
  rec.focal_violations = result.stats.focal_violations;

  if (result.solved()) {
    const auto report = verify_solution(scenario, result.solution->trajectories, options.verify_substeps);
    if (report.ok()) {
      rec.success = true;
      rec.makespan = result.solution->makespan;
      rec.cost = result.solution->cost;
    } else {
      rec.failure_reason = "verification: " + report.describe();
    }
  } else {
    rec.failure_reason = std::string(to_string(result.status));
  }
  if (raw) *raw = std::move(result);
  return rec;
}

std::vector<RunRecord> run_batch(std::span<const Scenario> scenarios, std::span<const SearchMode> modes,
                                 const BatchOptions& options) {
  std::vector<RunRecord> records;
  records.reserve(scenarios.size() * modes.size());
  for (const auto& sc : scenarios) {
    for (SearchMode m : modes) records.push_back(run_one(sc, m, options));
  }
  return records;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return out;
}

std::vector<ModeSummary> summarize(std::span<const RunRecord> records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> by_mode;
  for (const auto& r : records) {
    if (!by_mode.count(r.mode)) order.push_back(r.mode);
    by_mode[r.mode].push_back(&r);
  }
  std::vector<ModeSummary> out;
  for (const auto& mode : order) {
    ModeSummary s;
    s.mode = mode;
    std::vector<double> expanded, time, span, cost;
    for (const RunRecord* r : by_mode[mode]) {
      ++s.runs;
      s.fast_track_successes += r->fast_track_successes;
      if (!r->success) continue;
      ++s.successes;
      expanded.push_back(static_cast<double>(r->expanded_nodes));
      time.push_back(r->planning_time);
      span.push_back(r->makespan.value_or(0.0));
      cost.push_back(r->cost.value_or(0.0));
    }
    s.success_rate = s.runs ? 100.0 * static_cast<double>(s.successes) / static_cast<double>(s.runs) : 0.0;
    s.expanded_nodes = mean_std(expanded);
    s.planning_time = mean_std(time);
    s.makespan = mean_std(span);
    s.cost = mean_std(cost);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> commonly_solved(std::span<const RunRecord> records, std::span<const std::string> modes) {
  std::map<std::string, std::set<std::string>> solved_by;
  std::vector<std::string> order;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.scenario) == order.end()) order.push_back(r.scenario);
    if (r.success) solved_by[r.scenario].insert(r.mode);
  }
  std::vector<std::string> out;
  for (const auto& sc : order) {
    const auto& got = solved_by[sc];
    if (std::all_of(modes.begin(), modes.end(), [&](const std::string& m) { return got.count(m) > 0; })) {
      out.push_back(sc);
    }
  }
  return out;
}

std::vector<PairwiseSeries> pairwise_ratios(std::span<const RunRecord> records, const std::string& reference) {
  std::vector<std::string> modes;
  for (const auto& r : records) {
    if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
  }
  std::vector<PairwiseSeries> out;
  if (std::find(modes.begin(), modes.end(), reference) == modes.end()) return out;
  const auto common = commonly_solved(records, modes);

  std::map<std::pair<std::string, std::string>, const RunRecord*> index;
  for (const auto& r : records) index[{r.scenario, r.mode}] = &r;
  auto ratio = [](double other, double ref) {
    return ref != 0.0 ? 100.0 * other / ref : std::numeric_limits<double>::quiet_NaN();
  };

  for (const auto& mode : modes) {
    if (mode == reference) continue;
    PairwiseSeries s;
    s.mode = mode;
    s.reference = reference;
    for (const auto& sc : common) {
      const RunRecord& o = *index[{sc, mode}];
      const RunRecord& f = *index[{sc, reference}];
      s.instances.push_back(sc);
      s.expanded_ratio.push_back(
          ratio(static_cast<double>(o.expanded_nodes), static_cast<double>(f.expanded_nodes)));
      s.time_ratio.push_back(ratio(o.planning_time, f.planning_time));
      s.makespan_ratio.push_back(ratio(o.makespan.value_or(0.0), f.makespan.value_or(0.0)));
      s.cost_ratio.push_back(ratio(o.cost.value_or(0.0), f.cost.value_or(0.0)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

json record_json(const RunRecord& r, bool include_timing) {
  json j{{"scenario", r.scenario},
         {"mode", r.mode},
         {"seed", r.seed},
         {"success", r.success},
         {"expanded_nodes", r.expanded_nodes},
         {"generated_nodes", r.generated_nodes},
         {"makespan", r.makespan ? json(*r.makespan) : json(nullptr)},
         {"cost", r.cost ? json(*r.cost) : json(nullptr)},
         {"fast_track_successes", r.fast_track_successes},
         {"focal_violations", r.focal_violations},
         {"failure_reason", r.failure_reason}};
  if (include_timing) j["planning_time"] = r.planning_time;
  return j;
}

json series_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return out;
}

void write_csv(std::ostream& os, std::span<const RunRecord> records, bool include_timing) {
  os << "scenario,mode,seed,success,expanded_nodes,generated_nodes,";
  if (include_timing) os << "planning_time_s,";
  os << "makespan_s,cost_rad,fast_track_successes,focal_violations,failure_reason\n";
  for (const auto& r : records) {
    os << r.scenario << ',' << r.mode << ',' << r.seed << ',' << (r.success ? 1 : 0) << ',' << r.expanded_nodes << ','
       << r.generated_nodes << ',';
    if (include_timing) os << fmt(r.planning_time) << ',';
    os << (r.makespan ? fmt(*r.makespan) : "") << ',' << (r.cost ? fmt(*r.cost) : "") << ','
       << r.fast_track_successes << ',' << r.focal_violations << ',';
    std::string reason = r.failure_reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    os << reason << '\n';
  }
}

void write_plot_data(std::ostream& os, std::span<const RunRecord> records, const ReportOptions& options) {
  json doc;
  json rates = json::object();
  for (const auto& s : summarize(records)) rates[s.mode] = s.success_rate;
  doc["success_rate"] = rates;
  json pairs = json::array();
  for (const auto& p : pairwise_ratios(records, options.reference_mode)) {
    json entry{{"mode", p.mode},
               {"reference", p.reference},
               {"instances", p.instances},
               {"expanded_nodes_pct", series_json(p.expanded_ratio)},
               {"makespan_pct", series_json(p.makespan_ratio)},
               {"cost_pct", series_json(p.cost_ratio)}};
    if (options.include_timing) entry["planning_time_pct"] = series_json(p.time_ratio);
    pairs.push_back(std::move(entry));
  }
  doc["pairwise"] = pairs;
  os << doc.dump(2) << '\n';
}

}  // namespace

std::string records_to_json(std::span<const RunRecord> records, bool include_timing) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_json(r, include_timing));
  return arr.dump(2);
}

std::vector<RunRecord> records_from_json(const std::string& text) {
  const json arr = json::parse(text);
  std::vector<RunRecord> out;
  for (const auto& j : arr) {
    RunRecord r;
    r.scenario = j.at("scenario").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.success = j.at("success").get<bool>();
    r.expanded_nodes = j.at("expanded_nodes").get<std::size_t>();
    r.generated_nodes = j.at("generated_nodes").get<std::size_t>();
    r.planning_time = j.value("planning_time", 0.0);
    if (!j.at("makespan").is_null()) r.makespan = j["makespan"].get<double>();
    if (!j.at("cost").is_null()) r.cost = j["cost"].get<double>();
    r.fast_track_successes = j.at("fast_track_successes").get<std::size_t>();
    r.focal_violations = j.value("focal_violations", std::size_t{0});
    r.failure_reason = j.value("failure_reason", std::string());
    out.push_back(std::move(r));
  }
  return out;
}

void emit_report(std::ostream& os, std::span<const RunRecord> records, const ReportOptions& options) {
  switch (options.format) {
    case ReportFormat::Csv: write_csv(os, records, options.include_timing); break;
    case ReportFormat::Json: os << records_to_json(records, options.include_timing) << '\n'; break;
    case ReportFormat::PlotData: write_plot_data(os, records, options); break;
  }
}

void emit_report(const std::string& path, std::span<const RunRecord> records, const ReportOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + path);
  emit_report(out, records, options);
  if (!out) throw std::runtime_error("failed writing report " + path);
}

void print_summary(std::ostream& os, std::span<const ModeSummary> summary) {
  auto cell = [](const MeanStd& m) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << m.mean << " (" << m.stddev << ")";
    return s.str();
  };
  os << std::left << std::setw(13) << "method" << std::setw(20) << "expanded nodes" << std::setw(20)
     << "planning time" << std::setw(18) << "makespan" << std::setw(20) << "cost" << std::setw(10) << "success%"
     << "fast-track\n";
  for (const auto& s : summary) {
    os << std::left << std::setw(13) << s.mode << std::setw(20) << cell(s.expanded_nodes) << std::setw(20)
       << cell(s.planning_time) << std::setw(18) << cell(s.makespan) << std::setw(20) << cell(s.cost)
       << std::setw(10) << std::fixed << std::setprecision(1) << s.success_rate << s.fast_track_successes << '\n';
  }
}

}  // namespace apfecbs
