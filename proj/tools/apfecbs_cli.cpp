// Command line front end: plan a single scenario, generate random instances,
// or run a benchmark batch over a directory of scenarios.

#include "apfecbs/apfecbs.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace apfecbs;

namespace {

struct Overrides {
  std::optional<std::string> mode;
  std::optional<double> w, time_limit, dt, v_max, margin;
  std::optional<std::size_t> node_limit;
  std::optional<double> alpha, k_rep, d0, rho, max_step;
  std::optional<std::size_t> max_iter;
  std::optional<std::size_t> max_samples;
  std::optional<double> goal_bias, eta;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App& app, bool planner_seed) {
    app.add_option("--mode", mode, "cbs | ecbs | apf-ecbs | apf-ecbs-nf");
    app.add_option("--w", w, "Suboptimality factor (>= 1)");
    app.add_option("--time-limit", time_limit, "Search time limit [s]");
    app.add_option("--node-limit", node_limit, "Generated-node limit");
    app.add_option("--dt", dt, "Synchronization grid interval [s]");
    app.add_option("--v-max", v_max, "Joint speed limit [rad/s]");
    app.add_option("--margin", margin, "Sphere inflation for grid conflict checks [m]");
    app.add_option("--alpha", alpha, "Repulsive modification step size");
    app.add_option("--krep", k_rep, "Repulsive gain");
    app.add_option("--d0", d0, "Influence radius [m]");
    app.add_option("--max-iter", max_iter, "Modification iterations");
    app.add_option("--rho", rho, "Constraint radius [rad]");
    app.add_option("--max-step", max_step, "Per-iteration modification cap [rad], 0 = none");
    app.add_option("--max-samples", max_samples, "Low-level sample budget");
    app.add_option("--goal-bias", goal_bias, "Low-level goal bias in [0,1]");
    app.add_option("--eta", eta, "Low-level steering step [rad]");
    if (planner_seed) app.add_option("--seed", seed, "Low-level RNG seed");
  }

  void apply(Scenario& sc) const {
    if (mode) sc.search.mode = parse_mode(*mode);
    if (w) sc.search.w = *w;
    if (time_limit) sc.search.time_limit = *time_limit;
    if (node_limit) sc.search.node_limit = *node_limit;
    if (dt) sc.search.timing.dt = *dt;
    if (v_max) sc.search.timing.v_max = *v_max;
    if (margin) sc.search.margin = *margin;
    if (alpha) sc.apf.alpha = *alpha;
    if (k_rep) sc.apf.k_rep = *k_rep;
    if (d0) sc.apf.d0 = *d0;
    if (max_iter) sc.apf.max_iter = *max_iter;
    if (rho) sc.apf.rho = *rho;
    if (max_step) sc.apf.max_step = *max_step;
    if (max_samples) sc.planner.max_samples = *max_samples;
    if (goal_bias) sc.planner.goal_bias = *goal_bias;
    if (eta) sc.planner.eta = *eta;
    if (seed) sc.planner.seed = *seed;
  }
};

std::vector<SearchMode> parse_modes(const std::string& list) {
  std::vector<SearchMode> modes;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) modes.push_back(parse_mode(item));
  }
  return modes;
}

std::vector<fs::path> scenario_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(dir)) return {dir};
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int run_plan(const std::string& path, const Overrides& ov, const std::string& dump) {
  Scenario sc = load_scenario(path);
  ov.apply(sc);
  sc.validate();
  std::optional<SearchResult> raw;
  const RunRecord rec = run_one(sc, sc.search.mode, {}, &raw);
  const auto& stats = raw ? raw->stats : SearchStats{};
  std::cout << "scenario        " << sc.name << '\n'
            << "mode            " << rec.mode << '\n'
            << "status          " << (rec.success ? "solved" : rec.failure_reason) << '\n'
            << "expanded nodes  " << rec.expanded_nodes << '\n'
            << "generated nodes " << rec.generated_nodes << '\n'
            << "fast-track      " << stats.fast_track_successes << '/' << stats.fast_track_attempts << '\n'
            << "planning time   " << rec.planning_time << " s\n";
  if (rec.success) {
    std::cout << "makespan        " << *rec.makespan << " s\n"
              << "cost            " << *rec.cost << " rad\n";
  }
  if (!dump.empty() && raw && raw->solution) {
    std::ofstream out(dump);
    if (!out) throw std::runtime_error("cannot write " + dump);
    write_trajectories(out, raw->solution->trajectories.trajectories);
    std::cout << "trajectories -> " << dump << '\n';
  }
  return 0;
}

int run_gen(const std::string& base_path, std::size_t count, std::uint64_t seed, const std::string& out_dir) {
  const Scenario base = load_scenario(base_path);
  const auto instances = generate_instances(base, count, seed);
  if (out_dir.empty()) {
    for (const auto& sc : instances) std::cout << scenario_to_json(sc) << '\n';
    return 0;
  }
  fs::create_directories(out_dir);
  for (const auto& sc : instances) {
    const fs::path p = fs::path(out_dir) / (sc.name + ".json");
    save_scenario(sc, p);
    std::cout << p.string() << '\n';
  }
  return 0;
}

struct BenchArgs {
  std::string dir;
  std::string modes = "cbs,ecbs,apf-ecbs-nf,apf-ecbs";
  std::size_t instances = 0;
  std::uint64_t seed = 1;
  std::string out = "report.csv";
  std::string json_out;
  std::string plot_data;
  bool timing = false;
};

int run_bench(const BenchArgs& args, const Overrides& ov) {
  const auto modes = parse_modes(args.modes);
  std::vector<Scenario> batch;
  for (const auto& file : scenario_files(args.dir)) {
    Scenario base = load_scenario(file);
    ov.apply(base);
    if (args.instances == 0) {
      base.validate();
      batch.push_back(std::move(base));
    } else {
      for (auto& sc : generate_instances(base, args.instances, args.seed)) batch.push_back(std::move(sc));
    }
  }
  std::cerr << batch.size() << " scenario(s) x " << modes.size() << " mode(s)\n";
  const auto records = run_batch(batch, modes);

  ReportOptions opts;
  opts.include_timing = args.timing;
  emit_report(args.out, records, opts);
  if (!args.json_out.empty()) {
    opts.format = ReportFormat::Json;
    emit_report(args.json_out, records, opts);
  }
  if (!args.plot_data.empty()) {
    opts.format = ReportFormat::PlotData;
    emit_report(args.plot_data, records, opts);
  }
  const auto summary = summarize(records);
  print_summary(std::cout, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-manipulator conflict-based planning with repulsive trajectory modification"};
  app.require_subcommand(1);

  Overrides ov;

  std::string plan_path, dump;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one scenario file");
  plan_cmd->add_option("scenario", plan_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--dump-trajectories", dump, "Write the solution trajectories to this file");
  ov.attach(*plan_cmd, true);

  std::string gen_base, gen_out;
  std::size_t gen_count = 1;
  std::uint64_t gen_seed = 1;
  auto* gen_cmd = app.add_subcommand("gen", "Generate random start/goal instances from a base scenario");
  gen_cmd->add_option("base", gen_base, "Base scenario JSON")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--count", gen_count, "Number of instances")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen_seed, "Sampling seed");
  gen_cmd->add_option("--out-dir", gen_out, "Write one file per instance here (default: stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run every mode over a directory of scenarios");
  bench_cmd->add_option("dir", bench.dir, "Directory of scenario JSON files (or one file)")
      ->required()
      ->check(CLI::ExistingPath);
  bench_cmd->add_option("--modes", bench.modes, "Comma-separated modes");
  bench_cmd->add_option("--instances", bench.instances, "Random instances per scenario (0 = use files as-is)");
  bench_cmd->add_option("--seed", bench.seed, "Instance sampling seed");
  bench_cmd->add_option("--out", bench.out, "CSV report path");
  bench_cmd->add_option("--json", bench.json_out, "Also write records as JSON");
  bench_cmd->add_option("--plot-data", bench.plot_data, "Write success-rate and pairwise-ratio series");
  bench_cmd->add_flag("--timing", bench.timing, "Include wall-clock planning time in reports");
  ov.attach(*bench_cmd, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan_cmd) return run_plan(plan_path, ov, dump);
    if (*gen_cmd) return run_gen(gen_base, gen_count, gen_seed, gen_out);
    if (*bench_cmd) return run_bench(bench, ov);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
