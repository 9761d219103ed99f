#pragma once

#include "apfecbs/highlevel.hpp"
#include "apfecbs/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace apfecbs {

struct GenerateOptions {
  std::size_t max_attempts = 20000;  // rejection-sampling budget per configuration
  double min_separation = 0.05;      // clearance between robots at starts and at goals [m]
  double min_motion = 0.3;           // L1 distance between a robot's start and goal [rad]
};

/// Rejection-samples starts and goals uniformly within joint limits. Every
/// sample is statically free, puts its tip inside the workspace box (when one
/// is declared) and keeps `min_separation` to the robots sampled before it.
/// Deterministic per seed. Throws std::runtime_error naming the robot when
/// the budget runs out.
std::vector<Scenario> generate_instances(const Scenario& base, std::size_t count, std::uint64_t seed,
                                         const GenerateOptions& options = {});

struct RunRecord {
  std::string scenario;
  std::string mode;
  std::uint64_t seed = 0;
  bool success = false;
  std::size_t expanded_nodes = 0;
  std::size_t generated_nodes = 0;
  double planning_time = 0.0;
  std::optional<double> makespan;
  std::optional<double> cost;
  std::size_t fast_track_successes = 0;
  std::size_t focal_violations = 0;
  std::string failure_reason;
};

/// Independent validity check of a returned solution.
struct VerificationReport {
  bool endpoints_ok = true;
  bool static_ok = true;
  bool conflict_free = true;
  bool speed_ok = true;
  double min_distance = 0.0;  // over the dense sweep
  double max_speed = 0.0;

  bool ok() const { return endpoints_ok && static_ok && conflict_free && speed_ok; }
  std::string describe() const;
};

VerificationReport verify_solution(const Scenario& scenario, const SyncedTrajectorySet& solution,
                                   std::size_t substeps = 10);

struct BatchOptions {
  std::optional<double> time_limit;
  std::optional<std::size_t> node_limit;
  std::size_t verify_substeps = 10;
};

/// One record per (scenario, mode), scenario-major. Failed runs are recorded,
/// never thrown. A run only counts as a success after verify_solution passes.
std::vector<RunRecord> run_batch(std::span<const Scenario> scenarios, std::span<const SearchMode> modes,
                                 const BatchOptions& options = {});

RunRecord run_one(const Scenario& scenario, SearchMode mode, const BatchOptions& options = {},
                  std::optional<SearchResult>* raw = nullptr);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for fewer than 2 values
  std::size_t n = 0;
};

MeanStd mean_std(std::span<const double> values);

struct ModeSummary {
  std::string mode;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;  // percent
  MeanStd expanded_nodes;
  MeanStd planning_time;
  MeanStd makespan;
  MeanStd cost;
  std::size_t fast_track_successes = 0;
};

/// Per-mode summary over successful runs, modes in first-seen order.
std::vector<ModeSummary> summarize(std::span<const RunRecord> records);

/// Per-metric ratios (other / reference, in percent) over instances every
/// listed mode solved.
struct PairwiseSeries {
  std::string mode;
  std::string reference;
  std::vector<std::string> instances;
  std::vector<double> expanded_ratio;
  std::vector<double> time_ratio;
  std::vector<double> makespan_ratio;
  std::vector<double> cost_ratio;
};

std::vector<std::string> commonly_solved(std::span<const RunRecord> records, std::span<const std::string> modes);
std::vector<PairwiseSeries> pairwise_ratios(std::span<const RunRecord> records, const std::string& reference);

enum class ReportFormat { Csv, Json, PlotData };

struct ReportOptions {
  ReportFormat format = ReportFormat::Csv;
  bool include_timing = false;  // wall-clock columns make the report run-dependent
  std::string reference_mode = "apf-ecbs";
};

void emit_report(std::ostream& os, std::span<const RunRecord> records, const ReportOptions& options = {});
void emit_report(const std::string& path, std::span<const RunRecord> records, const ReportOptions& options = {});

std::string records_to_json(std::span<const RunRecord> records, bool include_timing = true);
std::vector<RunRecord> records_from_json(const std::string& text);

/// Table-style summary: one row per mode with mean (stddev).
void print_summary(std::ostream& os, std::span<const ModeSummary> summary);

}  // namespace apfecbs
