#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgmp/planners.hpp"

namespace cgmp {

inline constexpr const char* kJPlusRrt = "jplus-rrt";
inline constexpr const char* kIkRrt = "ik-rrt";

struct RunRecord {
  std::string scenario;
  std::string planner;
  std::uint64_t seed = 0;
  std::string target;  // grasp index for IK-RRT, "any" for J+RRT
  bool success = false;
  double time_s = 0.0;
  std::uint64_t iterations = 0;
  double path_len = 0.0;  // sum of L2 norms of consecutive configuration differences
  double final_dist = 0.0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Per-scenario annotation facts that are not carried by the records.
struct ScenarioMeta {
  std::string scenario;
  std::size_t grasp_count = 0;
  std::optional<std::size_t> ik_count;  // unset when IK-RRT was not requested
  double ik_time_s = 0.0;
};

struct BenchError {
  std::string scenario;
  std::string planner;
  std::string message;
};

struct BenchOptions {
  std::vector<std::string> planners{kJPlusRrt, kIkRrt};
  std::size_t runs = 100;
  PlannerParams params;  // seed is replaced per trial
  std::uint64_t base_seed = 0;
  unsigned jobs = 1;
  std::function<void(const RunRecord&)> on_record;  // called from the collecting thread
};

struct BenchResult {
  std::vector<RunRecord> records;  // sorted by (scenario, planner, target, trial)
  std::vector<BenchError> errors;
  std::vector<ScenarioMeta> meta;
};

// splitmix-derived seed of one trial.
std::uint64_t trial_seed(std::uint64_t base_seed, const std::string& scenario,
                         const std::string& planner, const std::string& target,
                         std::size_t trial);

double path_length(const std::vector<Configuration>& path);

BenchResult run_benchmark(const std::vector<std::filesystem::path>& scenarios,
                          const BenchOptions& options);

inline constexpr const char* kRecordsHeader =
    "scenario,planner,seed,target,success,time_s,iterations,path_len,final_dist";

void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out);
std::vector<RunRecord> read_records_csv(std::istream& in, const std::string& source_name);
std::vector<RunRecord> load_records_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::string scenario;
  std::string planner;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_time = 0.0;  // over all runs, failures at their recorded time
  double std_time = 0.0;   // population standard deviation
  double mean_iterations = 0.0;
  std::optional<std::size_t> grasp_count;
  std::optional<std::size_t> ik_count;
  std::optional<std::size_t> reachable_targets;  // IK-RRT only
  double ik_time_s = 0.0;
  std::string note;  // "no IK solutions" for an IK-RRT row without targets

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

// One row per (scenario, planner), ordered by scenario then planner. Records
// are sorted internally, so the result does not depend on their order.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const std::vector<ScenarioMeta>& meta = {});

enum class CurveAxis { kTime, kIterations };

// Fraction of runs that succeeded with time (or iterations) <= x, per x.
std::vector<std::pair<double, double>> cumulative_success_curve(
    const std::vector<RunRecord>& records, CurveAxis axis, const std::vector<double>& grid);

std::string format_table(const std::vector<SummaryRow>& rows);
void save_summary_json(const std::vector<SummaryRow>& rows, const std::vector<BenchError>& errors,
                       const std::filesystem::path& path);

// records.csv, summary.json, summary.txt and curves/*.csv under `dir`.
void write_bench_outputs(const BenchResult& result, const BenchOptions& options,
                         const std::filesystem::path& dir);

}  // namespace cgmp
