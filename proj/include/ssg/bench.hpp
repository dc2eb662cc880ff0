#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssg/evaluator.hpp"
#include "ssg/game.hpp"

namespace ssg {

/// A solver returned values that fail the stability re-check, or tripped its
/// iteration cap. Maps to exit code 2 in the CLI.
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchPlan {
  std::vector<int> sizes{32, 64, 128, 256, 512, 1024, 2048, 4096};
  std::vector<int> ratios{1, 2, 3, 4, 5, 6, 7, 8};
  int instances_per_cell = 100;
  int runs_per_instance = 100;
  std::vector<std::string> algorithms{"hk", "perm"};
  std::uint64_t master_seed = 0;
  Mode mode = Mode::Exact;
  int threads = 0;           // 0: hardware concurrency
  std::string instance_dir;  // empty: generate in memory
};

/// Missing keys keep their defaults. Throws std::invalid_argument on bad
/// values or unknown algorithms.
BenchPlan parse_plan(const std::string& json_text);
std::string plan_to_json(const BenchPlan& plan);
void validate(const BenchPlan& plan);

struct BenchInstance {
  std::string id;
  int size = 0;
  int ratio = 0;
  int index = 0;
  std::uint64_t seed = 0;  // generation seed
  Game game;
  std::string metadata;    // sidecar JSON
};

/// "s{size}_r{ratio}_i{index:03}".
std::string instance_id(int size, int ratio, int index);
/// Inverse of instance_id; false if `id` does not follow the pattern.
bool parse_instance_id(const std::string& id, int& size, int& ratio, int& index);

std::uint64_t instance_seed(std::uint64_t master, int size, int ratio, int index);
std::uint64_t run_seed(std::uint64_t master, const std::string& instance, int run);

/// Fully reduced instances for every (size, ratio, index) cell of the plan.
std::vector<BenchInstance> generate_instances(const BenchPlan& plan);

/// Writes `<id>.json` and `<id>.meta.json` for each instance.
void write_instances(const std::string& dir, const std::vector<BenchInstance>& instances);

/// Reads the plan's cells from `plan.instance_dir`; throws std::runtime_error
/// naming the first missing file.
std::vector<BenchInstance> load_instances(const BenchPlan& plan);

struct BenchRecord {
  std::string instance_id;
  std::string algorithm;
  std::uint64_t seed = 0;
  int iterations = 0;
  double wall_time_ms = 0.0;
  bool stable_check = false;
};

/// One record per (instance, algorithm, run). Jobs run on a worker pool; the
/// result is sorted by (instance id, algorithm, seed). Throws ContractError
/// naming the instance and seed on a failed stability check or solver cap.
std::vector<BenchRecord> run_benchmark(const BenchPlan& plan, const std::vector<BenchInstance>& instances);

/// Loads or generates the instances, then runs them.
std::vector<BenchRecord> run_benchmark(const BenchPlan& plan);

std::string records_to_csv(const std::vector<BenchRecord>& records, bool with_time = true);
std::vector<BenchRecord> records_from_csv(const std::string& text);

struct SummaryRow {
  int size = 0;
  int ratio = 0;
  std::string algorithm;
  int count = 0;
  double mean_iterations = 0, sd_iterations = 0;
  double mean_ms = 0, sd_ms = 0;
};

/// Per-(size, ratio, algorithm) means and sample standard deviations (0 for a
/// single record). Throws std::invalid_argument on empty input.
std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records);

std::string summary_to_csv(const std::vector<SummaryRow>& rows);

/// Plot data: one row per (size, ratio), one mean-iterations column per
/// algorithm.
std::string plot_data_csv(const std::vector<SummaryRow>& rows);

/// Ratio rows by size columns of mean iterations for one algorithm.
std::string iteration_table_csv(const std::vector<SummaryRow>& rows, const std::string& algorithm);

}  // namespace ssg
