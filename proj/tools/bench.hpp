#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dpim::cli {

// Flat key = value benchmark description. Paths resolve relative to the
// config file's directory.
struct BenchConfig {
  std::filesystem::path dataset;
  std::filesystem::path constraints;
  std::optional<std::filesystem::path> schema;
  std::vector<std::string> measures;    // subset of {mi, p, r}
  std::vector<std::string> strategies;  // projection strategies
  std::vector<double> eps_values;
  std::vector<std::uint64_t> seeds;
  double split_selection = 0.4;  // eps1 fraction
  double split_release = 0.6;    // eps2 fraction
  std::string theta_set = "default";
  std::string fd_bound = "auto";
  std::optional<std::string> noise_mode;  // rnoise | conoise
  double alpha = 0.01;
  int iterations = 200;
  std::uint64_t noise_seed = 0;
  unsigned threads = 1;  // conflict-graph build workers
};

BenchConfig load_bench_config(const std::filesystem::path& path);

// Runs the sweep (one cell per strategy x eps x measure x seed; the repair
// measure has no strategy dimension) and returns the CSV text: one row per
// run plus one aggregate row per cell group. Failures are recorded in the
// status column without aborting the sweep.
std::string run_bench(const BenchConfig& config, unsigned workers, bool timings);

}  // namespace dpim::cli
