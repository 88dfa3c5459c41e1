#pragma once

#include "qdepth/analysis.hpp"
#include "qdepth/vqe.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdepth {

/// Depth list entry: a fixed depth, or n/2 + offset resolved per size.
struct DepthRange {
  int first = 1;
  int last = 1;
  std::optional<int> half_n_offset;  // last = n/2 + offset when set

  int last_for(int n) const { return half_n_offset ? n / 2 + *half_n_offset : last; }
};

struct ExperimentConfig {
  Model model = Model::Ising;
  std::vector<double> couplings;
  std::vector<int> sizes;
  std::vector<DepthRange> depths;
  int seeds = 1;  // runs per (coupling, n, l) cell
  std::uint64_t seed = 0;
  bool wrap_cz = true;
  bool periodic = true;
  OptimizerConfig optimizer;
  int aavqe_steps = 0;  // 0 = plain minimize
  std::filesystem::path out = "results";
  int workers = 1;
};

/// Every problem found in a config, one message per field.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/**
 * Flat `key = value` lines, `#` comments. Lists are comma separated; depth
 * entries may be ranges `a..b` or `a..n/2+k`.
 */
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

/// Names of the built-in figure recipes.
std::vector<std::string> recipe_names();
/// Config text of a recipe; throws std::invalid_argument for unknown names.
std::string recipe_config(std::string_view name);

struct Cell {
  double coupling = 0.0;
  int n = 0;
  int l = 0;
  int replica = 0;
  std::uint64_t seed = 0;
  std::string run_id;
};

/// Canonical grid order: coupling, n, l, replica as listed in the config.
std::vector<Cell> expand_grid(const ExperimentConfig& cfg);

std::uint64_t cell_seed(std::uint64_t base, Model model, double coupling, int n, int l, int replica);

/// Worker count after the QDEPTH_WORKERS environment override.
int effective_workers(int configured);

struct RunOptions {
  bool resume = true;
  std::size_t max_new_runs = 0;  // stop after this many fresh runs, 0 = no limit
  int workers = 0;               // overrides config and environment when > 0
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::size_t cells = 0;
  std::size_t executed = 0;
  std::size_t resumed = 0;
  bool complete = false;
};

/**
 * Runs the grid. Each finished run leaves a checkpoint under out/checkpoints;
 * with resume those runs are loaded instead of recomputed. results.csv and
 * results.jsonl are appended as runs finish and rewritten in grid order at the end.
 */
RunSummary run_grid(const ExperimentConfig& cfg, const RunOptions& options = {});

struct AnalysisOptions {
  std::string kind = "all";  // all | exponential | crossover | entropy
  double crossover_threshold = 1.0;
};

/// Writes report.json and two-column .dat files to `out`; returns the report.
nlohmann::json analyze_records(const std::vector<RunRecord>& records, const std::filesystem::path& out,
                               const AnalysisOptions& options = {});

}  // namespace qdepth
