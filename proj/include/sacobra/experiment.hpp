#pragma once

#include "sacobra/profiles.hpp"
#include "sacobra/sacobra.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sacobra {

struct ExperimentConfig {
  std::vector<std::string> problems;
  std::vector<std::uint64_t> seeds;
  Index budget = 500;
  std::map<std::string, Index> problem_budgets;  // overrides per problem
  std::vector<SacobraOptions> variants{SacobraOptions{}};
  std::filesystem::path output_dir = "results";
  Index parallelism = 1;
  TargetSource target = TargetSource::KnownOptimum;
  double tau = kTau;
  bool resume = false;  // reuse matching records already on disk

  Index budget_for(const std::string& problem) const;
  // Throws ConfigError.
  void validate() const;
};

// Key=value lines; '#' starts a comment. Keys:
//   problems   comma list of suite names, or "all" (G01..G11 plus G02d20)
//   seeds      comma list and/or ranges "a..b"
//   budget     default budget; budget.<problem> per problem
//   variants   comma list of signatures (sacobra, cobra-r, sacobra-no-rs, ...)
//   ablate     comma list of elements switched off in a single variant
//   output     output directory
//   parallelism, target (optimum|best), tau, resume (true|false)
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

std::vector<std::uint64_t> parse_seeds(const std::string& text);
SacobraOptions parse_variant(const std::string& signature);

// Seed of one grid cell; identical for all variants so that ablations
// start from the same initial design.
std::uint64_t cell_seed(const std::string& problem, std::uint64_t seed);

struct SummaryRow {
  std::string problem;
  std::string variant;
  Index runs = 0;
  double median_best_f = kInf;
  double median_error = kInf;
  double best_error = kInf;
  double worst_error = kInf;
  double q1_error = kInf;
  double q3_error = kInf;
  double mean_evals_to_solve = kInf;  // over solved runs
  Index solved_runs = 0;
  Index infeasible_runs = 0;
  Index failed_runs = 0;
};

using SummaryTable = std::vector<SummaryRow>;

// Records must share problem and variant.
SummaryRow summarize(const std::vector<RunRecord>& records, double tau = kTau);
// Groups by (problem, variant) in order of first appearance.
SummaryTable summarize_all(const std::vector<RunRecord>& records, double tau = kTau);
std::string summary_csv(const SummaryTable& table);

struct ExperimentResult {
  std::vector<RunRecord> records;  // grid order: problem, variant, seed
  SummaryTable summary;
  Index failed_cells = 0;
};

// Runs the grid and writes
//   <output>/<problem>/<variant>/seed_<s>.csv|.json, summary.csv,
//   data_profiles.csv, performance_profiles.csv
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

// All *.json run records under a directory, sorted by path.
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

nlohmann::json suite_manifest(const std::vector<Problem>& problems);

// Output root from $SACOBRA_OUTPUT_ROOT, or "." when unset.
std::filesystem::path output_root();

}  // namespace sacobra
