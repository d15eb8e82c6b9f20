#include "sacobra/experiment.hpp"
#include "sacobra/g_suite.hpp"
#include "sacobra/pitfalls.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace sacobra;

namespace {

fs::path under_root(const fs::path& p) { return p.is_absolute() ? p : output_root() / p; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

struct RunArgs {
  std::string config;
  std::string seeds;
  Index budget = 0;
  std::string ablate;
  std::vector<std::string> settings;
  std::string output;
  Index jobs = 0;
  bool resume = false;
};

int cmd_run(const RunArgs& a) {
  ExperimentConfig config = a.config.empty() ? ExperimentConfig{} : load_config(a.config);
  for (const auto& kv : a.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!a.seeds.empty()) config.seeds = parse_seeds(a.seeds);
  if (a.budget > 0) {
    config.budget = a.budget;
    config.problem_budgets.clear();
  }
  if (!a.ablate.empty()) apply_setting(config, "ablate", a.ablate);
  if (!a.output.empty()) config.output_dir = a.output;
  if (a.jobs > 0) config.parallelism = a.jobs;
  if (a.resume) config.resume = true;
  config.output_dir = under_root(config.output_dir);

  const ExperimentResult result = run_experiment(config, &std::cerr);
  std::cout << summary_csv(result.summary);
  if (result.failed_cells > 0) {
    std::cerr << result.failed_cells << " cell(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_summarize(const std::string& input, double tau, const std::string& out) {
  const auto records = load_records(under_root(input));
  const std::string csv = summary_csv(summarize_all(records, tau));
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text(under_root(out), csv);
  }
  return 0;
}

int cmd_profile(const std::string& input, const std::string& target, double tau, const std::string& out) {
  const fs::path dir = under_root(input);
  const auto records = load_records(dir);
  TargetSource source = TargetSource::KnownOptimum;
  if (target == "best") {
    source = TargetSource::BestObserved;
  } else if (target != "optimum") {
    throw ConfigError("--target must be 'optimum' or 'best'");
  }
  const SolveMatrix m = make_solve_matrix(records, source, tau);
  const fs::path dest = out.empty() ? dir : under_root(out);
  write_text(dest / "data_profiles.csv", profiles_csv(m, default_alpha_grid(), true));
  write_text(dest / "performance_profiles.csv", profiles_csv(m, default_alpha_grid(), false));

  std::cout << "solver,data_profile_at_100,performance_profile_at_2\n";
  for (Index s = 0; s < static_cast<Index>(m.solvers.size()); ++s) {
    std::cout << m.solvers[static_cast<std::size_t>(s)] << ',' << data_profile(m, s, 100.0) << ','
              << performance_profile(m, s, 2.0) << '\n';
  }
  return 0;
}

int cmd_characterize(Index samples, std::uint64_t seed, const std::string& problems, const std::string& manifest) {
  ExperimentConfig names;
  apply_setting(names, "problems", problems);
  std::vector<Problem> suite;
  for (const auto& n : names.problems) suite.push_back(make_g_problem(n));
  if (!manifest.empty()) write_text(under_root(manifest), suite_manifest(suite).dump(2) + "\n");
  std::cout << characteristics_csv_header() << '\n';
  for (const Problem& p : suite) {
    std::cout << characteristics_csv_row(p, characterize(p, samples, seed)) << '\n';
    std::cout.flush();
  }
  return 0;
}

int cmd_demo(double scale, const std::string& out) {
  const ScalingDemo s = demo_scaling_pitfall(scale);
  const PlogDemo p = demo_plog_benefit();
  std::cout << "scaling S=" << scale << ": rmse_raw=" << s.rmse_raw << " rmse_rescaled=" << s.rmse_rescaled
            << " ratio=" << s.rmse_raw / s.rmse_rescaled << '\n';
  std::cout << "plog: rmse_direct=" << p.rmse_direct << " rmse_plog=" << p.rmse_plog << '\n';
  if (!out.empty()) {
    const fs::path dir = under_root(out);
    write_text(dir / "scaling_truth.csv", curve_csv(s.grid, s.truth, "f"));
    write_text(dir / "scaling_raw.csv", curve_csv(s.grid, s.raw_prediction, "raw"));
    write_text(dir / "scaling_rescaled.csv", curve_csv(s.grid, s.rescaled_prediction, "rescaled"));
    write_text(dir / "plog_truth.csv", curve_csv(p.grid, p.truth, "f"));
    write_text(dir / "plog_direct.csv", curve_csv(p.grid, p.direct_prediction, "direct"));
    write_text(dir / "plog_plog.csv", curve_csv(p.grid, p.plog_prediction, "plog"));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-adjusting surrogate-assisted constrained optimization"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a (problem x seed x variant) grid");
  run_cmd->add_option("--config", run.config, "key=value config file");
  run_cmd->add_option("--seeds", run.seeds, "Seeds, e.g. 1..10 or 1,2,5");
  run_cmd->add_option("--budget", run.budget, "Budget for every problem");
  run_cmd->add_option("--ablate", run.ablate, "Elements to switch off, e.g. rescale,aFF");
  run_cmd->add_option("--set", run.settings, "Extra key=value override (repeatable)");
  run_cmd->add_option("--output", run.output, "Output directory");
  run_cmd->add_option("--jobs", run.jobs, "Worker threads");
  run_cmd->add_flag("--resume", run.resume, "Reuse completed records on disk");

  std::string input = "results";
  std::string out;
  double tau = kTau;
  auto* sum_cmd = app.add_subcommand("summarize", "Summary table from stored records");
  sum_cmd->add_option("--input", input, "Directory with run records");
  sum_cmd->add_option("--tau", tau, "Solve tolerance");
  sum_cmd->add_option("--output", out, "Write CSV here instead of stdout");

  std::string target = "optimum";
  auto* prof_cmd = app.add_subcommand("profile", "Data and performance profiles from stored records");
  prof_cmd->add_option("--input", input, "Directory with run records");
  prof_cmd->add_option("--target", target, "optimum or best");
  prof_cmd->add_option("--tau", tau, "Solve tolerance");
  prof_cmd->add_option("--output", out, "Directory for the profile CSVs (default: input)");

  Index samples = 1000000;
  std::uint64_t seed = 1;
  std::string problems = "all";
  std::string manifest;
  auto* char_cmd = app.add_subcommand("characterize", "Monte-Carlo feasibility rate and ranges");
  char_cmd->add_option("--samples", samples, "Number of uniform samples");
  char_cmd->add_option("--seed", seed, "Sampling seed");
  char_cmd->add_option("--problems", problems, "Comma list or 'all'");
  char_cmd->add_option("--manifest", manifest, "Also write the suite manifest JSON here");

  double scale = 1e4;
  auto* demo_cmd = app.add_subcommand("demo-pitfalls", "Scaling and plog surrogate demos");
  demo_cmd->add_option("--scale", scale, "Input scale S for the scaling demo");
  demo_cmd->add_option("--output", out, "Directory for curve CSVs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sum_cmd) return cmd_summarize(input, tau, out);
    if (*prof_cmd) return cmd_profile(input, target, tau, out);
    if (*char_cmd) return cmd_characterize(samples, seed, problems, manifest);
    if (*demo_cmd) return cmd_demo(scale, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
