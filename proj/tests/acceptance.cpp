// Acceptance checks. Prints one PASS/FAIL line per criterion; the exit code
// is nonzero when any criterion fails. Grid runs are cached under --cache.

#include "sacobra/experiment.hpp"
#include "sacobra/g_suite.hpp"
#include "sacobra/pitfalls.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

using namespace sacobra;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, Index> kBudgets{
    {"G01", 100}, {"G02", 400}, {"G03", 300}, {"G04", 200}, {"G05", 200},    {"G06", 100},
    {"G07", 200}, {"G08", 200}, {"G09", 300}, {"G10", 300}, {"G11", 100}, {"G02d20", 400},
};

// Median targets with their allowed distance.
const std::vector<std::tuple<std::string, double, double>> kTargets{
    {"G01", -15.0, 0.05},  {"G03", -1.0, 0.05},       {"G04", -30665.539, 0.05}, {"G05", 5126.498, 0.05},
    {"G06", -6961.81, 0.05}, {"G07", 24.306, 0.05},   {"G08", -0.0958, 0.05},    {"G09", 680.630, 0.5},
    {"G10", 7049.248, 0.5},  {"G11", 0.75, 0.05},
};

// Problem x seed data profile margins of full SACOBRA over each variant at
// alpha = 100, measured on the 10-seed grid; checked with 0.05 slack.
const std::map<std::string, double> kPinnedMargins{
    {"sacobra-no-rescale", 0.1909}, {"sacobra-no-acf", 0.0818}, {"sacobra-no-adrc", 0.0545},
    {"sacobra-no-rs", 0.0636},      {"sacobra-no-aff", 0.1},     {"cobra-r", 0.3545},
};

const std::string kFull = "sacobra";
const std::string kNoPlog = "sacobra-no-aff";
const std::string kAlwaysPlog = "sacobra+plog";

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int id, const Outcome& o, int& failures) {
  std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  if (!o.pass) ++failures;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::vector<const RunRecord*> select(const std::vector<RunRecord>& records, const std::string& problem,
                                     const std::string& variant) {
  std::vector<const RunRecord*> out;
  for (const RunRecord& r : records)
    if (r.problem == problem && r.variant == variant) out.push_back(&r);
  return out;
}

std::vector<RunRecord> only_variants(const std::vector<RunRecord>& records, const std::vector<std::string>& variants,
                                     bool exclude_g02d20) {
  std::vector<RunRecord> out;
  for (const RunRecord& r : records) {
    if (exclude_g02d20 && r.problem == "G02d20") continue;
    if (std::find(variants.begin(), variants.end(), r.variant) != variants.end()) out.push_back(r);
  }
  return out;
}

Outcome criterion_headline(const std::vector<RunRecord>& records) {
  Outcome o{true, ""};
  std::ostringstream os;
  for (const auto& [name, target, tol] : kTargets) {
    std::vector<double> best;
    for (const RunRecord* r : select(records, name, kFull)) best.push_back(r->has_best ? r->best_f : kInf);
    if (best.empty()) {
      o.pass = false;
      os << name << " missing; ";
      continue;
    }
    const double m = median(best);
    const bool ok = std::abs(m - target) <= tol && kBudgets.at(name) <= 500;
    if (!ok) o.pass = false;
    os << name << " med " << fmt(m, 9) << (ok ? "" : " (off)") << "; ";
  }
  o.detail = os.str();
  return o;
}

Outcome criterion_feasibility(const std::vector<RunRecord>& records) {
  Index infeasible = 0;
  Index runs = 0;
  std::string which;
  for (const RunRecord& r : records) {
    if (r.variant != kFull) continue;
    ++runs;
    if (!r.has_best || r.best_violation > 0.0) {
      ++infeasible;
      which += " " + r.problem + "#" + std::to_string(r.seed);
    }
  }
  return {infeasible == 0 && runs > 0,
          std::to_string(infeasible) + " infeasible final solutions in " + std::to_string(runs) + " runs" + which};
}

Outcome criterion_ablation(const std::vector<RunRecord>& records) {
  std::vector<std::string> variants{kFull};
  for (const auto& [v, margin] : kPinnedMargins) variants.push_back(v);
  const SolveMatrix m = make_solve_matrix(only_variants(records, variants, true), TargetSource::KnownOptimum);
  const double full = data_profile(m, m.solver_index(kFull), 100.0);
  Outcome o{true, "full " + fmt(full) + "; "};
  for (const auto& [v, pinned] : kPinnedMargins) {
    const double frac = data_profile(m, m.solver_index(v), 100.0);
    const double margin = full - frac;
    bool ok = margin > 0.0 && margin >= pinned - 0.05;
    if (v == "cobra-r") ok = ok && margin >= 0.15;
    if (!ok) o.pass = false;
    o.detail += v + " " + fmt(frac) + " (margin " + fmt(margin) + (ok ? "" : ", off") + "); ";
  }
  return o;
}

// Number of discordant pairs between two orderings of the same items.
Index kendall_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < b.size(); ++i) pos[b[i]] = i;
  Index d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (pos[a[i]] > pos[a[j]]) ++d;
  return d;
}

Outcome criterion_q_vs_r(const std::vector<RunRecord>& records) {
  Outcome o{true, ""};
  std::vector<std::pair<double, std::string>> by_q;
  std::vector<std::pair<double, std::string>> by_r;
  std::ostringstream os;
  for (const std::string& name : g_suite_names(false)) {
    std::vector<double> q_end;
    for (const RunRecord* r : select(records, name, kFull))
      if (!r->q_trace.empty()) q_end.push_back(r->q_trace.back());
    std::vector<RunRecord> plain;
    std::vector<RunRecord> plog;
    double f_ref = kInf;
    for (const RunRecord& r : records) {
      if (r.problem != name) continue;
      if (r.variant == kNoPlog) plain.push_back(r);
      if (r.variant == kAlwaysPlog) plog.push_back(r);
      if (r.has_best) f_ref = std::min(f_ref, r.best_f);
    }
    if (q_end.empty() || plain.empty() || plog.empty()) {
      o.pass = false;
      os << name << " missing; ";
      continue;
    }
    const double q = median(q_end);
    const double optimum = plain.front().optimum ? *plain.front().optimum : f_ref;
    const double r = plog_impact_ratio(plain, plog, optimum);
    by_q.emplace_back(q, name);
    by_r.emplace_back(r, name);
    os << name << " Q " << fmt(q, 3) << " R " << fmt(r, 3) << "; ";
    if ((name == "G03" || name == "G09") && !(q > 1.0)) o.pass = false;
    if ((name == "G01" || name == "G07" || name == "G10") && !(q < -1.0)) o.pass = false;
  }
  std::stable_sort(by_q.begin(), by_q.end());
  std::stable_sort(by_r.begin(), by_r.end());
  std::vector<std::string> rank_q;
  std::vector<std::string> rank_r;
  for (const auto& p : by_q) rank_q.push_back(p.second);
  for (const auto& p : by_r) rank_r.push_back(p.second);
  const Index dist = kendall_distance(rank_q, rank_r);
  if (dist > 1) o.pass = false;
  os << "rank distance " << dist;
  o.detail = os.str();
  return o;
}

Outcome criterion_pitfalls() {
  const ScalingDemo s = demo_scaling_pitfall(1e4);
  const PlogDemo p = demo_plog_benefit();
  const double ratio = s.rmse_raw / s.rmse_rescaled;
  return {ratio >= 10.0 && p.rmse_plog < p.rmse_direct,
          "scaling rmse ratio " + fmt(ratio) + "; plog rmse " + fmt(p.rmse_plog) + " vs direct " + fmt(p.rmse_direct)};
}

Outcome criterion_characterization(Index samples, std::uint64_t seed) {
  Outcome o{true, ""};
  std::ostringstream os;
  auto c = [&](const std::string& name) { return characterize(make_g_problem(name), samples, seed); };
  const std::vector<std::pair<std::string, double>> rho{{"G02", 99.997}, {"G04", 26.9217}, {"G11", 66.7240}};
  for (const auto& [name, expect] : rho) {
    const double got = 100.0 * c(name).feasibility_rate;
    const bool ok = std::abs(got - expect) <= 0.5;
    if (!ok) o.pass = false;
    os << name << " rho " << fmt(got, 6) << "%" << (ok ? "" : " (off)") << "; ";
  }
  const std::vector<std::pair<std::string, double>> fr{{"G01", 298.14}, {"G04", 9832.45}};
  for (const auto& [name, expect] : fr) {
    const double got = c(name).fitness_range;
    const bool ok = std::abs(got - expect) <= 0.05 * expect;
    if (!ok) o.pass = false;
    os << name << " FR " << fmt(got, 6) << (ok ? "" : " (off)") << "; ";
  }
  for (const std::string name : {"G05", "G10"}) {
    const double got = c(name).constraint_range_ratio;
    const bool ok = got >= 1000.0;
    if (!ok) o.pass = false;
    os << name << " GR " << fmt(got, 6) << (ok ? "" : " (off)") << "; ";
  }
  o.detail = os.str();
  return o;
}

Outcome criterion_properties(const fs::path& test_dir) {
  Outcome o{true, ""};
  for (const std::string name : {"test_rbf", "test_cobra", "test_sacobra", "test_profiles"}) {
    const fs::path exe = test_dir / name;
    const std::string cmd = "\"" + exe.string() + "\" --minimal > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) o.pass = false;
    o.detail += name + (rc == 0 ? " ok; " : " FAILED; ");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  fs::path cache = "acceptance_cache";
  fs::path test_dir = ".";
  std::string seeds = "1..10";
  Index jobs = std::max<Index>(1, static_cast<Index>(std::thread::hardware_concurrency()));
  Index samples = 1000000;
  std::vector<int> only;
  app.add_option("--cache", cache, "Directory for cached grid records");
  app.add_option("--tests", test_dir, "Directory with the unit test binaries");
  app.add_option("--seeds", seeds, "Seeds of the grid");
  app.add_option("--jobs", jobs, "Worker threads for the grid");
  app.add_option("--samples", samples, "Monte-Carlo samples for characterization");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  int failures = 0;

  if (wanted(5)) report(5, criterion_pitfalls(), failures);
  if (wanted(6)) report(6, criterion_characterization(samples, 20150901), failures);
  if (wanted(7)) report(7, criterion_properties(test_dir), failures);

  if (wanted(1) || wanted(2) || wanted(3) || wanted(4)) {
    ExperimentConfig config;
    config.problems = g_suite_names(true);
    config.seeds = parse_seeds(seeds);
    config.problem_budgets = kBudgets;
    config.variants.clear();
    for (const std::string v : {"sacobra", "sacobra-no-rescale", "sacobra-no-acf", "sacobra-no-adrc", "sacobra-no-rs",
                                "sacobra-no-aff", "cobra-r", "sacobra+plog"}) {
      config.variants.push_back(parse_variant(v));
    }
    config.output_dir = cache;
    config.parallelism = jobs;
    config.resume = true;
    const ExperimentResult grid = run_experiment(config, &std::clog);
    if (grid.failed_cells > 0) std::cout << grid.failed_cells << " grid cells failed" << std::endl;

    if (wanted(1)) report(1, criterion_headline(grid.records), failures);
    if (wanted(2)) report(2, criterion_feasibility(grid.records), failures);
    if (wanted(3)) report(3, criterion_ablation(grid.records), failures);
    if (wanted(4)) report(4, criterion_q_vs_r(grid.records), failures);
  }
  return failures == 0 ? 0 : 1;
}
