#include "sacobra/experiment.hpp"

#include "sacobra/g_suite.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace sacobra {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Index parse_index(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (std::isinf(v[lo]) || std::isinf(v[hi])) return v[hi];
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

fs::path cell_stem(const fs::path& dir, const std::string& problem, const std::string& variant, std::uint64_t seed) {
  return dir / problem / variant / ("seed_" + std::to_string(seed));
}

}  // namespace

Index ExperimentConfig::budget_for(const std::string& problem) const {
  const auto it = problem_budgets.find(problem);
  return it == problem_budgets.end() ? budget : it->second;
}

void ExperimentConfig::validate() const {
  if (problems.empty()) throw ConfigError("config: no problems");
  if (seeds.empty()) throw ConfigError("config: no seeds");
  if (variants.empty()) throw ConfigError("config: no variants");
  if (parallelism < 1) throw ConfigError("config: parallelism must be at least 1");
  if (!(tau > 0.0)) throw ConfigError("config: tau must be positive");
  for (const auto& name : problems) {
    const Problem p = make_g_problem(name);
    if (budget_for(name) <= 3 * p.dim) {
      throw ConfigError("config: budget for " + name + " must exceed 3*d = " + std::to_string(3 * p.dim));
    }
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(text)) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(static_cast<std::uint64_t>(parse_index("seeds", item)));
      continue;
    }
    const Index a = parse_index("seeds", trim(item.substr(0, dots)));
    const Index b = parse_index("seeds", trim(item.substr(dots + 2)));
    if (a < 0 || b < a) throw ConfigError("invalid seed range '" + item + "'");
    for (Index s = a; s <= b; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  }
  return seeds;
}

SacobraOptions parse_variant(const std::string& signature) {
  std::string s = trim(signature);
  SacobraOptions o;
  if (s.size() > 5 && (s.ends_with("+plog") || s.ends_with("-plog"))) {
    o.forced_plog = s[s.size() - 5] == '+';
    s = s.substr(0, s.size() - 5);
  }
  if (s == "cobra-r") {
    const auto forced = o.forced_plog;
    o = SacobraOptions::all_off();
    o.forced_plog = forced;
    return o;
  }
  if (!s.starts_with("sacobra")) throw ConfigError("unknown variant '" + signature + "'");
  std::string rest = s.substr(7);
  const std::string marker = "-no-";
  while (!rest.empty()) {
    if (!rest.starts_with(marker)) throw ConfigError("unknown variant '" + signature + "'");
    rest = rest.substr(marker.size());
    const auto next = rest.find(marker);
    disable_element(o, rest.substr(0, next));
    rest = next == std::string::npos ? "" : rest.substr(next);
  }
  return o;
}

void apply_setting(ExperimentConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "problems") {
    config.problems = value == "all" ? g_suite_names(true) : split_list(value);
    for (const auto& p : config.problems) (void)make_g_problem(p);
  } else if (key == "seeds") {
    config.seeds = parse_seeds(value);
  } else if (key == "budget") {
    config.budget = parse_index(key, value);
  } else if (key.starts_with("budget.")) {
    const std::string problem = key.substr(7);
    (void)make_g_problem(problem);
    config.problem_budgets[problem] = parse_index(key, value);
  } else if (key == "variants") {
    config.variants.clear();
    for (const auto& v : split_list(value)) config.variants.push_back(parse_variant(v));
  } else if (key == "ablate") {
    SacobraOptions o;
    for (const auto& e : split_list(value)) disable_element(o, e);
    config.variants = {o};
  } else if (key == "output") {
    config.output_dir = value;
  } else if (key == "parallelism") {
    config.parallelism = parse_index(key, value);
  } else if (key == "target") {
    if (value == "optimum") {
      config.target = TargetSource::KnownOptimum;
    } else if (value == "best") {
      config.target = TargetSource::BestObserved;
    } else {
      throw ConfigError("target must be 'optimum' or 'best'");
    }
  } else if (key == "tau") {
    try {
      config.tau = std::stod(value);
    } catch (const std::exception&) {
      throw ConfigError("invalid tau '" + value + "'");
    }
  } else if (key == "resume") {
    config.resume = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t cell_seed(const std::string& problem, std::uint64_t seed) { return mix_seed(stable_hash(problem), seed); }

SummaryRow summarize(const std::vector<RunRecord>& records, double tau) {
  SummaryRow row;
  if (records.empty()) return row;
  row.problem = records.front().problem;
  row.variant = records.front().variant;
  row.runs = static_cast<Index>(records.size());
  std::vector<double> errors;
  std::vector<double> best_fs;
  double evals = 0.0;
  for (const RunRecord& r : records) {
    if (r.problem != row.problem || r.variant != row.variant) throw ConfigError("summarize: mixed records");
    if (!r.completed()) ++row.failed_runs;
    if (!r.has_best) ++row.infeasible_runs;
    best_fs.push_back(r.has_best ? r.best_f : kInf);
    errors.push_back(r.final_error());
    if (r.optimum) {
      if (const auto at = solved_at(r, *r.optimum, tau)) {
        ++row.solved_runs;
        evals += static_cast<double>(*at);
      }
    }
  }
  row.median_best_f = median(best_fs);
  row.median_error = median(errors);
  row.best_error = *std::min_element(errors.begin(), errors.end());
  row.worst_error = *std::max_element(errors.begin(), errors.end());
  row.q1_error = quantile(errors, 0.25);
  row.q3_error = quantile(errors, 0.75);
  if (row.solved_runs > 0) row.mean_evals_to_solve = evals / static_cast<double>(row.solved_runs);
  return row;
}

SummaryTable summarize_all(const std::vector<RunRecord>& records, double tau) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<RunRecord>> groups;
  for (const RunRecord& r : records) {
    const auto key = std::make_pair(r.problem, r.variant);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(r);
  }
  SummaryTable table;
  for (const auto& k : keys) table.push_back(summarize(groups[k], tau));
  return table;
}

std::string summary_csv(const SummaryTable& table) {
  std::ostringstream os;
  os << "problem,variant,runs,median_best_f,median_error,best_error,worst_error,q1_error,q3_error,"
        "mean_evals_to_solve,solved_runs,infeasible_runs,failed_runs\n";
  for (const SummaryRow& r : table) {
    os << r.problem << ',' << r.variant << ',' << r.runs << ',' << fmt(r.median_best_f) << ',' << fmt(r.median_error)
       << ',' << fmt(r.best_error) << ',' << fmt(r.worst_error) << ',' << fmt(r.q1_error) << ',' << fmt(r.q3_error)
       << ',' << fmt(r.mean_evals_to_solve) << ',' << r.solved_runs << ',' << r.infeasible_runs << ','
       << r.failed_runs << '\n';
  }
  return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  struct Cell {
    std::string problem;
    const SacobraOptions* options;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& p : config.problems)
    for (const auto& v : config.variants)
      for (auto s : config.seeds) cells.push_back({p, &v, s});

  ExperimentResult result;
  result.records.resize(cells.size());
  std::mutex collector;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      const std::string variant = c.options->signature();
      const Index budget = config.budget_for(c.problem);
      const fs::path stem = cell_stem(config.output_dir, c.problem, variant, c.seed);
      RunRecord record;
      bool reused = false;
      if (config.resume && fs::exists(stem.string() + ".json")) {
        try {
          std::ifstream in(stem.string() + ".json");
          RunRecord old = run_record_from_json(nlohmann::json::parse(in));
          if (old.completed() && old.variant == variant && old.budget == budget && old.seed == c.seed) {
            record = std::move(old);
            reused = true;
          }
        } catch (const std::exception&) {
        }
      }
      if (!reused) {
        try {
          const Problem problem = make_g_problem(c.problem);
          record = run_sacobra(problem, budget, cell_seed(c.problem, c.seed), *c.options);
        } catch (const std::exception& e) {
          record.problem = c.problem;
          record.variant = variant;
          record.error = e.what();
        }
        record.config["cell_seed"] = cell_seed(c.problem, c.seed);
        record.seed = c.seed;
      }

      std::lock_guard<std::mutex> lock(collector);
      if (!reused) {
        write_file(stem.string() + ".csv", to_csv(record));
        write_file(stem.string() + ".json", to_json(record).dump(1) + "\n");
      }
      if (log != nullptr) {
        *log << c.problem << ' ' << variant << " seed " << c.seed << ": "
             << (record.completed() ? "best " + fmt(record.best_f) + " error " + fmt(record.final_error())
                                    : "FAILED " + record.error)
             << (reused ? " (cached)" : "") << '\n';
        log->flush();
      }
      result.records[i] = std::move(record);
    }
  };

  const auto n_workers = static_cast<std::size_t>(std::min<Index>(config.parallelism, static_cast<Index>(cells.size())));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& r : result.records)
    if (!r.completed()) ++result.failed_cells;
  result.summary = summarize_all(result.records, config.tau);
  write_file(config.output_dir / "summary.csv", summary_csv(result.summary));
  const SolveMatrix matrix = make_solve_matrix(result.records, config.target, config.tau);
  write_file(config.output_dir / "data_profiles.csv", profiles_csv(matrix, default_alpha_grid(), true));
  write_file(config.output_dir / "performance_profiles.csv", profiles_csv(matrix, default_alpha_grid(), false));
  return result;
}

std::vector<RunRecord> load_records(const fs::path& dir) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<RunRecord> records;
  for (const auto& p : paths) {
    std::ifstream in(p);
    try {
      records.push_back(run_record_from_json(nlohmann::json::parse(in)));
    } catch (const std::exception& e) {
      throw Error("cannot read run record " + p.string() + ": " + e.what());
    }
  }
  return records;
}

nlohmann::json suite_manifest(const std::vector<Problem>& problems) {
  nlohmann::json out = nlohmann::json::array();
  for (const Problem& p : problems) {
    nlohmann::json j;
    j["name"] = p.name;
    j["dim"] = p.dim;
    j["lower"] = std::vector<double>(p.lower.data(), p.lower.data() + p.lower.size());
    j["upper"] = std::vector<double>(p.upper.data(), p.upper.data() + p.upper.size());
    j["type"] = p.objective_type;
    j["LI"] = p.count(ConstraintKind::LinearInequality);
    j["NI"] = p.count(ConstraintKind::NonlinearInequality);
    j["NE"] = p.count(ConstraintKind::NonlinearEquality);
    j["optimum"] = p.optimum_value ? nlohmann::json(*p.optimum_value) : nlohmann::json(nullptr);
    if (p.optimum_point) {
      j["optimum_point"] = std::vector<double>(p.optimum_point->data(), p.optimum_point->data() + p.optimum_point->size());
    }
    out.push_back(std::move(j));
  }
  return out;
}

fs::path output_root() {
  const char* env = std::getenv("SACOBRA_OUTPUT_ROOT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
}

}  // namespace sacobra
