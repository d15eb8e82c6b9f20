#include "sacobra/cobra.hpp"

#include "sacobra/plog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sacobra {

namespace {

constexpr double kJitter = 1e-8;
constexpr double kSameTolerance = 1e-12;

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Index>(i)] = v[i];
  return out;
}

// JSON has no infinity; encode it as null.
nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }
double number(const nlohmann::json& j) { return j.is_null() ? kInf : j.get<double>(); }

Evaluation evaluate_finite(const Problem& problem, const Vector& x, CobraState& state) {
  Evaluation e = evaluate(problem, x);
  ++state.true_evaluations;
  if (!std::isfinite(e.f) || !e.g.allFinite()) {
    std::ostringstream os;
    os << problem.name << ": non-finite true evaluation at x = [" << x.transpose() << "]";
    throw Error(os.str());
  }
  return e;
}

}  // namespace

CobraParams CobraParams::defaults(Index dim, Index budget, double l) {
  CobraParams p;
  p.n_init = 3 * dim;
  p.budget = budget;
  p.l = l;
  p.eps_init = 0.005 * l;
  p.eps_max = 0.01 * l;
  p.t_feas = static_cast<Index>(std::floor(2.0 * std::sqrt(static_cast<double>(dim))));
  p.t_infeas = p.t_feas;
  p.inner_radius = 0.05 * l;
  return p;
}

void CobraParams::validate(Index dim) const {
  if (n_init < dim + 1) throw ConfigError("n_init must be at least d+1");
  if (n_init < tail_size(tail, dim)) throw ConfigError("n_init too small for the polynomial tail");
  if (budget <= n_init) throw ConfigError("budget must exceed n_init");
  if (!(l > 0.0)) throw ConfigError("l must be positive");
  if (!(0.0 <= eps_init && eps_init <= eps_max)) throw ConfigError("need 0 <= eps_init <= eps_max");
  if (t_feas < 1 || t_infeas < 1) throw ConfigError("feasibility thresholds must be positive");
  if (drc.empty()) throw ConfigError("distance requirement cycle is empty");
  for (double r : drc)
    if (!(r >= 0.0)) throw ConfigError("distance requirements must be non-negative");
  if (inner_evals_per_dim < 50) throw ConfigError("inner_evals_per_dim must be at least 50");
  if (!(inner_tol > 0.0 && inner_tol <= inner_radius)) throw ConfigError("need 0 < inner_tol <= inner_radius");
}

nlohmann::json CobraParams::to_json() const {
  nlohmann::json j;
  j["n_init"] = n_init;
  j["budget"] = budget;
  j["l"] = l;
  j["eps_init"] = eps_init;
  j["eps_max"] = eps_max;
  j["t_feas"] = t_feas;
  j["t_infeas"] = t_infeas;
  j["drc"] = drc;
  j["kernel"] = kernel.type == KernelKind::Type::Cubic ? "cubic" : "gaussian";
  if (kernel.type == KernelKind::Type::Gaussian) j["kernel_width"] = kernel.width;
  j["tail"] = tail == TailKind::Linear ? "linear" : "linear+squares";
  j["inner_evals_per_dim"] = inner_evals_per_dim;
  j["inner_radius"] = inner_radius;
  j["inner_tol"] = inner_tol;
  return j;
}

double RunRecord::final_error() const {
  if (!has_best || !optimum) return kInf;
  return std::abs(best_f - *optimum);
}

double RunRecord::error_at(const RunRow& row) const {
  if (!std::isfinite(row.best_f) || !optimum) return kInf;
  return std::abs(row.best_f - *optimum);
}

std::string to_csv(const RunRecord& record) {
  std::ostringstream os;
  os.precision(17);
  os << "eval_index,best_f,error_vs_optimum,feasible,plog_active,restart\n";
  for (const RunRow& row : record.rows) {
    os << row.eval_index << ',';
    if (std::isfinite(row.best_f)) os << row.best_f;
    os << ',';
    const double err = record.error_at(row);
    if (std::isfinite(err)) os << err;
    os << ',' << row.feasible << ',' << row.plog_active << ',' << row.restart << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const RunRecord& record) {
  nlohmann::json j;
  j["problem"] = record.problem;
  j["variant"] = record.variant;
  j["seed"] = record.seed;
  j["dim"] = record.dim;
  j["budget"] = record.budget;
  j["optimum"] = record.optimum ? nlohmann::json(*record.optimum) : nlohmann::json(nullptr);
  j["has_best"] = record.has_best;
  j["best_x"] = to_std(record.best_x);
  j["best_f"] = number(record.best_f);
  j["best_violation"] = number(record.best_violation);
  j["true_evaluations"] = record.true_evaluations;
  j["q_trace"] = record.q_trace;
  j["config"] = record.config;
  j["adjustment"] = record.adjustment;
  j["error"] = record.error;
  nlohmann::json rows = nlohmann::json::array();
  for (const RunRow& row : record.rows) {
    rows.push_back({row.eval_index, number(row.best_f), row.feasible, row.plog_active, row.restart});
  }
  j["rows"] = std::move(rows);
  return j;
}

RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.problem = j.at("problem").get<std::string>();
  r.variant = j.at("variant").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.dim = j.at("dim").get<Index>();
  r.budget = j.at("budget").get<Index>();
  if (!j.at("optimum").is_null()) r.optimum = j["optimum"].get<double>();
  r.has_best = j.at("has_best").get<bool>();
  r.best_x = from_std(j.at("best_x").get<std::vector<double>>());
  r.best_f = number(j.at("best_f"));
  r.best_violation = number(j.at("best_violation"));
  r.true_evaluations = j.at("true_evaluations").get<Index>();
  r.q_trace = j.at("q_trace").get<std::vector<double>>();
  r.config = j.at("config");
  r.adjustment = j.at("adjustment");
  r.error = j.at("error").get<std::string>();
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({row[0].get<Index>(), number(row[1]), row[2].get<bool>(), row[3].get<bool>(),
                      row[4].get<bool>()});
  }
  return r;
}

CobraState::CobraState(Index dim, Index num_constraints, Index budget, std::uint64_t seed)
    : x(budget, dim), f(budget), g(budget, num_constraints), constraint_scale(Vector::Ones(num_constraints)),
      rng(seed) {}

double CobraState::max_violation(Index row) const {
  if (g.cols() == 0) return 0.0;
  return std::max(0.0, g.row(row).maxCoeff());
}

Index CobraState::feasible_count() const {
  Index n = 0;
  for (Index i = 0; i < size; ++i) n += feasible(i) ? 1 : 0;
  return n;
}

Index CobraState::least_violating() const {
  Index best_row = 0;
  for (Index i = 1; i < size; ++i) {
    if (max_violation(i) < max_violation(best_row)) best_row = i;
  }
  return best_row;
}

Matrix init_design(const Vector& lower, const Vector& upper, Index n, Rng& rng) {
  const Index d = lower.size();
  if (n < 1) throw ConfigError("init_design: need at least one point");
  Matrix design(n, d);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), Index{0});
    for (Index i = n - 1; i > 0; --i) {
      const auto k = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
    }
    const double width = (upper[j] - lower[j]) / static_cast<double>(n);
    for (Index i = 0; i < n; ++i) {
      const double u = rng.uniform();
      design(i, j) = std::min(upper[j], lower[j] + (static_cast<double>(perm[static_cast<std::size_t>(i)]) + u) * width);
    }
  }
  return design;
}

Matrix init_design(const Vector& lower, const Vector& upper, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return init_design(lower, upper, n, rng);
}

double select_rho(const CobraParams& params, Index iteration) {
  const auto k = static_cast<Index>(params.drc.size());
  return params.drc[static_cast<std::size_t>(iteration % k)];
}

void update_epsilon(CobraState& state, bool new_point_feasible, const CobraParams& params) {
  if (new_point_feasible) {
    ++state.c_feas;
  } else {
    ++state.c_infeas;
  }
  if (state.c_feas >= params.t_feas) {
    state.eps *= 0.5;
    state.c_feas = 0;
    state.c_infeas = 0;
  } else if (state.c_infeas >= params.t_infeas) {
    state.eps = std::min(2.0 * state.eps, params.eps_max);
    state.c_feas = 0;
    state.c_infeas = 0;
  }
}

void update_best(CobraState& state, const Vector& x_new, double f_new, const Vector& g_new) {
  const Index row = state.size;
  if (row >= state.x.rows()) throw ConfigError("update_best: population is full");
  state.x.row(row) = x_new.transpose();
  state.f[row] = f_new;
  state.g.row(row) = g_new.transpose();
  ++state.size;

  const bool feasible = g_new.size() == 0 || g_new.maxCoeff() <= 0.0;
  if (feasible && (!state.best || f_new < state.f[*state.best])) state.best = row;

  RunRow r;
  r.eval_index = state.size;
  r.best_f = state.best ? state.f[*state.best] : kInf;
  r.feasible = feasible;
  r.plog_active = state.plog_active;
  r.restart = state.restart_used;
  state.history.rows.push_back(r);
}

Matrix surrogate_targets(const CobraState& state) {
  const Index n = state.size;
  const Index m = state.num_constraints();
  Matrix targets(n, m + 1);
  targets.col(0) = state.f.head(n);
  if (state.plog_active) targets.col(0) = targets.col(0).unaryExpr([](double y) { return plog(y); });
  for (Index i = 0; i < m; ++i) targets.col(i + 1) = state.g.col(i).head(n) * state.constraint_scale[i];
  return targets;
}

SubproblemSpec assemble_subproblem(std::shared_ptr<const SurrogateBundle> models, const CobraState& state,
                                   const CobraParams& params, const Problem& problem, const Vector& x_start) {
  const Index m = state.num_constraints();
  const double rho = select_rho(params, state.drc_index);
  const double eps = state.eps;

  SubproblemSpec spec;
  spec.num_constraints = m + (rho > 0.0 ? 1 : 0);
  spec.lower = problem.lower;
  spec.upper = problem.upper;
  spec.start = x_start;
  spec.max_inner_evals = params.inner_evals_per_dim * problem.dim;
  spec.initial_radius = params.inner_radius;
  spec.convergence_tol = params.inner_tol;
  spec.evaluate = [models, m, rho, eps, out = Vector()](const Vector& x, Vector& g) mutable {
    double dmin = 0.0;
    models->predict_into(x, out, &dmin);
    for (Index i = 0; i < m; ++i) g[i] = out[i + 1] + eps;
    if (rho > 0.0) g[m] = rho - dmin;
    return out[0];
  };
  return spec;
}

Vector CobraHooks::choose_start(CobraState& state, const Problem&) {
  state.restart_used = false;
  const Index row = state.best ? *state.best : state.least_violating();
  return state.x.row(row).transpose();
}

RunRecord run_cobra(const Problem& problem, CobraParams params, std::uint64_t seed, CobraHooks* hooks) {
  CobraHooks plain;
  if (hooks == nullptr) hooks = &plain;

  RunRecord record;
  record.problem = problem.name;
  record.seed = seed;
  record.dim = problem.dim;
  record.budget = params.budget;
  record.optimum = problem.optimum_value;

  std::optional<CobraState> state;
  try {
    problem.validate();
    params.validate(problem.dim);
    state.emplace(problem.dim, problem.num_constraints(), params.budget, seed);
    state->history = record;
    state->eps = params.eps_init;

    const Matrix design = init_design(problem.lower, problem.upper, params.n_init, state->rng);
    for (Index i = 0; i < design.rows(); ++i) {
      const Vector x = design.row(i).transpose();
      const Evaluation e = evaluate_finite(problem, x, *state);
      update_best(*state, x, e.f, e.g);
    }
    hooks->on_initial_design(*state, params, problem);

    while (state->size < params.budget) {
      const RbfSystem system(state->population(), params.kernel, params.tail);
      auto models = std::make_shared<const SurrogateBundle>(system.fit_all(surrogate_targets(*state)));
      const Vector start = hooks->choose_start(*state, problem);
      const SubsolverResult solved = minimize(assemble_subproblem(models, *state, params, problem, start));

      Vector x_new = solved.x;
      const Vector distances = (state->population().rowwise() - x_new.transpose()).rowwise().norm();
      if (distances.minCoeff() <= kSameTolerance) {
        for (Index i = 0; i < x_new.size(); ++i) x_new[i] += state->rng.uniform(-kJitter, kJitter);
        x_new = x_new.cwiseMax(problem.lower).cwiseMin(problem.upper);
      }

      Evaluation e = evaluate_finite(problem, x_new, *state);
      hooks->after_evaluation(*state, x_new, e.f, system);
      const Vector repaired = hooks->repair(x_new, *state);
      if (repaired != x_new) {
        x_new = repaired.cwiseMax(problem.lower).cwiseMin(problem.upper);
        e = evaluate_finite(problem, x_new, *state);
      }
      update_epsilon(*state, e.feasible(), params);
      update_best(*state, x_new, e.f, e.g);
      ++state->drc_index;
      ++state->iteration;
    }
  } catch (const std::exception& ex) {
    if (state) record = state->history;
    record.error = ex.what();
  }
  if (!state) return record;

  if (record.error.empty()) record = state->history;
  record.config = params.to_json();
  record.true_evaluations = state->true_evaluations;
  if (state->best) {
    record.has_best = true;
    record.best_x = state->x.row(*state->best).transpose();
    record.best_f = state->f[*state->best];
    record.best_violation = state->max_violation(*state->best);
  }
  return record;
}

}  // namespace sacobra
