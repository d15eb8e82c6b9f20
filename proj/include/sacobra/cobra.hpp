#pragma once

#include "sacobra/cobyla.hpp"
#include "sacobra/problem.hpp"
#include "sacobra/rbf.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sacobra {

// Distance requirement cycles.
inline const std::vector<double> kDrcLarge{0.3, 0.05, 0.001, 0.0005, 0.0};
inline const std::vector<double> kDrcSmall{0.001, 0.0};

struct CobraParams {
  Index n_init = 0;
  Index budget = 0;  // N_max, total true evaluations including the design
  double l = 2.0;    // smallest side of the search box
  double eps_init = 0.01;
  double eps_max = 0.02;
  Index t_feas = 1;
  Index t_infeas = 1;
  std::vector<double> drc = kDrcLarge;
  KernelKind kernel;
  TailKind tail = TailKind::LinearPlusSquares;
  // Subsolver settings per iteration.
  Index inner_evals_per_dim = 200;
  double inner_radius = 0.1;
  double inner_tol = 1e-6;

  // n_init = 3d, eps from l, thresholds floor(2 sqrt d), inner radius 0.05 l.
  static CobraParams defaults(Index dim, Index budget, double l = 2.0);
  // Throws ConfigError.
  void validate(Index dim) const;
  nlohmann::json to_json() const;
};

struct RunRow {
  Index eval_index = 0;  // 1-based true-evaluation count
  double best_f = kInf;  // +inf until a feasible point exists
  bool feasible = false;  // the point evaluated in this row
  bool plog_active = false;
  bool restart = false;
};

struct RunRecord {
  std::string problem;
  std::string variant;
  std::uint64_t seed = 0;
  Index dim = 0;
  Index budget = 0;
  std::optional<double> optimum;
  std::vector<RunRow> rows;

  bool has_best = false;
  Vector best_x;  // in the coordinates of the problem as supplied by the caller
  double best_f = kInf;
  double best_violation = kInf;  // max(0, max_i g_i) at best_x
  Index true_evaluations = 0;

  std::vector<double> q_trace;  // Q after each plog check
  nlohmann::json config;
  nlohmann::json adjustment;
  std::string error;  // non-empty when the run aborted

  bool completed() const { return error.empty(); }
  // |best_f - optimum|, +inf without a feasible best or known optimum.
  double final_error() const;
  double error_at(const RunRow& row) const;
};

// eval_index,best_f,error_vs_optimum,feasible,plog_active,restart
std::string to_csv(const RunRecord& record);
nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& j);

struct CobraState {
  Matrix x;  // budget x d; rows [0, size) are the population
  Vector f;
  Matrix g;  // raw constraint values
  Index size = 0;
  std::optional<Index> best;  // row of the best feasible member

  double eps = 0.0;
  Index c_feas = 0;
  Index c_infeas = 0;
  Index drc_index = 0;
  Index iteration = 0;
  Index true_evaluations = 0;

  // Surrogate training targets: g_i * constraint_scale[i], and plog(f) when
  // plog_active. Feasibility and the best point always use the raw values.
  Vector constraint_scale;
  bool plog_active = false;
  bool restart_used = false;  // start point of the current iteration was random

  Rng rng;
  RunRecord history;

  CobraState(Index dim, Index num_constraints, Index budget, std::uint64_t seed);

  Index dim() const { return x.cols(); }
  Index num_constraints() const { return g.cols(); }
  auto population() const { return x.topRows(size); }
  double max_violation(Index row) const;
  bool feasible(Index row) const { return max_violation(row) <= 0.0; }
  Index feasible_count() const;
  // Row with the smallest maximum violation (first on ties).
  Index least_violating() const;
};

// Latin hypercube: n points, one per stratum and coordinate, strata permuted
// independently per coordinate, uniform jitter inside each stratum.
Matrix init_design(const Vector& lower, const Vector& upper, Index n, Rng& rng);
Matrix init_design(const Vector& lower, const Vector& upper, Index n, std::uint64_t seed);

double select_rho(const CobraParams& params, Index iteration);

void update_epsilon(CobraState& state, bool new_point_feasible, const CobraParams& params);

// Appends the evaluated point and a history row; the best point changes only
// for a feasible point with strictly smaller objective.
void update_best(CobraState& state, const Vector& x_new, double f_new, const Vector& g_new);

// Targets for one fit: column 0 the (possibly plog) objective, then the scaled
// constraints.
Matrix surrogate_targets(const CobraState& state);

// Subproblem over the current surrogates: objective s_0, constraints
// s_i + eps, plus one aggregated distance constraint rho - min_j |x - x_j|
// when rho > 0.
SubproblemSpec assemble_subproblem(std::shared_ptr<const SurrogateBundle> models, const CobraState& state,
                                   const CobraParams& params, const Problem& problem, const Vector& x_start);

// Extension points used by the self-adjusting variant. Defaults reproduce
// the plain loop.
class CobraHooks {
 public:
  virtual ~CobraHooks() = default;

  // After the initial design is evaluated and before the first iteration.
  virtual void on_initial_design(CobraState&, CobraParams&, const Problem&) {}

  // Start point for the subsolver; sets state.restart_used.
  virtual Vector choose_start(CobraState& state, const Problem& problem);

  // After x_new is evaluated, before it joins the population. `system` is
  // the factorization on the current population.
  virtual void after_evaluation(CobraState&, const Vector& /*x_new*/, double /*f_new*/, const RbfSystem&) {}

  virtual Vector repair(const Vector& x_new, const CobraState&) { return x_new; }
};

// Full loop on the problem as given (no rescaling). Always returns a record;
// errors abort the run and are stored in record.error.
RunRecord run_cobra(const Problem& problem, CobraParams params, std::uint64_t seed, CobraHooks* hooks = nullptr);

}  // namespace sacobra
