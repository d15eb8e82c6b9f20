#include "sacobra/sacobra.hpp"

#include "sacobra/plog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace sacobra {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kHuge = 1e300;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string lower_case(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

RescaledProblem rescale_problem(const Problem& problem) {
  const Index d = problem.dim;
  if (problem.lower.size() != d || problem.upper.size() != d) throw ConfigError("rescale: bounds do not match dimension");
  if (!problem.lower.allFinite() || !problem.upper.allFinite()) throw ConfigError("rescale: bounds must be finite");
  for (Index i = 0; i < d; ++i) {
    if (!(problem.lower[i] < problem.upper[i])) {
      throw ConfigError("rescale: degenerate bound at coordinate " + std::to_string(i));
    }
  }
  RescaledProblem r;
  const Vector width = problem.upper - problem.lower;
  r.to_original.scale = 0.5 * width;
  r.to_original.offset = problem.lower + 0.5 * width;
  r.to_scaled.scale = 2.0 * width.cwiseInverse();
  r.to_scaled.offset = -r.to_scaled.scale.cwiseProduct(problem.lower) - Vector::Ones(d);

  const Vector lo = problem.lower;
  const Vector hi = problem.upper;
  const AffineMap back = r.to_original;
  auto pull = [back, lo, hi](const ScalarFunction& fn) -> ScalarFunction {
    return [fn, back, lo, hi](const Vector& z) { return fn(back(z).cwiseMax(lo).cwiseMin(hi)); };
  };

  r.scaled = problem;
  r.scaled.lower = -Vector::Ones(d);
  r.scaled.upper = Vector::Ones(d);
  r.scaled.objective = pull(problem.objective);
  for (auto& g : r.scaled.constraints) g = pull(g);
  if (problem.optimum_point) {
    r.scaled.optimum_point = r.to_scaled(*problem.optimum_point).cwiseMax(-1.0).cwiseMin(1.0);
  }
  return r;
}

const std::vector<double>& drc_for(DrcChoice choice) { return choice == DrcChoice::Small ? kDrcSmall : kDrcLarge; }

nlohmann::json AdjustmentInfo::to_json() const {
  nlohmann::json j;
  j["fr_hat"] = fr_hat;
  j["gr_hat"] = std::vector<double>(gr_hat.data(), gr_hat.data() + gr_hat.size());
  j["constraint_scale"] = std::vector<double>(constraint_scale.data(), constraint_scale.data() + constraint_scale.size());
  j["drc_choice"] = drc_choice == DrcChoice::Small ? "small" : "large";
  j["fr_threshold"] = fr_threshold;
  j["constant_constraints"] = constant_constraints;
  return j;
}

AdjustmentInfo analyse_initial_population(const Vector& f_values, const Matrix& g_values) {
  if (f_values.size() == 0) throw ConfigError("analyse_initial_population: empty population");
  if (g_values.rows() != f_values.size()) throw DimensionMismatch("analyse_initial_population: row count mismatch");
  AdjustmentInfo info;
  info.fr_hat = f_values.maxCoeff() - f_values.minCoeff();
  const Index m = g_values.cols();
  info.gr_hat.resize(m);
  for (Index i = 0; i < m; ++i) info.gr_hat[i] = g_values.col(i).maxCoeff() - g_values.col(i).minCoeff();
  info.constraint_scale = Vector::Ones(m);
  if (m > 0) {
    const double avg = info.gr_hat.mean();
    for (Index i = 0; i < m; ++i) {
      if (info.gr_hat[i] > 0.0) {
        info.constraint_scale[i] = avg / info.gr_hat[i];
      } else {
        info.constant_constraints.push_back(i);
      }
    }
  }
  info.drc_choice = info.fr_hat > info.fr_threshold ? DrcChoice::Small : DrcChoice::Large;
  return info;
}

std::vector<ScalarFunction> adjust_constraints(const std::vector<ScalarFunction>& g, const AdjustmentInfo& info) {
  if (static_cast<Index>(g.size()) != info.constraint_scale.size()) {
    throw DimensionMismatch("adjust_constraints: scale count does not match constraints");
  }
  std::vector<ScalarFunction> out;
  out.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = info.constraint_scale[static_cast<Index>(i)];
    out.push_back([fn = g[i], s](const Vector& x) { return fn(x) * s; });
  }
  return out;
}

double restart_probability(double feasible_fraction, const RestartParams& restart) {
  return feasible_fraction < restart.low_feasibility_cut ? restart.p2 : restart.p1;
}

StartChoice random_start(const std::optional<Vector>& x_best, double feasible_fraction, const Vector& lower,
                         const Vector& upper, const RestartParams& restart, Rng& rng) {
  bool jump = true;
  if (x_best) jump = rng.uniform() < restart_probability(feasible_fraction, restart);
  if (!jump) return {*x_best, false};
  Vector x(lower.size());
  for (Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(lower[i], upper[i]);
  return {x, true};
}

void PlogDecision::add(double ratio) {
  error_ratios.push_back(ratio);
  q = std::log10(median(error_ratios));
  active = q > q_threshold;
}

double plog_error_ratio(double raw_prediction, double plog_prediction, double f_true) {
  const double num = std::abs(raw_prediction - f_true);
  const double den = std::abs(plog_inverse(plog_prediction) - f_true);
  if (num < kTiny && den < kTiny) return 1.0;
  if (den < kTiny) return kHuge;
  return std::min(num / den, kHuge);
}

PlogDecision analyse_plog_effect(const RbfSystem& system, const Vector& f_values, const Vector& x_new, double f_new,
                                 PlogDecision decision) {
  Matrix targets(f_values.size(), 2);
  targets.col(0) = f_values;
  targets.col(1) = f_values.unaryExpr([](double y) { return plog(y); });
  const Vector pred = system.fit_all(targets).predict(x_new);
  decision.add(plog_error_ratio(pred[0], pred[1], f_new));
  return decision;
}

PlogDecision analyse_plog_effect(const Matrix& population, const Vector& f_values, const Vector& x_new, double f_new,
                                 PlogDecision decision, KernelKind kernel, TailKind tail) {
  return analyse_plog_effect(RbfSystem(population, kernel, tail), f_values, x_new, f_new, std::move(decision));
}

ScalarFunction effective_objective(ScalarFunction f, const PlogDecision& decision) {
  if (!decision.active) return f;
  return [fn = std::move(f)](const Vector& x) { return plog(fn(x)); };
}

SacobraOptions SacobraOptions::all_off() {
  SacobraOptions o;
  o.rescale = o.acf = o.adrc = o.rs = o.aff = false;
  return o;
}

std::string SacobraOptions::signature() const {
  std::string s;
  if (!rescale && !acf && !adrc && !rs && !aff) {
    s = "cobra-r";
  } else {
    s = "sacobra";
    if (!rescale) s += "-no-rescale";
    if (!acf) s += "-no-acf";
    if (!adrc) s += "-no-adrc";
    if (!rs) s += "-no-rs";
    if (!aff) s += "-no-aff";
  }
  if (forced_plog) s += *forced_plog ? "+plog" : "-plog";
  return s;
}

nlohmann::json SacobraOptions::to_json() const {
  nlohmann::json j;
  j["rescale"] = rescale;
  j["aCF"] = acf;
  j["aDRC"] = adrc;
  j["RS"] = rs;
  j["aFF"] = aff;
  j["forced_plog"] = forced_plog ? nlohmann::json(*forced_plog) : nlohmann::json(nullptr);
  j["p1"] = restart.p1;
  j["p2"] = restart.p2;
  j["low_feasibility_cut"] = restart.low_feasibility_cut;
  return j;
}

void disable_element(SacobraOptions& options, const std::string& name) {
  const std::string n = lower_case(name);
  if (n == "rescale") {
    options.rescale = false;
  } else if (n == "acf") {
    options.acf = false;
  } else if (n == "adrc") {
    options.adrc = false;
  } else if (n == "rs") {
    options.rs = false;
  } else if (n == "aff") {
    options.aff = false;
  } else {
    throw ConfigError("unknown SACOBRA element '" + name + "' (expected rescale, aCF, aDRC, RS or aFF)");
  }
}

void SacobraHooks::on_initial_design(CobraState& state, CobraParams& params, const Problem&) {
  const Index n = state.size;
  info_ = analyse_initial_population(state.f.head(n), state.g.topRows(n));
  if (options_.acf) state.constraint_scale = info_->constraint_scale;
  params.drc = options_.adrc ? drc_for(info_->drc_choice) : kDrcLarge;
  state.history.adjustment = info_->to_json();
  state.history.adjustment["acf_applied"] = options_.acf;
  state.history.adjustment["drc"] = params.drc;

  if (options_.forced_plog) {
    state.plog_active = *options_.forced_plog;
    return;
  }
  if (!options_.aff) return;

  // Initial check: the best design point is held out.
  const Index held = state.best ? *state.best : state.least_violating();
  Matrix rest(n - 1, state.dim());
  Vector f_rest(n - 1);
  for (Index i = 0, k = 0; i < n; ++i) {
    if (i == held) continue;
    rest.row(k) = state.x.row(i);
    f_rest[k] = state.f[i];
    ++k;
  }
  decision_ = analyse_plog_effect(rest, f_rest, state.x.row(held).transpose(), state.f[held], decision_, params.kernel,
                                  params.tail);
  state.plog_active = decision_.active;
  state.history.q_trace.push_back(decision_.q);
}

Vector SacobraHooks::choose_start(CobraState& state, const Problem& problem) {
  if (!options_.rs) return CobraHooks::choose_start(state, problem);
  std::optional<Vector> x_best;
  if (state.best) x_best = state.x.row(*state.best).transpose();
  const double fraction = static_cast<double>(state.feasible_count()) / static_cast<double>(state.size);
  StartChoice c = random_start(x_best, fraction, problem.lower, problem.upper, options_.restart, state.rng);
  state.restart_used = c.restart_used;
  return c.x;
}

void SacobraHooks::after_evaluation(CobraState& state, const Vector& x_new, double f_new, const RbfSystem& system) {
  if (!options_.aff || options_.forced_plog) return;
  if (state.size % decision_.check_period != 0) return;
  decision_ = analyse_plog_effect(system, state.f.head(state.size), x_new, f_new, decision_);
  state.plog_active = decision_.active;
  state.history.q_trace.push_back(decision_.q);
}

CobraParams sacobra_params(const Problem& problem, Index budget, const SacobraOptions& options) {
  const double l = options.rescale ? 2.0 : (problem.upper - problem.lower).minCoeff();
  CobraParams p = CobraParams::defaults(problem.dim, budget, l);
  p.kernel = options.kernel;
  p.tail = options.tail;
  p.inner_evals_per_dim = options.inner_evals_per_dim;
  p.inner_tol = options.inner_tol;
  return p;
}

RunRecord run_sacobra(const Problem& problem, Index budget, std::uint64_t seed, const SacobraOptions& options) {
  const CobraParams params = sacobra_params(problem, budget, options);
  SacobraHooks hooks(options);
  RunRecord record;
  if (options.rescale) {
    RescaledProblem rp;
    try {
      rp = rescale_problem(problem);
    } catch (const Error& e) {
      record.problem = problem.name;
      record.seed = seed;
      record.error = e.what();
      return record;
    }
    record = run_cobra(rp.scaled, params, seed, &hooks);
    if (record.has_best) record.best_x = rp.to_original(record.best_x).cwiseMax(problem.lower).cwiseMin(problem.upper);
  } else {
    record = run_cobra(problem, params, seed, &hooks);
  }
  record.variant = options.signature();
  record.config["options"] = options.to_json();
  return record;
}

}  // namespace sacobra
