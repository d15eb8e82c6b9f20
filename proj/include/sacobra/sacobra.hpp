#pragma once

#include "sacobra/cobra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sacobra {

// x -> scale .* x + offset
struct AffineMap {
  Vector scale;
  Vector offset;

  Vector operator()(const Vector& x) const { return scale.cwiseProduct(x) + offset; }
};

struct RescaledProblem {
  Problem scaled;  // bounds [-1, 1]^d
  AffineMap to_original;
  AffineMap to_scaled;
};

// Element-wise affine map of the box onto [-1, 1]^d. The scaled objective and
// constraints evaluate the originals at to_original(x) (clipped to the box
// against rounding). Throws ConfigError for non-finite or degenerate bounds.
RescaledProblem rescale_problem(const Problem& problem);

inline constexpr double kFrThreshold = 1000.0;

enum class DrcChoice { Small, Large };

const std::vector<double>& drc_for(DrcChoice choice);

struct AdjustmentInfo {
  double fr_hat = 0.0;
  Vector gr_hat;
  Vector constraint_scale;
  DrcChoice drc_choice = DrcChoice::Large;
  double fr_threshold = kFrThreshold;
  // Constraints with zero range on the initial design; their scale is 1.
  std::vector<Index> constant_constraints;

  nlohmann::json to_json() const;
};

// Ranges over the evaluated initial design (rows of f_values/g_values).
AdjustmentInfo analyse_initial_population(const Vector& f_values, const Matrix& g_values);

// g~_i = g_i * constraint_scale[i].
std::vector<ScalarFunction> adjust_constraints(const std::vector<ScalarFunction>& g, const AdjustmentInfo& info);

struct RestartParams {
  double p1 = 0.125;
  double p2 = 0.4;
  double low_feasibility_cut = 0.05;
};

double restart_probability(double feasible_fraction, const RestartParams& restart);

struct StartChoice {
  Vector x;
  bool restart_used = false;
};

// Random uniform point in [lower, upper] with the restart probability,
// otherwise x_best. Without x_best the point is always random. Draw order:
// one uniform for the coin (only when x_best exists), then d uniforms for
// the point (only on restart).
StartChoice random_start(const std::optional<Vector>& x_best, double feasible_fraction, const Vector& lower,
                         const Vector& upper, const RestartParams& restart, Rng& rng);

inline constexpr double kQThreshold = 1.0;
inline constexpr Index kPlogCheckPeriod = 10;

struct PlogDecision {
  std::vector<double> error_ratios;  // E
  double q = 0.0;
  bool active = false;
  Index check_period = kPlogCheckPeriod;
  double q_threshold = kQThreshold;

  // Appends to E and recomputes q = log10(median E) and active = q > threshold.
  void add(double ratio);
};

// |S_f(x) - f| / |plog^-1(S_p(x)) - f|, with 1e300 for a vanishing
// denominator and 1 when both errors vanish.
double plog_error_ratio(double raw_prediction, double plog_prediction, double f_true);

// Fits raw and plog surrogates on the population, compares them at the
// held-out x_new and updates the decision.
PlogDecision analyse_plog_effect(const Matrix& population, const Vector& f_values, const Vector& x_new, double f_new,
                                 PlogDecision decision, KernelKind kernel = KernelKind::cubic(),
                                 TailKind tail = TailKind::LinearPlusSquares);

// Same, reusing an existing factorization on the population.
PlogDecision analyse_plog_effect(const RbfSystem& system, const Vector& f_values, const Vector& x_new, double f_new,
                                 PlogDecision decision);

ScalarFunction effective_objective(ScalarFunction f, const PlogDecision& decision);

// Switches for the five self-adjusting elements. All on is full SACOBRA, all
// off is the plain loop.
struct SacobraOptions {
  bool rescale = true;
  bool acf = true;
  bool adrc = true;
  bool rs = true;
  bool aff = true;
  // Overrides the online decision with a fixed transform (no checks run).
  std::optional<bool> forced_plog;
  RestartParams restart;

  KernelKind kernel;
  TailKind tail = TailKind::LinearPlusSquares;
  Index inner_evals_per_dim = 200;
  double inner_tol = 1e-6;

  static SacobraOptions all_off();
  // "sacobra", "cobra-r", or "sacobra-no-<element>[-no-...]", with a
  // "+plog"/"-plog" suffix for a forced transform.
  std::string signature() const;
  nlohmann::json to_json() const;
};

// Parses the names used by signature() and by --ablate lists:
// rescale, aCF, aDRC, RS, aFF (case-insensitive). Throws ConfigError.
void disable_element(SacobraOptions& options, const std::string& name);

class SacobraHooks : public CobraHooks {
 public:
  explicit SacobraHooks(SacobraOptions options) : options_(std::move(options)) {}

  void on_initial_design(CobraState& state, CobraParams& params, const Problem& problem) override;
  Vector choose_start(CobraState& state, const Problem& problem) override;
  void after_evaluation(CobraState& state, const Vector& x_new, double f_new, const RbfSystem& system) override;

  const PlogDecision& decision() const { return decision_; }
  const std::optional<AdjustmentInfo>& info() const { return info_; }

 private:
  SacobraOptions options_;
  PlogDecision decision_;
  std::optional<AdjustmentInfo> info_;
};

// Runs the loop with the selected elements. best_x in the record is in the
// original coordinates of `problem`.
RunRecord run_sacobra(const Problem& problem, Index budget, std::uint64_t seed, const SacobraOptions& options = {});

// The CobraParams run_sacobra would use (l = 2 with rescaling, else the
// smallest side of the box).
CobraParams sacobra_params(const Problem& problem, Index budget, const SacobraOptions& options);

}  // namespace sacobra
