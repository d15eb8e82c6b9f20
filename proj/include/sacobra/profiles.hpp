#pragma once

#include "sacobra/cobra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sacobra {

inline constexpr double kTau = 0.05;

// First evaluation index at which the best feasible objective is within tau
// of f_L.
std::optional<Index> solved_at(const RunRecord& record, double f_L, double tau = kTau);

enum class TargetSource { KnownOptimum, BestObserved };

// t(p, s): evaluations solver s needs on profile problem p (+inf if never).
struct SolveMatrix {
  std::vector<std::string> problems;
  std::vector<std::string> solvers;
  std::vector<Index> dims;
  Matrix t;
  double tau = kTau;

  Index solver_index(const std::string& name) const;
};

// One profile problem per (problem, seed); one solver per variant. With
// BestObserved, f_L is the lowest final best over all variants on that
// (problem, seed); records without a known optimum fall back to it as well.
SolveMatrix make_solve_matrix(const std::vector<RunRecord>& records, TargetSource source = TargetSource::KnownOptimum,
                              double tau = kTau);

// Fraction of problems with t(p,s) / min_s' t(p,s') <= alpha.
double performance_profile(const SolveMatrix& matrix, Index solver, double alpha);
// Fraction of problems with t(p,s) / (d_p + 1) <= alpha.
double data_profile(const SolveMatrix& matrix, Index solver, double alpha);

struct ProfileCurve {
  std::vector<double> alpha;
  std::vector<double> fraction;
};

// 1, 2, ..., 200
std::vector<double> default_alpha_grid();

ProfileCurve performance_curve(const SolveMatrix& matrix, Index solver, const std::vector<double>& alphas);
ProfileCurve data_curve(const SolveMatrix& matrix, Index solver, const std::vector<double>& alphas);

// alpha,<solver 1>,<solver 2>,...
std::string profiles_csv(const SolveMatrix& matrix, const std::vector<double>& alphas, bool data);

double median(std::vector<double> values);

// med(E_plain) / med(E_plog) over final errors; runs without a feasible best
// count as +inf. Returns 1 when both medians are zero or both infinite.
double plog_impact_ratio(const std::vector<RunRecord>& plain, const std::vector<RunRecord>& with_plog, double optimum);

struct WilcoxonResult {
  double w_plus = 0.0;  // rank sum of positive differences
  Index n = 0;          // non-zero differences
  double p_value = 1.0;
  bool exact = false;
};

// Paired one-sided signed-rank test of H1: x tends to exceed y. Exact null
// distribution without ties (n <= 60), normal approximation with tie and
// continuity correction otherwise. Zero differences are dropped.
WilcoxonResult wilcoxon_greater(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sacobra
