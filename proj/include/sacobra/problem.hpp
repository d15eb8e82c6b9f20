#pragma once

#include "sacobra/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sacobra {

using ScalarFunction = std::function<double(const Vector&)>;

enum class ConstraintKind { LinearInequality, NonlinearInequality, NonlinearEquality };

// Box-constrained minimization problem with inequality constraints g_i(x) <= 0.
struct Problem {
  std::string name;
  Index dim = 0;
  Vector lower;
  Vector upper;
  ScalarFunction objective;
  std::vector<ScalarFunction> constraints;
  // Origin of each constraint (equalities are stored already converted).
  std::vector<ConstraintKind> kinds;
  std::string objective_type;
  std::optional<double> optimum_value;
  std::optional<Vector> optimum_point;

  Index num_constraints() const { return static_cast<Index>(constraints.size()); }
  Index count(ConstraintKind kind) const;
  // Throws ConfigError when bounds, dimensions or kinds are inconsistent.
  void validate() const;
};

struct Evaluation {
  double f = 0.0;
  Vector g;

  double max_violation() const { return g.size() == 0 ? 0.0 : std::max(0.0, g.maxCoeff()); }
  bool feasible() const { return g.size() == 0 || g.maxCoeff() <= 0.0; }
};

inline constexpr double kBoundsSlack = 1e-12;

// Evaluates objective and constraints in declared order. Throws BoundsViolation
// for points outside the box (with kBoundsSlack tolerance).
Evaluation evaluate(const Problem& problem, const Vector& x);

enum class EqualityDirection { LE, GE };

// h(x) = 0 becomes h(x) <= 0 (LE) or -h(x) <= 0 (GE).
std::vector<ScalarFunction> convert_equalities(const std::vector<ScalarFunction>& equalities,
                                               const std::vector<EqualityDirection>& directions);

struct ProblemCharacteristics {
  double feasibility_rate = 0.0;       // rho*, fraction in [0, 1]
  double fitness_range = 0.0;          // FR
  double constraint_range_ratio = 1.0; // GR, +inf when a constraint range is zero
  bool degenerate_constraint_range = false;
  Index sample_count = 0;
  std::uint64_t seed = 0;

  // Binomial standard error of feasibility_rate.
  double feasibility_stderr() const;
};

// Monte-Carlo estimate of feasibility rate and objective/constraint ranges
// from uniform samples of the box. Requires n_samples >= 1000.
ProblemCharacteristics characterize(const Problem& problem, Index n_samples, std::uint64_t seed);

// Column order: name,d,type,rho_percent,FR,GR,LI,NI,NE
std::string characteristics_csv_header();
std::string characteristics_csv_row(const Problem& problem, const ProblemCharacteristics& c);

}  // namespace sacobra
