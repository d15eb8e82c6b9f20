#pragma once

#include "sacobra/types.hpp"

#include <functional>
#include <iosfwd>

namespace sacobra {

// Cheap evaluator of a surrogate subproblem: returns the objective and writes
// all inequality constraint values (feasible iff every value <= 0) into the
// second argument, which the caller has sized to num_constraints.
using SubproblemFunction = std::function<double(const Vector& x, Vector& constraints)>;

struct SubproblemSpec {
  SubproblemFunction evaluate;
  Index num_constraints = 0;
  Vector lower;
  Vector upper;
  Vector start;
  Index max_inner_evals = 0;
  double initial_radius = 0.1;
  double convergence_tol = 1e-6;
  // When set, one CSV row per evaluation: eval,radius,objective,max_violation
  std::ostream* trace = nullptr;
};

enum class SubsolverStatus { Converged, BudgetExhausted, Stalled };

struct SubsolverResult {
  Vector x;
  double objective_value = kInf;
  double max_violation = kInf;  // includes box violations
  Index inner_evals_used = 0;
  SubsolverStatus status = SubsolverStatus::Stalled;
};

inline constexpr double kMeritFeasibilityTol = 1e-9;

// True iff a precedes b: feasible before infeasible, then lower objective
// (both feasible) or lower violation (both infeasible).
bool merit_order(const SubsolverResult& a, const SubsolverResult& b);

// Powell's COBYLA: linear models of objective and constraints on a simplex of
// d+1 points, a linear-programming trust-region step, and a shrinking trust
// radius. Box bounds enter as 2d linear constraints; the returned point is
// clipped to the box and is the best evaluated point under merit_order.
// Throws ConfigError for an invalid spec and NonFiniteSurrogate when the
// evaluator produces a non-finite value.
SubsolverResult minimize(const SubproblemSpec& spec);

}  // namespace sacobra
