#pragma once

#include "sacobra/problem.hpp"

#include <string>
#include <vector>

namespace sacobra {

// Equality directions used when the G-suite converts equalities to
// inequalities. The feasible side is the one where the objective increases;
// each entry can be flipped by callers constructing their own variant.
struct GSuiteDirections {
  std::vector<EqualityDirection> g03{EqualityDirection::LE};
  std::vector<EqualityDirection> g05{EqualityDirection::LE, EqualityDirection::LE, EqualityDirection::LE};
  std::vector<EqualityDirection> g11{EqualityDirection::LE};
};

// The eleven classic G-problems (G02 at d = 10), equalities converted,
// maximization problems negated.
std::vector<Problem> make_g_suite(const GSuiteDirections& directions = {});

// Any single suite member by name. Besides G01..G11 this accepts "G02d20",
// the 20-dimensional G02 variant.
Problem make_g_problem(const std::string& name, const GSuiteDirections& directions = {});

Problem make_g02(Index dim);

// G01..G11, optionally followed by G02d20.
std::vector<std::string> g_suite_names(bool include_g02_20 = false);

}  // namespace sacobra
