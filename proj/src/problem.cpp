#include "sacobra/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sacobra {

Index Problem::count(ConstraintKind kind) const {
  return static_cast<Index>(std::count(kinds.begin(), kinds.end(), kind));
}

void Problem::validate() const {
  if (dim <= 0) throw ConfigError(name + ": dimension must be positive");
  if (lower.size() != dim || upper.size() != dim) throw ConfigError(name + ": bounds do not match dimension");
  for (Index i = 0; i < dim; ++i) {
    if (!(lower[i] < upper[i])) throw ConfigError(name + ": lower bound not below upper bound at " + std::to_string(i));
  }
  if (!objective) throw ConfigError(name + ": missing objective");
  if (!kinds.empty() && kinds.size() != constraints.size()) throw ConfigError(name + ": constraint kinds mismatch");
  if (optimum_point && optimum_point->size() != dim) throw ConfigError(name + ": optimum point has wrong size");
}

Evaluation evaluate(const Problem& problem, const Vector& x) {
  if (x.size() != problem.dim) {
    throw DimensionMismatch(problem.name + ": expected " + std::to_string(problem.dim) + " coordinates, got " +
                            std::to_string(x.size()));
  }
  for (Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= problem.lower[i] - kBoundsSlack && x[i] <= problem.upper[i] + kBoundsSlack)) {
      throw BoundsViolation(problem.name, i, x[i], problem.lower[i], problem.upper[i]);
    }
  }
  Evaluation e;
  e.f = problem.objective(x);
  e.g.resize(problem.num_constraints());
  for (Index i = 0; i < e.g.size(); ++i) e.g[i] = problem.constraints[static_cast<std::size_t>(i)](x);
  return e;
}

std::vector<ScalarFunction> convert_equalities(const std::vector<ScalarFunction>& equalities,
                                               const std::vector<EqualityDirection>& directions) {
  if (directions.size() != equalities.size()) {
    throw ConfigError("convert_equalities: " + std::to_string(equalities.size()) + " equalities but " +
                      std::to_string(directions.size()) + " directions");
  }
  std::vector<ScalarFunction> out;
  out.reserve(equalities.size());
  for (std::size_t i = 0; i < equalities.size(); ++i) {
    if (directions[i] == EqualityDirection::LE) {
      out.push_back(equalities[i]);
    } else {
      out.push_back([h = equalities[i]](const Vector& x) { return -h(x); });
    }
  }
  return out;
}

double ProblemCharacteristics::feasibility_stderr() const {
  if (sample_count <= 0) return 0.0;
  return std::sqrt(feasibility_rate * (1.0 - feasibility_rate) / static_cast<double>(sample_count));
}

ProblemCharacteristics characterize(const Problem& problem, Index n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw ConfigError("characterize: n_samples must be at least 1000");
  Rng rng(seed);
  const Index m = problem.num_constraints();
  Vector x(problem.dim);
  Vector gmin = Vector::Constant(m, kInf);
  Vector gmax = Vector::Constant(m, -kInf);
  double fmin = kInf;
  double fmax = -kInf;
  Index feasible = 0;
  for (Index s = 0; s < n_samples; ++s) {
    for (Index i = 0; i < problem.dim; ++i) x[i] = rng.uniform(problem.lower[i], problem.upper[i]);
    const double f = problem.objective(x);
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
    bool ok = true;
    for (Index i = 0; i < m; ++i) {
      const double g = problem.constraints[static_cast<std::size_t>(i)](x);
      gmin[i] = std::min(gmin[i], g);
      gmax[i] = std::max(gmax[i], g);
      ok = ok && g <= 0.0;
    }
    if (ok) ++feasible;
  }
  ProblemCharacteristics c;
  c.sample_count = n_samples;
  c.seed = seed;
  c.feasibility_rate = static_cast<double>(feasible) / static_cast<double>(n_samples);
  c.fitness_range = fmax - fmin;
  if (m > 0) {
    const Vector ranges = gmax - gmin;
    const double smallest = ranges.minCoeff();
    if (smallest <= 0.0) {
      c.constraint_range_ratio = kInf;
      c.degenerate_constraint_range = true;
    } else {
      c.constraint_range_ratio = ranges.maxCoeff() / smallest;
    }
  }
  return c;
}

std::string characteristics_csv_header() { return "name,d,type,rho_percent,FR,GR,LI,NI,NE"; }

std::string characteristics_csv_row(const Problem& problem, const ProblemCharacteristics& c) {
  std::ostringstream os;
  os.precision(10);
  os << problem.name << ',' << problem.dim << ',' << problem.objective_type << ',' << 100.0 * c.feasibility_rate
     << ',' << c.fitness_range << ',' << c.constraint_range_ratio << ','
     << problem.count(ConstraintKind::LinearInequality) << ','
     << problem.count(ConstraintKind::NonlinearInequality) << ','
     << problem.count(ConstraintKind::NonlinearEquality);
  return os.str();
}

}  // namespace sacobra
