#pragma once

#include "sacobra/rbf.hpp"

#include <string>

namespace sacobra {

// One-dimensional RBF fits illustrating two modelling pitfalls: large input
// magnitudes (ill-conditioned systems) and steep outputs (oscillation).
// Both demos use a cubic kernel with a linear tail.

struct ScalingDemo {
  double scale = 1.0;
  double rmse_raw = 0.0;
  double rmse_rescaled = 0.0;
  Vector design;          // design points in original coordinates
  Vector grid;            // test grid in original coordinates
  Vector truth;           // f on the grid
  Vector raw_prediction;  // model fitted in original coordinates
  Vector rescaled_prediction;
};

// f(x) = 3x/S + 1 on [0, 2S]. Design: 5 equispaced points at
// S * {0.25, 0.5, 0.75, 1.0, 1.25}; test grid: 201 equispaced points on
// [0, 2S], so the right half of the grid is extrapolation. The rescaled fit
// maps [0, 2S] affinely onto [-1, 1] first.
ScalingDemo demo_scaling_pitfall(double scale);

struct PlogDemo {
  double rmse_direct = 0.0;
  double rmse_plog = 0.0;
  Vector design;
  Vector design_values;
  Vector plog_at_design;  // back-transformed plog fit at the design points
  Vector grid;
  Vector truth;
  Vector direct_prediction;
  Vector plog_prediction;
};

// f(x) = exp(x^2) on [-3, 3]. Design: 7 equispaced points on [-3, 3]
// (including both ends); test grid: 601 equispaced points on [-3, 3].
PlogDemo demo_plog_benefit();

// Two-column CSV (x, prediction) with a header line.
std::string curve_csv(const Vector& x, const Vector& y, const std::string& y_name);

}  // namespace sacobra
