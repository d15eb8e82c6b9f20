#include "sacobra/pitfalls.hpp"

#include "sacobra/plog.hpp"

#include <cmath>
#include <sstream>

namespace sacobra {

namespace {

double rmse(const Vector& a, const Vector& b) { return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size())); }

Vector predict_grid(const SurrogateModel& model, const Vector& grid) {
  Vector out(grid.size());
  Vector x(1);
  for (Index i = 0; i < grid.size(); ++i) {
    x[0] = grid[i];
    out[i] = predict(model, x);
  }
  return out;
}

}  // namespace

ScalingDemo demo_scaling_pitfall(double scale) {
  if (!(scale > 0.0)) throw ConfigError("demo_scaling_pitfall: scale must be positive");
  ScalingDemo demo;
  demo.scale = scale;
  demo.design = Vector::LinSpaced(5, 0.25 * scale, 1.25 * scale);
  demo.grid = Vector::LinSpaced(201, 0.0, 2.0 * scale);
  auto f = [scale](double x) { return 3.0 * x / scale + 1.0; };
  demo.truth = demo.grid.unaryExpr(f);
  const Vector values = demo.design.unaryExpr(f);

  const SurrogateModel raw = fit(demo.design, values, KernelKind::cubic(), TailKind::Linear);
  demo.raw_prediction = predict_grid(raw, demo.grid);

  auto to_unit = [scale](double x) { return x / scale - 1.0; };
  const SurrogateModel rescaled = fit(demo.design.unaryExpr(to_unit), values, KernelKind::cubic(), TailKind::Linear);
  demo.rescaled_prediction = predict_grid(rescaled, demo.grid.unaryExpr(to_unit));

  demo.rmse_raw = rmse(demo.raw_prediction, demo.truth);
  demo.rmse_rescaled = rmse(demo.rescaled_prediction, demo.truth);
  return demo;
}

PlogDemo demo_plog_benefit() {
  PlogDemo demo;
  demo.design = Vector::LinSpaced(7, -3.0, 3.0);
  demo.grid = Vector::LinSpaced(601, -3.0, 3.0);
  auto f = [](double x) { return std::exp(x * x); };
  demo.truth = demo.grid.unaryExpr(f);
  demo.design_values = demo.design.unaryExpr(f);

  const SurrogateModel direct = fit(demo.design, demo.design_values, KernelKind::cubic(), TailKind::Linear);
  demo.direct_prediction = predict_grid(direct, demo.grid);

  const Vector transformed = demo.design_values.unaryExpr([](double y) { return plog(y); });
  const SurrogateModel logged = fit(demo.design, transformed, KernelKind::cubic(), TailKind::Linear);
  auto back = [](double z) { return plog_inverse(z); };
  demo.plog_prediction = predict_grid(logged, demo.grid).unaryExpr(back);
  demo.plog_at_design = predict_grid(logged, demo.design).unaryExpr(back);

  demo.rmse_direct = rmse(demo.direct_prediction, demo.truth);
  demo.rmse_plog = rmse(demo.plog_prediction, demo.truth);
  return demo;
}

std::string curve_csv(const Vector& x, const Vector& y, const std::string& y_name) {
  std::ostringstream os;
  os.precision(17);
  os << "x," << y_name << '\n';
  for (Index i = 0; i < x.size(); ++i) os << x[i] << ',' << y[i] << '\n';
  return os.str();
}

}  // namespace sacobra
