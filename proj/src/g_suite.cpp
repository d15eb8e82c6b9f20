#include "sacobra/g_suite.hpp"

#include <cmath>
#include <numbers>

namespace sacobra {

namespace {

using Kind = ConstraintKind;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double value : values) v[i++] = value;
  return v;
}

Problem make_g01() {
  Problem p;
  p.name = "G01";
  p.dim = 13;
  p.objective_type = "quadratic";
  p.lower = Vector::Zero(13);
  p.upper = Vector::Ones(13);
  p.upper.segment(9, 3).setConstant(100.0);
  p.objective = [](const Vector& x) {
    return 5.0 * x.head(4).sum() - 5.0 * x.head(4).squaredNorm() - x.segment(4, 9).sum();
  };
  // Indices are zero-based: x[9..11] are the wide variables.
  p.constraints = {
      [](const Vector& x) { return 2 * x[0] + 2 * x[1] + x[9] + x[10] - 10; },
      [](const Vector& x) { return 2 * x[0] + 2 * x[2] + x[9] + x[11] - 10; },
      [](const Vector& x) { return 2 * x[1] + 2 * x[2] + x[10] + x[11] - 10; },
      [](const Vector& x) { return -8 * x[0] + x[9]; },
      [](const Vector& x) { return -8 * x[1] + x[10]; },
      [](const Vector& x) { return -8 * x[2] + x[11]; },
      [](const Vector& x) { return -2 * x[3] - x[4] + x[9]; },
      [](const Vector& x) { return -2 * x[5] - x[6] + x[10]; },
      [](const Vector& x) { return -2 * x[7] - x[8] + x[11]; },
  };
  p.kinds.assign(9, Kind::LinearInequality);
  p.optimum_value = -15.0;
  p.optimum_point = vec({1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3, 3, 1});
  return p;
}

Problem make_g03(const std::vector<EqualityDirection>& directions) {
  constexpr Index n = 20;
  Problem p;
  p.name = "G03";
  p.dim = n;
  p.objective_type = "nonlinear";
  p.lower = Vector::Zero(n);
  p.upper = Vector::Ones(n);
  const double scale = std::pow(std::sqrt(static_cast<double>(n)), static_cast<double>(n));
  p.objective = [scale](const Vector& x) { return -scale * x.prod(); };
  p.constraints = convert_equalities({[](const Vector& x) { return x.squaredNorm() - 1.0; }}, directions);
  p.kinds = {Kind::NonlinearEquality};
  p.optimum_value = -1.0;
  p.optimum_point = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  return p;
}

Problem make_g04() {
  Problem p;
  p.name = "G04";
  p.dim = 5;
  p.objective_type = "quadratic";
  p.lower = vec({78, 33, 27, 27, 27});
  p.upper = vec({102, 45, 45, 45, 45});
  p.objective = [](const Vector& x) {
    return 5.3578547 * x[2] * x[2] + 0.8356891 * x[0] * x[4] + 37.293239 * x[0] - 40792.141;
  };
  auto u = [](const Vector& x) {
    return 85.334407 + 0.0056858 * x[1] * x[4] + 0.0006262 * x[0] * x[3] - 0.0022053 * x[2] * x[4];
  };
  auto v = [](const Vector& x) {
    return 80.51249 + 0.0071317 * x[1] * x[4] + 0.0029955 * x[0] * x[1] + 0.0021813 * x[2] * x[2];
  };
  auto w = [](const Vector& x) {
    return 9.300961 + 0.0047026 * x[2] * x[4] + 0.0012547 * x[0] * x[2] + 0.0019085 * x[2] * x[3];
  };
  p.constraints = {
      [u](const Vector& x) { return u(x) - 92.0; },  [u](const Vector& x) { return -u(x); },
      [v](const Vector& x) { return v(x) - 110.0; }, [v](const Vector& x) { return 90.0 - v(x); },
      [w](const Vector& x) { return w(x) - 25.0; },  [w](const Vector& x) { return 20.0 - w(x); },
  };
  p.kinds.assign(6, Kind::NonlinearInequality);
  p.optimum_value = -30665.538671783;
  p.optimum_point = vec({78, 33, 29.995256025682, 45, 36.775812905788});
  return p;
}

Problem make_g05(const std::vector<EqualityDirection>& directions) {
  Problem p;
  p.name = "G05";
  p.dim = 4;
  p.objective_type = "nonlinear";
  p.lower = vec({0, 0, -0.55, -0.55});
  p.upper = vec({1200, 1200, 0.55, 0.55});
  p.objective = [](const Vector& x) {
    return 3 * x[0] + 1e-6 * std::pow(x[0], 3) + 2 * x[1] + (2e-6 / 3.0) * std::pow(x[1], 3);
  };
  std::vector<ScalarFunction> equalities = {
      [](const Vector& x) { return 1000 * std::sin(-x[2] - 0.25) + 1000 * std::sin(-x[3] - 0.25) + 894.8 - x[0]; },
      [](const Vector& x) { return 1000 * std::sin(x[2] - 0.25) + 1000 * std::sin(x[2] - x[3] - 0.25) + 894.8 - x[1]; },
      [](const Vector& x) { return 1000 * std::sin(x[3] - 0.25) + 1000 * std::sin(x[3] - x[2] - 0.25) + 1294.8; },
  };
  p.constraints = {
      [](const Vector& x) { return -x[3] + x[2] - 0.55; },
      [](const Vector& x) { return -x[2] + x[3] - 0.55; },
  };
  for (auto& g : convert_equalities(equalities, directions)) p.constraints.push_back(std::move(g));
  p.kinds = {Kind::LinearInequality, Kind::LinearInequality, Kind::NonlinearEquality, Kind::NonlinearEquality,
             Kind::NonlinearEquality};
  p.optimum_value = 5126.4967140071;
  p.optimum_point = vec({679.945148297028709, 1026.06697600004691, 0.118876369094410433, -0.39623348521517826});
  return p;
}

Problem make_g06() {
  Problem p;
  p.name = "G06";
  p.dim = 2;
  p.objective_type = "nonlinear";
  p.lower = vec({13, 0});
  p.upper = vec({100, 100});
  p.objective = [](const Vector& x) { return std::pow(x[0] - 10, 3) + std::pow(x[1] - 20, 3); };
  p.constraints = {
      [](const Vector& x) { return -std::pow(x[0] - 5, 2) - std::pow(x[1] - 5, 2) + 100; },
      [](const Vector& x) { return std::pow(x[0] - 6, 2) + std::pow(x[1] - 5, 2) - 82.81; },
  };
  p.kinds.assign(2, Kind::NonlinearInequality);
  p.optimum_value = -6961.81387558015;
  p.optimum_point = vec({14.09500000000000064, 0.8429607892154795668});
  return p;
}

Problem make_g07() {
  Problem p;
  p.name = "G07";
  p.dim = 10;
  p.objective_type = "quadratic";
  p.lower = Vector::Constant(10, -10);
  p.upper = Vector::Constant(10, 10);
  p.objective = [](const Vector& x) {
    return x[0] * x[0] + x[1] * x[1] + x[0] * x[1] - 14 * x[0] - 16 * x[1] + std::pow(x[2] - 10, 2) +
           4 * std::pow(x[3] - 5, 2) + std::pow(x[4] - 3, 2) + 2 * std::pow(x[5] - 1, 2) + 5 * x[6] * x[6] +
           7 * std::pow(x[7] - 11, 2) + 2 * std::pow(x[8] - 10, 2) + std::pow(x[9] - 7, 2) + 45;
  };
  p.constraints = {
      [](const Vector& x) { return -105 + 4 * x[0] + 5 * x[1] - 3 * x[6] + 9 * x[7]; },
      [](const Vector& x) { return 10 * x[0] - 8 * x[1] - 17 * x[6] + 2 * x[7]; },
      [](const Vector& x) { return -8 * x[0] + 2 * x[1] + 5 * x[8] - 2 * x[9] - 12; },
      [](const Vector& x) {
        return 3 * std::pow(x[0] - 2, 2) + 4 * std::pow(x[1] - 3, 2) + 2 * x[2] * x[2] - 7 * x[3] - 120;
      },
      [](const Vector& x) { return 5 * x[0] * x[0] + 8 * x[1] + std::pow(x[2] - 6, 2) - 2 * x[3] - 40; },
      [](const Vector& x) {
        return x[0] * x[0] + 2 * std::pow(x[1] - 2, 2) - 2 * x[0] * x[1] + 14 * x[4] - 6 * x[5];
      },
      [](const Vector& x) {
        return 0.5 * std::pow(x[0] - 8, 2) + 2 * std::pow(x[1] - 4, 2) + 3 * x[4] * x[4] - x[5] - 30;
      },
      [](const Vector& x) { return -3 * x[0] + 6 * x[1] + 12 * std::pow(x[8] - 8, 2) - 7 * x[9]; },
  };
  p.kinds = {Kind::LinearInequality,    Kind::LinearInequality,    Kind::LinearInequality,
             Kind::NonlinearInequality, Kind::NonlinearInequality, Kind::NonlinearInequality,
             Kind::NonlinearInequality, Kind::NonlinearInequality};
  p.optimum_value = 24.30620906818;
  p.optimum_point = vec({2.17199634142692, 2.3636830416034, 8.77392573913157, 5.09598443745173, 0.990654756560493,
                         1.43057392853463, 1.32164415364306, 9.82872576524495, 8.2800915887356, 8.3759266477347});
  return p;
}

Problem make_g08() {
  Problem p;
  p.name = "G08";
  p.dim = 2;
  p.objective_type = "nonlinear";
  p.lower = vec({0, 0});
  p.upper = vec({10, 10});
  p.objective = [](const Vector& x) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double denom = std::pow(x[0], 3) * (x[0] + x[1]);
    if (denom == 0.0) return 0.0;
    return -std::pow(std::sin(two_pi * x[0]), 3) * std::sin(two_pi * x[1]) / denom;
  };
  p.constraints = {
      [](const Vector& x) { return x[0] * x[0] - x[1] + 1; },
      [](const Vector& x) { return 1 - x[0] + std::pow(x[1] - 4, 2); },
  };
  p.kinds.assign(2, Kind::NonlinearInequality);
  p.optimum_value = -0.0958250414180359;
  p.optimum_point = vec({1.22797135260752599, 4.24537336612274885});
  return p;
}

Problem make_g09() {
  Problem p;
  p.name = "G09";
  p.dim = 7;
  p.objective_type = "nonlinear";
  p.lower = Vector::Constant(7, -10);
  p.upper = Vector::Constant(7, 10);
  p.objective = [](const Vector& x) {
    return std::pow(x[0] - 10, 2) + 5 * std::pow(x[1] - 12, 2) + std::pow(x[2], 4) + 3 * std::pow(x[3] - 11, 2) +
           10 * std::pow(x[4], 6) + 7 * x[5] * x[5] + std::pow(x[6], 4) - 4 * x[5] * x[6] - 10 * x[5] - 8 * x[6];
  };
  p.constraints = {
      [](const Vector& x) {
        return -127 + 2 * x[0] * x[0] + 3 * std::pow(x[1], 4) + x[2] + 4 * x[3] * x[3] + 5 * x[4];
      },
      [](const Vector& x) { return -282 + 7 * x[0] + 3 * x[1] + 10 * x[2] * x[2] + x[3] - x[4]; },
      [](const Vector& x) { return -196 + 23 * x[0] + x[1] * x[1] + 6 * x[5] * x[5] - 8 * x[6]; },
      [](const Vector& x) {
        return 4 * x[0] * x[0] + x[1] * x[1] - 3 * x[0] * x[1] + 2 * x[2] * x[2] + 5 * x[5] - 11 * x[6];
      },
  };
  p.kinds.assign(4, Kind::NonlinearInequality);
  p.optimum_value = 680.630057374402;
  p.optimum_point = vec({2.33049935147405174, 1.95137236847114592, -0.477541399510615805, 4.36572624923625874,
                         -0.624486959100388983, 1.03813099410962173, 1.5942266780671519});
  return p;
}

Problem make_g10() {
  Problem p;
  p.name = "G10";
  p.dim = 8;
  p.objective_type = "linear";
  p.lower = vec({100, 1000, 1000, 10, 10, 10, 10, 10});
  p.upper = vec({10000, 10000, 10000, 1000, 1000, 1000, 1000, 1000});
  p.objective = [](const Vector& x) { return x[0] + x[1] + x[2]; };
  p.constraints = {
      [](const Vector& x) { return -1 + 0.0025 * (x[3] + x[5]); },
      [](const Vector& x) { return -1 + 0.0025 * (x[4] + x[6] - x[3]); },
      [](const Vector& x) { return -1 + 0.01 * (x[7] - x[4]); },
      [](const Vector& x) { return -x[0] * x[5] + 833.33252 * x[3] + 100 * x[0] - 83333.333; },
      [](const Vector& x) { return -x[1] * x[6] + 1250 * x[4] + x[1] * x[3] - 1250 * x[3]; },
      [](const Vector& x) { return -x[2] * x[7] + 1250000 + x[2] * x[4] - 2500 * x[4]; },
  };
  p.kinds = {Kind::LinearInequality,    Kind::LinearInequality,    Kind::LinearInequality,
             Kind::NonlinearInequality, Kind::NonlinearInequality, Kind::NonlinearInequality};
  p.optimum_value = 7049.24802052867;
  p.optimum_point = vec({579.306685017979589, 1359.97067807935605, 5109.97065743133317, 182.01769963061534,
                         295.601173702746792, 217.982300369384632, 286.41652592786852, 395.601173702746735});
  return p;
}

Problem make_g11(const std::vector<EqualityDirection>& directions) {
  Problem p;
  p.name = "G11";
  p.dim = 2;
  p.objective_type = "linear";
  p.lower = vec({-1, -1});
  p.upper = vec({1, 1});
  p.objective = [](const Vector& x) { return x[0] * x[0] + std::pow(x[1] - 1, 2); };
  p.constraints = convert_equalities({[](const Vector& x) { return x[1] - x[0] * x[0]; }}, directions);
  p.kinds = {Kind::NonlinearEquality};
  p.optimum_value = 0.75;
  p.optimum_point = vec({1.0 / std::numbers::sqrt2, 0.5});
  return p;
}

}  // namespace

Problem make_g02(Index dim) {
  Problem p;
  p.name = dim == 10 ? "G02" : "G02d" + std::to_string(dim);
  p.dim = dim;
  p.objective_type = "nonlinear";
  p.lower = Vector::Zero(dim);
  p.upper = Vector::Constant(dim, 10.0);
  p.objective = [](const Vector& x) {
    const Vector c = x.array().cos();
    const double num = std::abs(c.array().pow(4).sum() - 2.0 * c.array().square().prod());
    const double den = std::sqrt((Vector::LinSpaced(x.size(), 1.0, static_cast<double>(x.size())).array() *
                                  x.array().square()).sum());
    if (den == 0.0) return 0.0;
    return -num / den;
  };
  p.constraints = {
      [](const Vector& x) { return 0.75 - x.prod(); },
      [](const Vector& x) { return x.sum() - 7.5 * static_cast<double>(x.size()); },
  };
  p.kinds = {Kind::NonlinearInequality, Kind::LinearInequality};
  if (dim == 20) p.optimum_value = -0.80361910412559;
  return p;
}

Problem make_g_problem(const std::string& name, const GSuiteDirections& directions) {
  if (name == "G01") return make_g01();
  if (name == "G02") return make_g02(10);
  if (name == "G02d20") return make_g02(20);
  if (name == "G03") return make_g03(directions.g03);
  if (name == "G04") return make_g04();
  if (name == "G05") return make_g05(directions.g05);
  if (name == "G06") return make_g06();
  if (name == "G07") return make_g07();
  if (name == "G08") return make_g08();
  if (name == "G09") return make_g09();
  if (name == "G10") return make_g10();
  if (name == "G11") return make_g11(directions.g11);
  throw ConfigError("unknown G-problem '" + name + "'");
}

std::vector<std::string> g_suite_names(bool include_g02_20) {
  std::vector<std::string> names = {"G01", "G02", "G03", "G04", "G05", "G06",
                                    "G07", "G08", "G09", "G10", "G11"};
  if (include_g02_20) names.push_back("G02d20");
  return names;
}

std::vector<Problem> make_g_suite(const GSuiteDirections& directions) {
  std::vector<Problem> suite;
  for (const auto& name : g_suite_names()) suite.push_back(make_g_problem(name, directions));
  return suite;
}

}  // namespace sacobra
