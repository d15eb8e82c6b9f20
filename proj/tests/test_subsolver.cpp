#include <doctest.h>

#include "sacobra/cobyla.hpp"

#include <Eigen/Dense>

#include <sstream>

using namespace sacobra;

namespace {

SubproblemSpec box_spec(Index d, double lo, double hi, const Vector& start) {
  SubproblemSpec spec;
  spec.lower = Vector::Constant(d, lo);
  spec.upper = Vector::Constant(d, hi);
  spec.start = start;
  spec.max_inner_evals = 200 * d;
  return spec;
}

// Dense active-set oracle for min 0.5 x'Hx + c'x s.t. Ax <= b: enumerate all
// active sets, solve the KKT system, keep the KKT point.
Vector qp_oracle(const Matrix& H, const Vector& c, const Matrix& A, const Vector& b) {
  const Index d = H.rows();
  const Index m = A.rows();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<Index> act;
    for (Index i = 0; i < m; ++i)
      if (mask & (1 << i)) act.push_back(i);
    const Index k = static_cast<Index>(act.size());
    Matrix kkt = Matrix::Zero(d + k, d + k);
    Vector rhs(d + k);
    kkt.topLeftCorner(d, d) = H;
    rhs.head(d) = -c;
    for (Index j = 0; j < k; ++j) {
      kkt.block(0, d + j, d, 1) = A.row(act[j]).transpose();
      kkt.block(d + j, 0, 1, d) = A.row(act[j]);
      rhs[d + j] = b[act[j]];
    }
    const Vector sol = kkt.fullPivLu().solve(rhs);
    const Vector x = sol.head(d);
    bool ok = ((A * x - b).array() <= 1e-9).all();
    for (Index j = 0; j < k; ++j) ok = ok && sol[d + j] >= -1e-9;
    if (ok) return x;
  }
  FAIL("oracle found no KKT point");
  return {};
}

}  // namespace

TEST_CASE("merit order") {
  SubsolverResult feas5{Vector(), 5.0, 0.0, 0, SubsolverStatus::Converged};
  SubsolverResult infeas1{Vector(), 1.0, 0.5, 0, SubsolverStatus::Converged};
  CHECK(merit_order(feas5, infeas1));
  CHECK_FALSE(merit_order(infeas1, feas5));

  SubsolverResult feas1{Vector(), 1.0, 0.0, 0, SubsolverStatus::Converged};
  SubsolverResult feas2{Vector(), 2.0, 1e-10, 0, SubsolverStatus::Converged};
  CHECK(merit_order(feas1, feas2));
  CHECK_FALSE(merit_order(feas2, feas1));

  SubsolverResult v1{Vector(), 9.0, 0.1, 0, SubsolverStatus::Converged};
  SubsolverResult v2{Vector(), 0.0, 0.2, 0, SubsolverStatus::Converged};
  CHECK(merit_order(v1, v2));
  CHECK_FALSE(merit_order(v2, v1));
}

TEST_CASE("unconstrained sphere") {
  for (Index d : {1, 2, 5, 10}) {
    SubproblemSpec spec = box_spec(d, -2.0, 2.0, Vector::Ones(d));
    spec.evaluate = [](const Vector& x, Vector&) { return x.squaredNorm(); };
    const SubsolverResult r = minimize(spec);
    CHECK(r.x.cwiseAbs().maxCoeff() <= 1e-4);
    CHECK(r.max_violation == 0.0);
  }
}

TEST_CASE("linear objective on a constraint line") {
  SubproblemSpec spec = box_spec(2, 0.0, 2.0, Vector::Constant(2, 1.5));
  spec.num_constraints = 1;
  spec.evaluate = [](const Vector& x, Vector& g) {
    g[0] = 1.0 - x[0] - x[1];
    return x[0] + x[1];
  };
  const SubsolverResult r = minimize(spec);
  CHECK(r.objective_value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.max_violation <= 1e-9);
}

TEST_CASE("distance constraint stays active") {
  const Vector prev = Vector::Constant(3, 0.2);
  SubproblemSpec spec = box_spec(3, -1.0, 1.0, prev);
  spec.num_constraints = 1;
  spec.evaluate = [&](const Vector& x, Vector& g) {
    g[0] = 0.3 - (x - prev).norm();
    return x[0];
  };
  const SubsolverResult r = minimize(spec);
  CHECK((r.x - prev).norm() >= 0.3 - 1e-6);
  CHECK(r.x[0] <= prev[0] - 0.3 + 1e-3);
}

TEST_CASE("matches active-set oracle on random convex quadratics") {
  Rng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = 1 + static_cast<Index>(rng.below(8));
    const Index m = static_cast<Index>(rng.below(4));
    Matrix B(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) B(i, j) = rng.uniform(-1.0, 1.0);
    const Matrix H = B * B.transpose() + 0.5 * Matrix::Identity(d, d);
    Vector c(d), x0(d);
    for (Index i = 0; i < d; ++i) {
      c[i] = rng.uniform(-2.0, 2.0);
      x0[i] = rng.uniform(-0.5, 0.5);
    }
    Matrix A(m, d);
    Vector b(m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < d; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
      b[i] = A.row(i).dot(x0) + rng.uniform(0.0, 0.5);
    }
    const Vector oracle = qp_oracle(H, c, A, b);
    if (oracle.cwiseAbs().maxCoeff() > 4.0) continue;

    SubproblemSpec spec = box_spec(d, -5.0, 5.0, Vector::Zero(d));
    spec.num_constraints = m;
    spec.max_inner_evals = 2000 * d;
    spec.initial_radius = 0.5;
    spec.evaluate = [&](const Vector& x, Vector& g) {
      if (m > 0) g = A * x - b;
      return 0.5 * x.dot(H * x) + c.dot(x);
    };
    const SubsolverResult r = minimize(spec);
    INFO("trial " << trial << " d=" << d << " m=" << m);
    CHECK((r.x - oracle).cwiseAbs().maxCoeff() <= 1e-3);
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("budget respect and determinism") {
  const Index d = 4;
  Index calls = 0;
  SubproblemSpec spec = box_spec(d, -1.0, 1.0, Vector::Constant(d, 0.9));
  spec.num_constraints = 2;
  spec.max_inner_evals = 50 * d;
  spec.evaluate = [&](const Vector& x, Vector& g) {
    ++calls;
    g[0] = x.sum() - 0.5;
    g[1] = 0.1 - x.squaredNorm();
    return std::cos(3.0 * x[0]) + x.squaredNorm();
  };
  const SubsolverResult r1 = minimize(spec);
  CHECK(calls <= spec.max_inner_evals);
  CHECK(r1.inner_evals_used == calls);
  const SubsolverResult r2 = minimize(spec);
  CHECK(r1.x == r2.x);
  CHECK(r1.objective_value == r2.objective_value);
}

TEST_CASE("result is clipped to the box") {
  SubproblemSpec spec = box_spec(2, 0.0, 1.0, Vector::Constant(2, 0.5));
  spec.evaluate = [](const Vector& x, Vector&) { return -x.sum(); };
  const SubsolverResult r = minimize(spec);
  CHECK((r.x.array() >= 0.0).all());
  CHECK((r.x.array() <= 1.0).all());
  CHECK(r.objective_value == doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("errors") {
  SubproblemSpec spec = box_spec(2, -1.0, 1.0, Vector::Constant(2, 2.0));
  spec.evaluate = [](const Vector& x, Vector&) { return x.sum(); };
  CHECK_THROWS_AS(minimize(spec), ConfigError);
  spec.start = Vector::Zero(2);
  spec.max_inner_evals = 10;
  CHECK_THROWS_AS(minimize(spec), ConfigError);
  spec.max_inner_evals = 400;
  spec.evaluate = [](const Vector& x, Vector&) { return x[0] > 0.05 ? std::nan("") : x.sum(); };
  try {
    minimize(spec);
    FAIL("expected NonFiniteSurrogate");
  } catch (const NonFiniteSurrogate& e) {
    CHECK(e.point()[0] > 0.05);
  }
}

TEST_CASE("trace rows") {
  std::ostringstream trace;
  SubproblemSpec spec = box_spec(2, -1.0, 1.0, Vector::Constant(2, 0.5));
  spec.evaluate = [](const Vector& x, Vector&) { return x.squaredNorm(); };
  spec.trace = &trace;
  const SubsolverResult r = minimize(spec);
  const std::string text = trace.str();
  CHECK(std::count(text.begin(), text.end(), '\n') >= r.inner_evals_used - 1);
}

TEST_CASE("constant violated constraint") {
  SubproblemSpec spec = box_spec(2, -1.0, 1.0, Vector::Constant(2, 0.3));
  spec.num_constraints = 2;
  spec.evaluate = [](const Vector& x, Vector& g) {
    g[0] = 1.0;
    g[1] = x[0] - 0.5;
    return x.squaredNorm();
  };
  const SubsolverResult r = minimize(spec);
  CHECK(r.max_violation == doctest::Approx(1.0));
  CHECK(r.inner_evals_used <= spec.max_inner_evals);
}
