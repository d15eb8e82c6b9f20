#include "sacobra/plog.hpp"
#include "sacobra/rbf.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace sacobra;

namespace {

Matrix random_points(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  return x;
}

// Plain Gaussian elimination with partial pivoting.
Vector gauss_solve(Matrix a, Vector b) {
  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    a.row(k).swap(a.row(piv));
    std::swap(b[k], b[piv]);
    for (Index i = k + 1; i < n; ++i) {
      const double m = a(i, k) / a(k, k);
      for (Index j = k; j < n; ++j) a(i, j) -= m * a(k, j);
      b[i] -= m * b[k];
    }
  }
  Vector x(n);
  for (Index i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (Index j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

double oracle_predict(const Matrix& pts, const Vector& coef, const Vector& x) {
  const Index n = pts.rows();
  const Index d = pts.cols();
  double s = coef[n];
  for (Index i = 0; i < n; ++i) s += coef[i] * std::pow((pts.row(i).transpose() - x).norm(), 3);
  for (Index j = 0; j < d; ++j) s += coef[n + 1 + j] * x[j];
  return s;
}

}  // namespace

TEST_CASE("cubic surrogate interpolates its centers") {
  for (TailKind tail : {TailKind::Linear, TailKind::LinearPlusSquares}) {
    const Matrix x = random_points(15, 3, 4);
    Vector y(15);
    for (Index i = 0; i < 15; ++i) y[i] = std::sin(3.0 * x(i, 0)) + x(i, 1) * x(i, 2);
    const SurrogateModel m = fit(x, y, KernelKind::cubic(), tail);
    for (Index i = 0; i < 15; ++i) CHECK(predict(m, x.row(i).transpose()) == doctest::Approx(y[i]).epsilon(1e-8));
  }
}

TEST_CASE("gaussian surrogate interpolates its centers") {
  const Matrix x = random_points(10, 2, 9);
  Vector y = x.col(0).array().exp();
  const SurrogateModel m = fit(x, y, KernelKind::gaussian(1.0), TailKind::Linear);
  for (Index i = 0; i < 10; ++i) CHECK(predict(m, x.row(i).transpose()) == doctest::Approx(y[i]).epsilon(1e-6));
  CHECK_THROWS_AS(KernelKind::gaussian(0.0), ConfigError);
}

TEST_CASE("linear tail reproduces affine functions everywhere") {
  const Matrix x = random_points(12, 3, 21);
  const Vector c = (Vector(3) << 1.5, -2.0, 0.25).finished();
  const Vector y = (x * c).array() + 0.7;
  const SurrogateModel m = fit(x, y);
  const Matrix q = random_points(20, 3, 22) * 2.0;
  for (Index i = 0; i < q.rows(); ++i) {
    const Vector p = q.row(i).transpose();
    CHECK(predict(m, p) == doctest::Approx(c.dot(p) + 0.7).epsilon(1e-7));
  }
}

TEST_CASE("squares tail reproduces separable quadratics") {
  const Matrix x = random_points(14, 3, 31);
  auto f = [](const Vector& p) { return 2.0 * p[0] * p[0] - p[1] * p[1] + 0.5 * p[2] + 3.0; };
  Vector y(14);
  for (Index i = 0; i < 14; ++i) y[i] = f(x.row(i).transpose());
  const SurrogateModel m = fit(x, y, KernelKind::cubic(), TailKind::LinearPlusSquares);
  const Matrix q = random_points(20, 3, 32);
  for (Index i = 0; i < q.rows(); ++i) {
    const Vector p = q.row(i).transpose();
    CHECK(predict(m, p) == doctest::Approx(f(p)).epsilon(1e-7));
  }
}

TEST_CASE("predictions are invariant under translation of the inputs") {
  const Matrix x = random_points(10, 2, 41);
  const Vector y = x.col(0).array().square() + x.col(1).array().sin();
  const Vector shift = (Vector(2) << 3.0, -7.0).finished();
  const Matrix xs = x.rowwise() + shift.transpose();
  const SurrogateModel a = fit(x, y);
  const SurrogateModel b = fit(xs, y);
  const Matrix q = random_points(10, 2, 42);
  for (Index i = 0; i < q.rows(); ++i) {
    const Vector p = q.row(i).transpose();
    CHECK(predict(a, p) == doctest::Approx(predict(b, p + shift)).epsilon(1e-8));
  }
}

TEST_CASE("solution matches a dense elimination of the augmented system") {
  for (Index n : {4, 7, 12}) {
    const Index d = 2;
    const Matrix x = random_points(n, d, 50 + static_cast<std::uint64_t>(n));
    Vector y(n);
    for (Index i = 0; i < n; ++i) y[i] = std::cos(2.0 * x(i, 0)) - x(i, 1);

    const Index t = d + 1;
    Matrix a = Matrix::Zero(n + t, n + t);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) a(i, j) = std::pow((x.row(i) - x.row(j)).norm(), 3);
      a(i, n) = a(n, i) = 1.0;
      for (Index k = 0; k < d; ++k) a(i, n + 1 + k) = a(n + 1 + k, i) = x(i, k);
    }
    Vector rhs = Vector::Zero(n + t);
    rhs.head(n) = y;
    const Vector coef = gauss_solve(a, rhs);

    const SurrogateModel m = fit(x, y);
    CAPTURE(n);
    for (Index i = 0; i < n; ++i) CHECK(m.rbf_weights[i] == doctest::Approx(coef[i]).epsilon(1e-6));
    const Matrix q = random_points(8, d, 99);
    for (Index i = 0; i < q.rows(); ++i) {
      const Vector p = q.row(i).transpose();
      CHECK(predict(m, p) == doctest::Approx(oracle_predict(x, coef, p)).epsilon(1e-8));
    }
  }
}

TEST_CASE("three points on a line") {
  Matrix x(3, 1);
  x << -1.0, 0.0, 1.0;
  const Vector y = (Vector(3) << 1.0, 0.0, 1.0).finished();
  const SurrogateModel m = fit(x, y);
  CHECK(predict(m, Vector::Constant(1, 0.5)) == doctest::Approx(0.3125).epsilon(1e-12));
  CHECK(m.rbf_weights[0] == doctest::Approx(0.25));
  CHECK(m.rbf_weights[1] == doctest::Approx(-0.5));
}

TEST_CASE("bundle fits agree with single fits") {
  const Matrix x = random_points(9, 2, 61);
  Matrix y(9, 3);
  y.col(0) = x.col(0);
  y.col(1) = x.col(1).array().square();
  y.col(2) = (x.col(0) + x.col(1)).array().exp();
  const RbfSystem sys(x, KernelKind::cubic(), TailKind::LinearPlusSquares);
  const SurrogateBundle b = sys.fit_all(y);
  const Vector p = (Vector(2) << 0.1, -0.3).finished();
  const Vector all = b.predict(p);
  for (Index k = 0; k < 3; ++k) {
    CHECK(all[k] == doctest::Approx(predict(sys.fit(y.col(k)), p)).epsilon(1e-12));
    CHECK(all[k] == doctest::Approx(predict(b.model(k), p)).epsilon(1e-12));
  }
  double dmin = 0.0;
  Vector out;
  b.predict_into(p, out, &dmin);
  CHECK(dmin == doctest::Approx((x.rowwise() - p.transpose()).rowwise().norm().minCoeff()));
}

TEST_CASE("fit errors") {
  Matrix x(3, 2);
  x << 0, 0, 1, 0, 0, 0;
  CHECK_THROWS_AS(RbfSystem(x, KernelKind::cubic(), TailKind::Linear), DuplicateCenter);
  Matrix few(2, 2);
  few << 0, 0, 1, 1;
  CHECK_THROWS_AS(RbfSystem(few, KernelKind::cubic(), TailKind::Linear), InsufficientDesign);
  CHECK(tail_size(TailKind::Linear, 4) == 5);
  CHECK(tail_size(TailKind::LinearPlusSquares, 4) == 9);
}

TEST_CASE("plog round trip and monotonicity") {
  CHECK(plog(0.0) == 0.0);
  CHECK(plog(std::exp(1.0) - 1.0) == doctest::Approx(1.0));
  CHECK(plog(-(std::exp(2.0) - 1.0)) == doctest::Approx(-2.0));
  Rng rng(5);
  std::vector<double> ys;
  for (int i = 0; i < 2000; ++i) {
    const double y = std::copysign(std::pow(10.0, rng.uniform(-12.0, 12.0)), rng.uniform() - 0.5);
    CHECK(plog_inverse(plog(y)) == doctest::Approx(y).epsilon(1e-12));
    CHECK(plog(-y) == -plog(y));
    ys.push_back(y);
  }
  std::sort(ys.begin(), ys.end());
  for (std::size_t i = 1; i < ys.size(); ++i) {
    if (ys[i] > ys[i - 1]) CHECK(plog(ys[i]) >= plog(ys[i - 1]));
  }
  CHECK(plog(1e-3) > plog(0.0));
  CHECK(plog(0.0) > plog(-1e-3));
}
