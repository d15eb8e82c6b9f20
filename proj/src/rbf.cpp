#include "sacobra/rbf.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>

namespace sacobra {

KernelKind KernelKind::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("Gaussian kernel width must be positive");
  KernelKind k;
  k.type = Type::Gaussian;
  k.width = sigma;
  return k;
}

Index tail_size(TailKind tail, Index dim) { return tail == TailKind::Linear ? dim + 1 : 2 * dim + 1; }

Vector tail_basis(const Vector& x, TailKind tail) {
  const Index d = x.size();
  Vector row(tail_size(tail, d));
  row[0] = 1.0;
  row.segment(1, d) = x;
  if (tail == TailKind::LinearPlusSquares) row.tail(d) = x.array().square();
  return row;
}

double predict(const SurrogateModel& model, const Vector& x) {
  if (x.size() != model.dim()) {
    throw DimensionMismatch("predict: model has dimension " + std::to_string(model.dim()) + ", point has " +
                            std::to_string(x.size()));
  }
  double s = model.tail_coeffs.dot(tail_basis(x, model.tail));
  for (Index i = 0; i < model.size(); ++i) {
    s += model.rbf_weights[i] * model.kernel((model.centers.row(i).transpose() - x).norm());
  }
  return s;
}

RbfSystem::RbfSystem(const Matrix& points, KernelKind kernel, TailKind tail)
    : centers_t_(points.transpose()), kernel_(kernel), tail_(tail) {
  const Index n = points.rows();
  const Index d = points.cols();
  const Index t = tail_size(tail, d);
  if (n < t) throw InsufficientDesign(n, t);

  phi_.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    phi_(j, j) = kernel_(0.0);
    for (Index i = j + 1; i < n; ++i) {
      const double r = (centers_t_.col(i) - centers_t_.col(j)).norm();
      if (r <= kDuplicateTolerance) throw DuplicateCenter(j, i, r);
      phi_(i, j) = phi_(j, i) = kernel_(r);
    }
  }
  poly_.resize(n, t);
  for (Index i = 0; i < n; ++i) poly_.row(i) = tail_basis(centers_t_.col(i), tail).transpose();

  Matrix system = Matrix::Zero(n + t, n + t);
  system.topLeftCorner(n, n) = phi_;
  system.topRightCorner(n, t) = poly_;
  system.bottomLeftCorner(t, n) = poly_.transpose();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(system);
  eigenvectors_ = eig.eigenvectors();
  const Vector& lambda = eig.eigenvalues();
  largest_ = lambda.cwiseAbs().maxCoeff();
  inv_eigenvalues_ = Vector::Zero(lambda.size());
  rank_ = 0;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (std::abs(lambda[i]) > kSingularCutoff * largest_) {
      inv_eigenvalues_[i] = 1.0 / lambda[i];
      ++rank_;
    }
  }
}

Matrix RbfSystem::solve(const Matrix& rhs) const {
  Matrix coeffs = eigenvectors_.transpose() * rhs;
  coeffs = inv_eigenvalues_.asDiagonal() * coeffs;
  return eigenvectors_ * coeffs;
}

SurrogateBundle RbfSystem::fit_all(const Matrix& values) const {
  const Index n = size();
  const Index t = poly_.cols();
  if (values.rows() != n) {
    throw DimensionMismatch("fit: " + std::to_string(values.rows()) + " values for " + std::to_string(n) +
                            " centers");
  }
  Matrix rhs = Matrix::Zero(n + t, values.cols());
  rhs.topRows(n) = values;
  const Matrix solution = solve(rhs);

  SurrogateBundle bundle;
  bundle.centers_t_ = centers_t_;
  bundle.weights_ = solution.topRows(n);
  bundle.tail_ = solution.bottomRows(t);
  bundle.kernel_ = kernel_;
  bundle.tail_kind_ = tail_;
  bundle.residuals_.resize(values.cols());
  bundle.flags_.resize(values.cols());
  const Matrix fitted = phi_ * bundle.weights_ + poly_ * bundle.tail_;
  for (Index j = 0; j < values.cols(); ++j) {
    const double residual = (fitted.col(j) - values.col(j)).cwiseAbs().maxCoeff();
    const double scale = 1.0 + values.col(j).cwiseAbs().maxCoeff();
    bundle.residuals_[j] = residual;
    bundle.flags_[j] = (truncated() || residual > 1e-6 * scale) ? 1 : 0;
  }
  return bundle;
}

SurrogateModel RbfSystem::fit(const Vector& values) const { return fit_all(values).model(0); }

void SurrogateBundle::predict_into(const Vector& x, Vector& out, double* min_distance) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("predict: bundle has dimension " + std::to_string(dim()) + ", point has " +
                            std::to_string(x.size()));
  }
  const Index n = size();
  const Index d = dim();
  scratch_.resize(n);
  double best = kInf;
  for (Index i = 0; i < n; ++i) {
    const double r = (centers_t_.col(i) - x).norm();
    best = std::min(best, r);
    scratch_[i] = kernel_(r);
  }
  out.noalias() = weights_.transpose() * scratch_;
  out += tail_.row(0).transpose();
  out.noalias() += tail_.middleRows(1, d).transpose() * x;
  if (tail_kind_ == TailKind::LinearPlusSquares) {
    out.noalias() += tail_.bottomRows(d).transpose() * x.array().square().matrix();
  }
  if (min_distance != nullptr) *min_distance = best;
}

Vector SurrogateBundle::predict(const Vector& x) const {
  Vector out;
  predict_into(x, out);
  return out;
}

SurrogateModel SurrogateBundle::model(Index output) const {
  SurrogateModel m;
  m.centers = centers_t_.transpose();
  m.rbf_weights = weights_.col(output);
  m.tail_coeffs = tail_.col(output);
  m.kernel = kernel_;
  m.tail = tail_kind_;
  m.fit_residual = residuals_[output];
  m.condition_flag = flags_[output] != 0;
  return m;
}

SurrogateModel fit(const Matrix& points, const Vector& values, KernelKind kernel, TailKind tail) {
  return RbfSystem(points, kernel, tail).fit(values);
}

std::string to_json(const SurrogateModel& model) {
  nlohmann::json j;
  j["kernel"] = model.kernel.type == KernelKind::Type::Cubic ? "cubic" : "gaussian";
  if (model.kernel.type == KernelKind::Type::Gaussian) j["width"] = model.kernel.width;
  j["tail"] = model.tail == TailKind::Linear ? "linear" : "linear+squares";
  nlohmann::json centers = nlohmann::json::array();
  for (Index i = 0; i < model.centers.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(model.centers.cols()));
    for (Index k = 0; k < model.centers.cols(); ++k) row[static_cast<std::size_t>(k)] = model.centers(i, k);
    centers.push_back(std::move(row));
  }
  j["centers"] = std::move(centers);
  j["rbf_weights"] = std::vector<double>(model.rbf_weights.data(), model.rbf_weights.data() + model.rbf_weights.size());
  j["tail_coeffs"] = std::vector<double>(model.tail_coeffs.data(), model.tail_coeffs.data() + model.tail_coeffs.size());
  j["fit_residual"] = model.fit_residual;
  j["condition_flag"] = model.condition_flag;
  return j.dump();
}

}  // namespace sacobra
