#pragma once

#include "sacobra/types.hpp"

#include <cmath>
#include <string>

namespace sacobra {

struct KernelKind {
  enum class Type { Cubic, Gaussian };
  Type type = Type::Cubic;
  double width = 1.0;  // sigma, Gaussian only

  static KernelKind cubic() { return {}; }
  static KernelKind gaussian(double sigma);

  double operator()(double r) const {
    if (type == Type::Cubic) return r * r * r;
    return std::exp(-r * r / (2.0 * width * width));
  }
};

enum class TailKind { Linear, LinearPlusSquares };

// Number of polynomial tail coefficients: d+1 or 2d+1.
Index tail_size(TailKind tail, Index dim);

inline constexpr double kSingularCutoff = 1e-12;
inline constexpr double kDuplicateTolerance = 1e-12;

// s(x) = sum_i w_i phi(|x - u_i|) + c0 + c.x [+ e.x^2]
struct SurrogateModel {
  Matrix centers;  // n x d, one center per row
  Vector rbf_weights;
  Vector tail_coeffs;  // (c0, c_1..c_d[, e_1..e_d])
  KernelKind kernel;
  TailKind tail = TailKind::Linear;
  double fit_residual = 0.0;
  bool condition_flag = false;

  Index dim() const { return centers.cols(); }
  Index size() const { return centers.rows(); }
};

double predict(const SurrogateModel& model, const Vector& x);

// Several surrogates sharing one set of centers, e.g. objective and all
// constraints of one optimizer iteration. Column j of the weight/tail
// matrices belongs to output j.
class SurrogateBundle {
 public:
  SurrogateBundle() = default;

  Index dim() const { return centers_t_.rows(); }
  Index size() const { return centers_t_.cols(); }
  Index outputs() const { return weights_.cols(); }

  // Writes all outputs at x into `out` (resized). When min_distance is
  // non-null it receives min_i |x - u_i| computed from the same pass.
  void predict_into(const Vector& x, Vector& out, double* min_distance = nullptr) const;
  Vector predict(const Vector& x) const;

  SurrogateModel model(Index output) const;
  double fit_residual(Index output) const { return residuals_[output]; }
  bool condition_flag(Index output) const { return flags_[output] != 0; }
  const Matrix& centers_transposed() const { return centers_t_; }

 private:
  friend class RbfSystem;
  Matrix centers_t_;  // d x n
  Matrix weights_;    // n x k
  Matrix tail_;       // t x k
  KernelKind kernel_;
  TailKind tail_kind_ = TailKind::Linear;
  Vector residuals_;
  Eigen::VectorXi flags_;
  mutable Vector scratch_;
};

// Factorization of the augmented interpolation matrix
//   [ Phi  P ] [ w ]   [ F ]
//   [ P^T  0 ] [ c ] = [ 0 ]
// for a fixed set of centers. The matrix is symmetric, so its SVD is obtained
// from the eigendecomposition (singular values are |eigenvalues|); singular
// values below kSingularCutoff times the largest are discarded.
class RbfSystem {
 public:
  // Throws InsufficientDesign or DuplicateCenter.
  RbfSystem(const Matrix& points, KernelKind kernel, TailKind tail);

  SurrogateModel fit(const Vector& values) const;
  SurrogateBundle fit_all(const Matrix& values) const;

  Index size() const { return centers_t_.cols(); }
  Index dim() const { return centers_t_.rows(); }
  Index rank() const { return rank_; }
  bool truncated() const { return rank_ < inv_eigenvalues_.size(); }
  double largest_singular_value() const { return largest_; }
  const KernelKind& kernel() const { return kernel_; }
  TailKind tail() const { return tail_; }

 private:
  Matrix solve(const Matrix& rhs) const;

  Matrix centers_t_;
  KernelKind kernel_;
  TailKind tail_;
  Matrix phi_;    // n x n
  Matrix poly_;   // n x t
  Matrix eigenvectors_;
  Vector inv_eigenvalues_;  // zero where discarded
  Index rank_ = 0;
  double largest_ = 0.0;
};

// Convenience wrapper: factor and solve in one call.
SurrogateModel fit(const Matrix& points, const Vector& values, KernelKind kernel = KernelKind::cubic(),
                   TailKind tail = TailKind::Linear);

// Polynomial tail row (1, x[, x^2]) for a point.
Vector tail_basis(const Vector& x, TailKind tail);

std::string to_json(const SurrogateModel& model);

}  // namespace sacobra
