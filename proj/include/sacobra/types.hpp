#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace sacobra {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BoundsViolation : public Error {
 public:
  BoundsViolation(const std::string& problem, Index coordinate, double value, double lower, double upper);
  Index coordinate() const noexcept { return coordinate_; }

 private:
  Index coordinate_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DuplicateCenter : public Error {
 public:
  DuplicateCenter(Index first, Index second, double distance);
};

class InsufficientDesign : public Error {
 public:
  InsufficientDesign(Index have, Index need);
};

class NonFiniteSurrogate : public Error {
 public:
  explicit NonFiniteSurrogate(const Vector& x);
  const Vector& point() const noexcept { return x_; }

 private:
  Vector x_;
};

// Deterministic 64-bit generator with platform-independent derived draws.
// std::uniform_real_distribution is implementation-defined, so the draws are
// built directly from the raw 64-bit output (splitmix64 seeding, xoshiro256**).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

// Stable 64-bit hash (FNV-1a) for deriving seeds from names.
std::uint64_t stable_hash(const std::string& text, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace sacobra
