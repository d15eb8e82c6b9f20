#pragma once

#include <cmath>

namespace sacobra {

// Sign-preserving logarithm: ln(1+y) for y >= 0, -ln(1-y) for y < 0.
template <typename Scalar>
Scalar plog(Scalar y) {
  using std::log1p;
  return y >= Scalar(0) ? log1p(y) : -log1p(-y);
}

template <typename Scalar>
Scalar plog_inverse(Scalar z) {
  using std::expm1;
  return z >= Scalar(0) ? expm1(z) : -expm1(-z);
}

}  // namespace sacobra
