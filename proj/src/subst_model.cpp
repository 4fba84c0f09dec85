#include "vipr/subst_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vipr {
namespace {

void check_branch_length(double b) {
  if (!std::isfinite(b) || b < 0.0)
    throw std::invalid_argument("branch length must be finite and nonnegative, got " +
                                std::to_string(b));
}

Matrix4 fill(double diag, double off) {
  Matrix4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[4 * i + j] = i == j ? diag : off;
  return m;
}

}  // namespace

Matrix4 jc_transition(double b) {
  check_branch_length(b);
  const double e = std::exp(-4.0 * b / 3.0);
  return fill(0.25 + 0.75 * e, 0.25 - 0.25 * e);
}

Matrix4 jc_transition_derivative(double b) {
  check_branch_length(b);
  const double e = std::exp(-4.0 * b / 3.0);
  return fill(-e, e / 3.0);
}

Vector4 jc_stationary() { return {0.25, 0.25, 0.25, 0.25}; }

Vector4 JukesCantor::stationary() const { return jc_stationary(); }
Matrix4 JukesCantor::transition(double b) const { return jc_transition(b); }
Matrix4 JukesCantor::transition_derivative(double b) const { return jc_transition_derivative(b); }

Matrix4 multiply(const Matrix4& a, const Matrix4& b) {
  Matrix4 out{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) out[4 * i + j] += a[4 * i + k] * b[4 * k + j];
  return out;
}

}  // namespace vipr
