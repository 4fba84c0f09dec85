#pragma once

#include <array>

namespace vipr {

/// Row-major 4x4 matrix; entry (i, j) is the probability of base i -> base j.
using Matrix4 = std::array<double, 16>;
using Vector4 = std::array<double, 4>;

/// A reversible nucleotide substitution model with branch lengths measured in
/// expected substitutions per site.
class SubstitutionModel {
 public:
  virtual ~SubstitutionModel() = default;
  virtual Vector4 stationary() const = 0;
  /// P(b). Throws std::invalid_argument for negative or non-finite b.
  virtual Matrix4 transition(double branch_length) const = 0;
  /// dP(b)/db, entrywise.
  virtual Matrix4 transition_derivative(double branch_length) const = 0;
};

class JukesCantor final : public SubstitutionModel {
 public:
  Vector4 stationary() const override;
  Matrix4 transition(double branch_length) const override;
  Matrix4 transition_derivative(double branch_length) const override;
};

Matrix4 jc_transition(double branch_length);
Matrix4 jc_transition_derivative(double branch_length);
Vector4 jc_stationary();

Matrix4 multiply(const Matrix4& a, const Matrix4& b);

}  // namespace vipr
