#pragma once

#include <cstddef>
#include <vector>

namespace vipr {

struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  AdamState() = default;
  AdamState(std::size_t dim, double lr) : lr(lr), m(dim, 0.0), v(dim, 0.0) {}
};

/// One bias-corrected Adam ascent step, params += lr * m_hat / (sqrt(v_hat) + eps).
/// Returns false, leaving state and params untouched, when the gradient has a
/// non-finite entry. Throws std::invalid_argument on a dimension mismatch.
bool adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grad);

}  // namespace vipr
