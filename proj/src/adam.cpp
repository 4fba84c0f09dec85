#include "vipr/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace vipr {

bool adam_step(AdamState& state, std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != grad.size() || state.m.size() != grad.size() ||
      state.v.size() != grad.size())
    throw std::invalid_argument("adam_step: dimension mismatch");
  for (double g : grad)
    if (!std::isfinite(g)) return false;
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] += state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
  return true;
}

}  // namespace vipr
