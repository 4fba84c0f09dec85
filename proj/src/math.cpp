#include "vipr/math.hpp"

#include <algorithm>

namespace vipr {

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (hi == kNegInf) return kNegInf;
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

double softmax(std::span<const double> xs, std::span<double> out) {
  const double lse = log_sum_exp(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::exp(xs[i] - lse);
  return lse;
}

double erfcx(double y) {
  if (y < 4.0) return std::exp(y * y) * std::erfc(y);
  // erfc(y) = exp(-y^2)/sqrt(pi) * 1/(y + (1/2)/(y + 1/(y + (3/2)/(y + ...))))
  // evaluated bottom-up; 80 terms are far beyond convergence for y >= 4.
  double tail = y;
  for (int k = 80; k >= 1; --k) tail = y + (0.5 * k) / tail;
  return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

double log_normal_survival(double x) {
  const double y = x / std::numbers::sqrt2;
  if (x < 0.0) return std::log1p(-0.5 * std::erfc(-y));
  if (y < 4.0) return std::log(0.5 * std::erfc(y));
  return std::log(0.5) - y * y + std::log(erfcx(y));
}

double normal_hazard(double x) {
  if (x < 4.0) return std::exp(log_normal_pdf(x) - log_normal_survival(x));
  // phi(x)/Q(x) = sqrt(2/pi) / erfcx(x/sqrt2), exact rearrangement.
  return std::sqrt(2.0 / std::numbers::pi) / erfcx(x / std::numbers::sqrt2);
}

}  // namespace vipr
