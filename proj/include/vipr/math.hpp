#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

namespace vipr {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

/// log(exp(a) + exp(b)) without overflow; either side may be -inf.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum_i exp(x_i)). Returns -inf for an empty span or all -inf entries.
double log_sum_exp(std::span<const double> xs);

/// Writes softmax(xs) into out and returns log_sum_exp(xs).
double softmax(std::span<const double> xs, std::span<double> out);

/// log of the standard normal upper tail, log(1 - Phi(x)).
///
/// Uses erfc directly in the body of the distribution, log1p in the lower
/// tail where the survival approaches one, and a continued fraction for the
/// scaled complementary error function in the far upper tail so that the
/// result stays finite and accurate well past the point where erfc underflows.
double log_normal_survival(double x);

/// Standard normal hazard phi(x) / (1 - Phi(x)), i.e. -d/dx log_normal_survival.
double normal_hazard(double x);

/// exp(y^2) * erfc(y) for y >= 0, evaluated without forming either factor.
double erfcx(double y);

inline double log_normal_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

}  // namespace vipr
