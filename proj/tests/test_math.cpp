#include <doctest.h>

#include <cmath>
#include <vector>

#include "vipr/math.hpp"

using namespace vipr;

TEST_CASE("log_sum_exp handles empty, -inf and large inputs") {
  CHECK(log_sum_exp(std::vector<double>{}) == kNegInf);
  CHECK(log_sum_exp(std::vector<double>{kNegInf, kNegInf}) == kNegInf);
  const std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_add(kNegInf, 3.0) == 3.0);
}

TEST_CASE("log survival agrees with erfc where erfc is representable") {
  for (double x = -8.0; x <= 37.0; x += 0.25) {
    const double direct = std::log(0.5 * std::erfc(x / std::sqrt(2.0)));
    if (!std::isfinite(direct) || 0.5 * std::erfc(x / std::sqrt(2.0)) < 1e-300) continue;
    CHECK(log_normal_survival(x) == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(log_normal_survival(0.0) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("far upper tail stays finite and follows the Mills-ratio asymptote") {
  for (double x : {38.0, 40.0, 60.0, 100.0}) {
    const double v = log_normal_survival(x);
    REQUIRE(std::isfinite(v));
    // log Q(x) ~ log phi(x) - log x - 1/x^2 for large x
    const double approx = log_normal_pdf(x) - std::log(x) + std::log1p(-1.0 / (x * x) + 3.0 / std::pow(x, 4));
    CHECK(v == doctest::Approx(approx).epsilon(1e-8));
  }
  CHECK(log_normal_survival(-40.0) == 0.0);
}

TEST_CASE("hazard is the negative derivative of log survival") {
  for (double x : {-5.0, -1.0, 0.0, 2.5, 4.2, 6.0, 12.0, 30.0}) {
    const double h = 1e-6 * std::max(1.0, std::abs(x));
    const double fd = -(log_normal_survival(x + h) - log_normal_survival(x - h)) / (2 * h);
    CHECK(normal_hazard(x) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("erfcx branches join continuously") {
  const double below = std::exp(3.999999 * 3.999999) * std::erfc(3.999999);
  CHECK(erfcx(4.0) == doctest::Approx(below).epsilon(1e-6));
}
