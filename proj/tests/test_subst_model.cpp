#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "vipr/subst_model.hpp"

using namespace vipr;

TEST_CASE("P(0) is the identity") {
  const auto p = jc_transition(0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(p[4 * i + j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("long branches reach stationarity") {
  for (double x : jc_transition(1e6)) CHECK(std::abs(x - 0.25) < 1e-12);
}

TEST_CASE("closed form at b = 0.1") {
  // 40-digit evaluation of 1/4 + 3/4 e^{-4b/3} and 1/4 - 1/4 e^{-4b/3}
  const auto p = jc_transition(0.1);
  CHECK(p[0] == doctest::Approx(0.9063799892822105905).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.0312066702392631365).epsilon(1e-15));
}

TEST_CASE("matrix invariants") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = jc_transition(u(rng));
    for (int i = 0; i < 4; ++i) {
      double row = 0.0;
      for (int j = 0; j < 4; ++j) {
        row += p[4 * i + j];
        CHECK(p[4 * i + j] >= 0.0);
        CHECK(p[4 * i + j] <= 1.0);
        CHECK(p[4 * i + j] == p[4 * j + i]);
      }
      CHECK(std::abs(row - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("derivative closed form and finite differences") {
  const auto d0 = jc_transition_derivative(0.0);
  CHECK(d0[0] == -1.0);
  CHECK(d0[1] == doctest::Approx(1.0 / 3.0));
  for (double b : {0.01, 0.1, 0.7, 3.0}) {
    const auto d = jc_transition_derivative(b);
    const double h = 1e-5;
    const auto up = jc_transition(b + h), dn = jc_transition(b - h);
    for (int i = 0; i < 4; ++i) {
      double row = 0.0;
      for (int j = 0; j < 4; ++j) {
        row += d[4 * i + j];
        CHECK(std::abs(d[4 * i + j] - (up[4 * i + j] - dn[4 * i + j]) / (2 * h)) < 1e-8);
      }
      CHECK(std::abs(row) < 1e-15);
    }
  }
}

TEST_CASE("stationary distribution") {
  const auto pi = jc_stationary();
  CHECK(pi == Vector4{0.25, 0.25, 0.25, 0.25});
  for (double b : {0.0, 0.3, 5.0}) {
    const auto p = jc_transition(b);
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) s += pi[i] * p[4 * i + j];
      CHECK(s == doctest::Approx(pi[j]).epsilon(1e-15));
    }
  }
}

TEST_CASE("Chapman-Kolmogorov") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = u(rng), b = u(rng);
    const auto lhs = multiply(jc_transition(a), jc_transition(b));
    const auto rhs = jc_transition(a + b);
    for (int k = 0; k < 16; ++k) CHECK(std::abs(lhs[k] - rhs[k]) < 1e-10);
  }
}

TEST_CASE("invalid branch lengths") {
  CHECK_THROWS_AS(jc_transition(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(jc_transition(NAN), std::invalid_argument);
  CHECK_THROWS_AS(jc_transition_derivative(INFINITY), std::invalid_argument);
}

TEST_CASE("model interface dispatches to the closed form") {
  const JukesCantor jc;
  const SubstitutionModel& m = jc;
  CHECK(m.transition(0.4) == jc_transition(0.4));
  CHECK(m.transition_derivative(0.4) == jc_transition_derivative(0.4));
}
