#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

#include "test_support.hpp"
#include "vipr/coalescent_prior.hpp"

using namespace vipr;
using boost::math::quadrature::gauss_kronrod;

TEST_CASE("two taxa value") {
  // rate 1/5, density (1/5) exp(-3/5)
  const PriorConfig cfg{5.0};
  CHECK(log_prior_times({3.0}, cfg) == doctest::Approx(-2.2094379124341003746).epsilon(1e-14));
  CHECK(coalescent_rate(2, 5.0) == doctest::Approx(0.2));
  CHECK(coalescent_rate(5, 2.0) == doctest::Approx(5.0));
  CHECK(coalescent_log_prefactor(2) == doctest::Approx(0.0));
  CHECK(coalescent_log_prefactor(3) == doctest::Approx(std::log(1.0 / 3.0)));
  CHECK(coalescent_log_prefactor(4) == doctest::Approx(std::log(1.0 / 18.0)));
}

TEST_CASE("matches the product of waiting-time densities and merge probabilities") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 15;
    const double ne = 0.5 + trial * 0.1;
    const auto tree = testing::random_tree(n, rng);
    double want = 0.0, prev = 0.0;
    for (std::size_t e = 0; e < tree.n_events(); ++e) {
      const double k = static_cast<double>(n - e);
      const double pairs = k * (k - 1) / 2;
      const double rate = pairs / ne;
      want += std::log(rate) - rate * (tree.time(e) - prev) - std::log(pairs);
      prev = tree.time(e);
    }
    CHECK(testing::rel_err(log_prior(tree, {ne}), want) < 1e-12);
  }
}

TEST_CASE("topology enters only through the number of taxa") {
  Rng rng(42);
  const PriorConfig cfg{3.0};
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = testing::random_tree(7, rng);
    const auto b = testing::random_tree(7, rng).with_times(a.times());
    CHECK(log_prior(a, cfg) == log_prior(b, cfg));
  }
}

TEST_CASE("integrates to one over ranked trees") {
  const PriorConfig cfg{5.0};
  auto dens = [&](std::vector<double> t) { return std::exp(log_prior_times(t, cfg)); };
  const double inf = std::numeric_limits<double>::infinity();
  const double n2 = gauss_kronrod<double, 31>::integrate(
      [&](double t) { return dens({t}); }, 0.0, inf, 10, 1e-12);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-9));
  // three ranked topologies for N = 3, all with the same density
  const double n3 = gauss_kronrod<double, 31>::integrate(
      [&](double t1) {
        return gauss_kronrod<double, 31>::integrate(
            [&](double h) { return dens({t1, t1 + h}); }, 0.0, inf, 10, 1e-12);
      },
      0.0, inf, 10, 1e-11);
  CHECK(3.0 * n3 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("time gradient matches central differences") {
  Rng rng(43);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 10;
    std::vector<double> t(n - 1);
    double acc = 0.0;
    for (auto& x : t) x = (acc += u(rng));
    const PriorConfig cfg{0.5 + trial * 0.2};
    const auto g = log_prior_time_gradient(t, cfg);
    for (std::size_t e = 0; e < t.size(); ++e) {
      auto up = t, dn = t;
      up[e] += 1e-6;
      dn[e] -= 1e-6;
      const double fd = (log_prior_times(up, cfg) - log_prior_times(dn, cfg)) / 2e-6;
      CHECK(g[e] == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(log_prior_times({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(log_prior_times({1.0}, {-2.0}), std::invalid_argument);
  CHECK_THROWS_AS(log_prior_times({NAN}, {1.0}), std::invalid_argument);
}
