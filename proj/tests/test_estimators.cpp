#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "test_support.hpp"
#include "vipr/estimators.hpp"
#include "vipr/likelihood.hpp"
#include "vipr/parallel.hpp"

using namespace vipr;
using vipr::testing::rel_err;

namespace {

Alignment small_alignment(std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed, 0);
  const auto tree = simulate_coalescent(n, 5.0, rng);
  return simulate_sequences(tree, default_taxon_names(n), 40, rng);
}

}  // namespace

TEST_CASE("estimator names") {
  for (auto k : {EstimatorKind::kLoor, EstimatorKind::kReparam, EstimatorKind::kVimco})
    CHECK(parse_estimator(estimator_name(k)) == k);
  CHECK_THROWS_AS(parse_estimator("reinforce"), std::invalid_argument);
}

TEST_CASE("scalar summaries on hand examples") {
  const std::vector<double> f{0.0, std::log(3.0)};
  CHECK(elbo_estimate(f) == doctest::Approx(std::log(3.0) / 2));
  CHECK(multisample_elbo_estimate(f) == doctest::Approx(std::log(2.0)));
  CHECK(effective_sample_size(f) == doctest::Approx(16.0 / 10.0));
  CHECK(effective_sample_size({1.0, 1.0, 1.0, 1.0}) == doctest::Approx(4.0));
  CHECK(effective_sample_size({0.0, -800.0}) == doctest::Approx(1.0));
  // L = log 2; dropping f_1 in favour of mean(f_2) gives log 3, dropping f_2 gives 0
  const auto s = vimco_learning_signals(f);
  CHECK(s[0] == doctest::Approx(std::log(2.0) - std::log(3.0)));
  CHECK(s[1] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("log-evidence statistics from weights") {
  const auto same = mll_from_log_weights({-3.0, -3.0, -3.0});
  CHECK(same.estimate == doctest::Approx(-3.0));
  CHECK(same.standard_error == doctest::Approx(0.0));
  CHECK(same.effective_sample_size == doctest::Approx(3.0));
  // independent jackknife on a small vector
  const std::vector<double> f{-1.0, -2.5, 0.3, -0.7, -4.0};
  std::vector<double> loo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
      if (j != i) s += std::exp(f[j]);
    loo.push_back(std::log(s / 4.0));
  }
  const double m = std::accumulate(loo.begin(), loo.end(), 0.0) / 5.0;
  double ss = 0.0;
  for (double v : loo) ss += (v - m) * (v - m);
  const auto est = mll_from_log_weights(f);
  double tot = 0.0;
  for (double x : f) tot += std::exp(x);
  CHECK(est.estimate == doctest::Approx(std::log(tot / 5.0)));
  CHECK(est.standard_error == doctest::Approx(std::sqrt(0.8 * ss)));
  CHECK_THROWS_AS(mll_from_log_weights({1.0}), std::invalid_argument);
}

TEST_CASE("hand-set batch gives the stated LOOR and VIMCO combinations") {
  const auto a = small_alignment(3, 1);
  const auto p = VariationalParams::uniform(a.taxa(), -1.0, 0.5);
  auto batch = evaluate_batch(p, a, {}, 3, 1, 0);
  const std::vector<double> f{-1.0, -2.0, -4.0};
  for (std::size_t k = 0; k < 3; ++k) {
    batch.samples[k].f = f[k];
    batch.samples[k].grad_log_q.assign(p.dim(), 0.0);
    batch.samples[k].grad_log_q[0] = static_cast<double>(k + 1);
  }
  // LOOR: (1/3) sum (f_k - mean_{l!=k}) g_k = (1/3)(1*2.0 + 2*0.5 + 3*(-2.5))
  CHECK(grad_loor(batch).grad[0] == doctest::Approx((2.0 + 1.0 - 7.5) / 3.0));
  CHECK(grad_loor(batch).grad[1] == 0.0);
  const auto sig = vimco_learning_signals(f);
  std::vector<double> w(3);
  double z = 0.0;
  for (std::size_t k = 0; k < 3; ++k) z += (w[k] = std::exp(f[k]));
  double want = 0.0;
  for (std::size_t k = 0; k < 3; ++k) want += (sig[k] - w[k] / z) * (k + 1.0);
  CHECK(grad_vimco(batch).grad[0] == doctest::Approx(want));
  CHECK(grad_vimco(batch).elbo_estimate == doctest::Approx(multisample_elbo_estimate(f)));
  CHECK(grad_loor(batch).elbo_estimate == doctest::Approx(elbo_estimate(f)));
}

TEST_CASE("score function has mean zero") {
  Rng rng(61);
  const auto p = testing::random_params(4, rng);
  const auto a = small_alignment(4, 2);
  const std::size_t n = 20000;
  const auto batch = evaluate_batch(p, a, {}, n, 9, 0, {false, default_threads()});
  for (std::size_t i = 0; i < p.dim(); ++i) {
    double s = 0.0, s2 = 0.0;
    for (const auto& e : batch.samples) {
      s += e.grad_log_q[i];
      s2 += e.grad_log_q[i] * e.grad_log_q[i];
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    CHECK(std::abs(mean) < 4.5 * se);
  }
}

TEST_CASE("sample terms are consistent with the component modules") {
  Rng rng(62);
  const auto p = testing::random_params(5, rng);
  const auto a = small_alignment(5, 3);
  const auto batch = evaluate_batch(p, a, {4.0}, 20, 11, 2, {true, 1});
  for (const auto& e : batch.samples) {
    CHECK(rel_err(e.log_likelihood, log_likelihood(a, e.sample.tree)) < 1e-12);
    CHECK(rel_err(e.log_prior, log_prior(e.sample.tree, {4.0})) < 1e-12);
    CHECK(rel_err(e.log_q, log_density(p, e.sample.tree).log_q) < 1e-12);
    CHECK(e.f == doctest::Approx(e.log_likelihood + e.log_prior - e.log_q));
  }
}

TEST_CASE("pathwise gradient matches finite differences at fixed noise") {
  Rng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + trial % 4;
    const auto p = testing::random_params(n, rng);
    const auto a = small_alignment(n, 10 + trial);
    const auto batch = evaluate_batch(p, a, {}, 3, 100 + trial, 0, {true, 1});
    for (const auto& e : batch.samples) {
      const auto flat = p.flat();
      for (std::size_t i = 0; i < flat.size(); ++i) {
        const double h = 1e-6;
        auto fu = flat, fd = flat;
        fu[i] += h;
        fd[i] -= h;
        auto pu = p, pd = p;
        pu.set_flat(fu);
        pd.set_flat(fd);
        const auto su = evaluate_sample(pu, a, {}, tree_from_noise(pu, e.sample.noise), false);
        const auto sd = evaluate_sample(pd, a, {}, tree_from_noise(pd, e.sample.noise), false);
        if (su.sample.tree.events() != e.sample.tree.events() ||
            sd.sample.tree.events() != e.sample.tree.events())
          continue;
        const double fd_val = (su.f - sd.f) / (2 * h);
        CHECK(std::abs(e.pathwise_grad[i] - fd_val) <= 1e-4 * std::max(1.0, std::abs(fd_val)));
      }
    }
  }
}

TEST_CASE("batches are independent of the thread count") {
  Rng rng(64);
  const auto p = testing::random_params(6, rng);
  const auto a = small_alignment(6, 4);
  const auto one = evaluate_batch(p, a, {}, 16, 5, 3, {true, 1});
  const auto many = evaluate_batch(p, a, {}, 16, 5, 3, {true, 4});
  CHECK(one.f_values() == many.f_values());
  for (auto kind : {EstimatorKind::kLoor, EstimatorKind::kReparam, EstimatorKind::kVimco})
    CHECK(estimate_gradient(kind, one).grad == estimate_gradient(kind, many).grad);
  CHECK(estimate_mll(p, a, {}, 50, 5, 1, 1).estimate == estimate_mll(p, a, {}, 50, 5, 1, 3).estimate);
}

TEST_CASE("importance sampling recovers the two-taxon evidence") {
  const Alignment a({"x", "y"}, {{kA}, {kA}});
  const auto p = VariationalParams::uniform(a.taxa(), std::log(3.0), 1.2);
  const auto est = estimate_mll(p, a, {5.0}, 40000, 3, 0, default_threads());
  // (1/4)(1/4 + (3/4) lambda / (lambda + 8/3)) with lambda = 1/5
  CHECK(std::abs(est.estimate - std::log(0.0755813953488372093)) < 4 * est.standard_error + 1e-3);
  CHECK(est.standard_error < 0.01);
}

TEST_CASE("ten-sample bound is larger than the one-sample bound on average") {
  const auto a = small_alignment(4, 9);
  auto rng = make_rng(9, 1);
  const auto p = vipr::testing::random_params(4, rng);
  double l1 = 0.0, l10 = 0.0;
  const std::size_t batches = 200;
  for (std::size_t b = 0; b < batches; ++b) {
    l1 += multisample_elbo_estimate(evaluate_batch(p, a, {}, 1, b, 3).f_values());
    l10 += multisample_elbo_estimate(evaluate_batch(p, a, {}, 10, b, 4).f_values());
  }
  CHECK(l10 / batches >= l1 / batches);
}
