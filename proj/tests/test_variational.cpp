#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <stdexcept>

#include "test_support.hpp"
#include "vipr/variational.hpp"

using namespace vipr;
using vipr::testing::rel_err;

namespace {

double log_q_pair(double t, const VariationalParams& p, std::size_t k) {
  return lognormal_logpdf(t, p.mu()[k], p.sigma(k));
}
double log_s_pair(double t, const VariationalParams& p, std::size_t k) {
  return lognormal_log_survival(t, p.mu()[k], p.sigma(k));
}

UltrametricTree three(std::size_t a, std::size_t b, double t1, double t2) {
  // (a, b) merge first, the remaining taxon joins at t2
  Clade ab = Clade::singleton(3, a) | Clade::singleton(3, b);
  Clade rest(3);
  for (std::size_t i = 0; i < 3; ++i)
    if (!ab.contains(i)) rest.insert(i);
  return UltrametricTree(3, {{Clade::singleton(3, a), Clade::singleton(3, b)}, {ab, rest}},
                         {t1, t2});
}

}  // namespace

TEST_CASE("log-normal examples") {
  CHECK(lognormal_logpdf(1.0, 0.0, 1.0) == doctest::Approx(-0.9189385332046727418).epsilon(1e-15));
  CHECK(lognormal_log_survival(std::exp(0.3), 0.3, 0.7) == doctest::Approx(std::log(0.5)));
  for (double x : {-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 5.0, 10.0}) {
    const double want = std::log(0.5 * std::erfc(x / std::sqrt(2.0)));
    CHECK(rel_err(lognormal_log_survival(std::exp(0.2 + 1.5 * x), 0.2, 1.5), want) < 1e-12);
  }
  // deep upper tail against the asymptotic series
  for (double x : {40.0, 100.0, 600.0}) {
    const double want = -x * x / 2 - std::log(x * std::sqrt(2 * M_PI)) +
                        std::log1p(-1 / (x * x) + 3 / std::pow(x, 4) - 15 / std::pow(x, 6));
    CHECK(rel_err(lognormal_log_survival(std::exp(x), 0.0, 1.0), want) < 1e-12);
  }
  CHECK_THROWS_AS(lognormal_logpdf(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lognormal_logpdf(1.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("per-pair term gradients match central differences") {
  Rng rng(51);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double mu = u(rng), ls = 0.5 * u(rng), t = std::exp(mu + 1.5 * u(rng));
    const double h = 1e-6;
    auto check = [&](auto f, PairTermGrad g) {
      CHECK(g.d_loc == doctest::Approx((f(t, mu + h, ls) - f(t, mu - h, ls)) / (2 * h)).epsilon(1e-6));
      CHECK(g.d_log_scale ==
            doctest::Approx((f(t, mu, ls + h) - f(t, mu, ls - h)) / (2 * h)).epsilon(1e-6));
      CHECK(g.d_t == doctest::Approx((f(t * (1 + h), mu, ls) - f(t * (1 - h), mu, ls)) / (2 * h * t))
                         .epsilon(1e-6));
    };
    check(LogNormalPair::log_pdf, LogNormalPair::log_pdf_grad(t, mu, ls));
    check(LogNormalPair::log_survival, LogNormalPair::log_survival_grad(t, mu, ls));
  }
}

TEST_CASE("two taxa: the tree density is the pair density") {
  const auto p = VariationalParams::uniform({"a", "b"}, -0.4, 0.6);
  const UltrametricTree t(2, {{Clade::singleton(2, 0), Clade::singleton(2, 1)}}, {0.8});
  CHECK(log_density(p, t).log_q == doctest::Approx(lognormal_logpdf(0.8, -0.4, 0.6)).epsilon(1e-14));
}

TEST_CASE("three taxa density matches the direct joint expression") {
  Rng rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing::random_params(3, rng);
    std::uniform_real_distribution<double> u(0.01, 2.0);
    const double t1 = u(rng), t2 = t1 + u(rng);
    for (auto [a, b] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 2}}) {
      const std::size_t c = 3 - a - b;
      const std::size_t kab = pair_index(3, a, b);
      const std::size_t kac = pair_index(3, std::min(a, c), std::max(a, c));
      const std::size_t kbc = pair_index(3, std::min(b, c), std::max(b, c));
      const double want =
          log_q_pair(t1, p, kab) +
          std::log(std::exp(log_q_pair(t2, p, kac) + log_s_pair(t2, p, kbc)) +
                   std::exp(log_q_pair(t2, p, kbc) + log_s_pair(t2, p, kac)));
      CHECK(rel_err(log_density(p, three(a, b, t1, t2)).log_q, want) < 1e-11);
    }
  }
}

TEST_CASE("density gradient matches central differences") {
  Rng rng(53);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto p = testing::random_params(n, rng);
    const auto s = sample_tree(p, rng);
    const auto g = log_density_gradient(p, s.tree);
    CHECK(rel_err(g.log_q, log_density(p, s.tree).log_q) < 1e-13);
    const double h = 1e-6;
    auto flat = p.flat();
    for (std::size_t i = 0; i < flat.size(); ++i) {
      auto up = p, dn = p;
      auto fu = flat, fd = flat;
      fu[i] += h;
      fd[i] -= h;
      up.set_flat(fu);
      dn.set_flat(fd);
      const double want = (log_density(up, s.tree).log_q - log_density(dn, s.tree).log_q) / (2 * h);
      CHECK(std::abs(g.grad[i] - want) <= 1e-6 * std::max(1.0, std::abs(want)));
    }
    for (std::size_t e = 0; e < s.tree.n_events(); ++e) {
      const double te = s.tree.time(e);
      const double lo = e > 0 ? s.tree.time(e - 1) : 0.0;
      const double hi = e + 1 < s.tree.n_events() ? s.tree.time(e + 1) : INFINITY;
      const double step = std::min({1e-7 * te, (te - lo) / 4, (hi - te) / 4});
      if (step <= 1e-12) continue;
      auto up = s.tree.times(), dn = s.tree.times();
      up[e] += step;
      dn[e] -= step;
      const double want = (log_density(p, s.tree.with_times(up)).log_q -
                           log_density(p, s.tree.with_times(dn)).log_q) / (2 * step);
      CHECK(std::abs(g.d_times[e] - want) <= 1e-5 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("q integrates to one for three taxa") {
  Rng rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = testing::random_params(3, rng);
    CHECK(variational_mass_n3(p, 1e-10) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("exchangeable parameters give uniform topologies") {
  const auto p = VariationalParams::uniform(default_taxon_names(3), -0.5, 0.8);
  auto rng = make_rng(7, 0);
  std::map<std::size_t, int> counts;
  const int n = 30000;
  for (int i = 0; i < n; ++i) counts[sample_tree(p, rng).selected_pairs[0]]++;
  REQUIRE(counts.size() == 3);
  const double se = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
  for (auto [k, c] : counts) CHECK(std::abs(c - n / 3.0) < 4 * se);
  // equal density for the same times under any topology
  CHECK(log_density(p, three(0, 1, 0.3, 0.9)).log_q ==
        doctest::Approx(log_density(p, three(1, 2, 0.3, 0.9)).log_q).epsilon(1e-14));
}

TEST_CASE("sampling is reproducible from (seed, stream, index)") {
  Rng rng(55);
  const auto p = testing::random_params(6, rng);
  auto r1 = make_rng(3, 4, 5), r2 = make_rng(3, 4, 5), r3 = make_rng(3, 4, 6);
  const auto a = sample_tree(p, r1), b = sample_tree(p, r2), c = sample_tree(p, r3);
  CHECK(a.noise == b.noise);
  CHECK(a.tree == b.tree);
  CHECK(a.noise != c.noise);
  const auto d = tree_from_noise(p, a.noise);
  CHECK(d.tree == a.tree);
  CHECK(d.matrix == a.matrix);
}

TEST_CASE("pathwise Jacobian") {
  Rng rng(56);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 8;
    const auto p = testing::random_params(n, rng);
    const auto s = sample_tree(p, rng);
    const auto jac = pathwise_time_jacobian(p, s.tree, s.noise);
    REQUIRE(jac.size() == s.tree.n_events());
    for (std::size_t e = 0; e < jac.size(); ++e) {
      const auto k = jac[e].pair;
      CHECK(k == s.selected_pairs[e]);
      CHECK(s.matrix[k] == s.tree.time(e));
      CHECK(jac[e].dt_dloc == doctest::Approx(s.tree.time(e)));
      CHECK(jac[e].dt_dlog_scale == doctest::Approx(s.tree.time(e) * p.sigma(k) * s.noise[k]));
      // a small shift of the selected pair's location moves only this time
      auto flat = p.flat();
      flat[k] += 1e-7;
      auto q = p;
      q.set_flat(flat);
      const auto moved = tree_from_noise(q, s.noise);
      if (moved.tree.events() == s.tree.events())
        CHECK((moved.tree.time(e) - s.tree.time(e)) / 1e-7 ==
              doctest::Approx(jac[e].dt_dloc).epsilon(1e-5));
    }
  }
  const auto p = VariationalParams::uniform(default_taxon_names(3), 0.0, 1.0);
  // all three entries equal: the first event's minimum is tied
  const auto tied = tree_from_noise(p, {0.0, 0.0, 0.0});
  CHECK_THROWS_AS(pathwise_time_jacobian(p, tied.tree, tied.noise), ClusteringTieError);
  CHECK_THROWS_AS(pathwise_time_jacobian(p, tied.tree, {0.1, 0.0}), std::invalid_argument);
}

TEST_CASE("parameter JSON round trip") {
  Rng rng(57);
  const auto p = testing::random_params(5, rng);
  const auto text = params_to_json(p);
  const auto back = params_from_json(text);
  CHECK(back.taxa() == p.taxa());
  for (std::size_t k = 0; k < p.n_pairs(); ++k) {
    CHECK(back.mu()[k] == p.mu()[k]);
    CHECK(back.sigma(k) == doctest::Approx(p.sigma(k)).epsilon(1e-15));
  }
  CHECK(params_to_json(back) == text);
  const auto path = std::filesystem::temp_directory_path() / "vipr_params_test.json";
  write_params_file(path.string(), p);
  CHECK(params_to_json(read_params_file(path.string())) == text);
  std::filesystem::remove(path);
  CHECK_THROWS(params_from_json("{"));
  CHECK_THROWS(params_from_json(R"({"taxa": ["a", "b"], "pairs": []})"));
  CHECK_THROWS(params_from_json(
      R"({"taxa": ["a", "b"], "pairs": [{"u": 0, "v": 1, "mu": 0, "sigma": -1}]})"));
}
