#include "vipr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vipr/likelihood.hpp"
#include "vipr/math.hpp"
#include "vipr/subst_model.hpp"

namespace vipr {
namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr unsigned kMaxDepth = 20;

}  // namespace

std::vector<std::string> default_taxon_names(std::size_t n_taxa) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_taxa; ++i) names.push_back("t" + std::to_string(i + 1));
  return names;
}

UltrametricTree simulate_coalescent(std::size_t n_taxa, double n_e, Rng& rng) {
  if (n_taxa < 2) throw std::invalid_argument("simulate_coalescent needs at least two taxa");
  std::vector<Clade> lineages;
  for (std::size_t i = 0; i < n_taxa; ++i) lineages.push_back(Clade::singleton(n_taxa, i));
  std::vector<Bipartition> events;
  std::vector<double> times;
  double t = 0.0;
  while (lineages.size() > 1) {
    const std::size_t k = lineages.size();
    std::exponential_distribution<double> hold(coalescent_rate(k, n_e));
    t += hold(rng);
    std::uniform_int_distribution<std::size_t> pick(0, k * (k - 1) / 2 - 1);
    std::size_t r = pick(rng), i = 0;
    while (r >= k - 1 - i) r -= k - 1 - i++;
    const std::size_t j = i + 1 + r;
    events.push_back({lineages[i], lineages[j]});
    times.push_back(t);
    lineages[i] = lineages[i] | lineages[j];
    lineages.erase(lineages.begin() + static_cast<std::ptrdiff_t>(j));
  }
  return UltrametricTree(n_taxa, std::move(events), std::move(times));
}

Alignment simulate_sequences(const UltrametricTree& tree, const std::vector<std::string>& taxa,
                             std::size_t n_sites, Rng& rng) {
  if (taxa.size() != tree.n_taxa()) throw std::invalid_argument("taxon name count mismatch");
  std::vector<Matrix4> p(tree.n_nodes());
  for (std::size_t node = 0; node + 1 < tree.n_nodes(); ++node)
    p[node] = jc_transition(tree.branch_length(node));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto draw = [&](const double* probs) {
    const double u = unif(rng);
    double acc = 0.0;
    for (int s = 0; s < 3; ++s) {
      acc += probs[s];
      if (u < acc) return s;
    }
    return 3;
  };
  const Vector4 pi = jc_stationary();
  std::vector<std::vector<Base>> rows(tree.n_taxa(), std::vector<Base>(n_sites));
  std::vector<int> state(tree.n_nodes());
  for (std::size_t m = 0; m < n_sites; ++m) {
    state[tree.root()] = draw(pi.data());
    for (std::size_t e = tree.n_events(); e-- > 0;) {
      const int from = state[tree.n_taxa() + e];
      for (std::size_t child : {tree.left_child(e), tree.right_child(e)})
        state[child] = draw(p[child].data() + 4 * from);
    }
    for (std::size_t i = 0; i < tree.n_taxa(); ++i) rows[i][m] = static_cast<Base>(state[i]);
  }
  return Alignment(taxa, std::move(rows));
}

std::vector<std::vector<Bipartition>> enumerate_ranked_topologies(std::size_t n_taxa) {
  std::vector<std::vector<Bipartition>> out;
  std::vector<Clade> start;
  for (std::size_t i = 0; i < n_taxa; ++i) start.push_back(Clade::singleton(n_taxa, i));
  std::vector<Bipartition> prefix;
  auto recurse = [&](auto&& self, const std::vector<Clade>& clusters) -> void {
    if (clusters.size() == 1) {
      out.push_back(prefix);
      return;
    }
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        std::vector<Clade> next;
        for (std::size_t c = 0; c < clusters.size(); ++c)
          if (c != i && c != j) next.push_back(clusters[c]);
        next.push_back(clusters[i] | clusters[j]);
        prefix.push_back({clusters[i], clusters[j]});
        self(self, next);
        prefix.pop_back();
      }
    }
  };
  recurse(recurse, start);
  return out;
}

ExactPosterior exact_evidence(const Alignment& a, const PriorConfig& prior, double rel_tol) {
  const std::size_t n = a.n_taxa();
  if (n < 2 || n > 4) throw std::invalid_argument("exact_evidence supports 2 to 4 taxa");
  const std::size_t dims = n - 1;
  std::vector<double> rates(dims);
  for (std::size_t e = 0; e < dims; ++e) rates[e] = coalescent_rate(n - e, prior.n_e);

  ExactPosterior out;
  out.topologies = enumerate_ranked_topologies(n);
  std::vector<UltrametricTree> shapes;
  for (const auto& topo : out.topologies)
    shapes.emplace_back(n, topo, std::vector<double>(dims, 1.0));

  // log integrand in the unit-cube coordinates
  auto log_integrand = [&](const UltrametricTree& shape, const std::vector<double>& u) {
    std::vector<double> t(dims);
    double acc = 0.0, log_jac = 0.0;
    for (std::size_t e = 0; e < dims; ++e) {
      const double hold = -std::log1p(-u[e]) / rates[e];
      acc += hold;
      t[e] = acc;
      log_jac -= std::log(rates[e]) + std::log1p(-u[e]);
    }
    const auto tree = shape.with_times(t);
    return log_likelihood(a, tree) + log_prior(tree, prior) + log_jac;
  };

  // Reference offset so that exp() stays in range for long alignments.
  double ref = kNegInf;
  {
    std::vector<double> u(dims);
    const int grid = 12;
    std::size_t cells = 1;
    for (std::size_t d = 0; d < dims; ++d) cells *= grid;
    for (const auto& shape : shapes) {
      for (std::size_t c = 0; c < cells; ++c) {
        std::size_t code = c;
        for (std::size_t d = 0; d < dims; ++d) {
          u[d] = (static_cast<double>(code % grid) + 0.5) / grid;
          code /= grid;
        }
        ref = std::max(ref, log_integrand(shape, u));
      }
    }
  }

  std::vector<double> u(dims);
  for (const auto& shape : shapes) {
    double worst = 0.0;
    auto integrate_dim = [&](auto&& self, std::size_t d, double tol) -> double {
      auto f = [&](double x) -> double {
        u[d] = x;
        if (d + 1 == dims) return std::exp(log_integrand(shape, u) - ref);
        return self(self, d + 1, tol * 1e-2);
      };
      double err = 0.0, l1 = 0.0;
      const double val = GK::integrate(f, 0.0, 1.0, kMaxDepth, tol, &err, &l1);
      if (l1 > 0.0) worst = std::max(worst, err / l1);
      return val;
    };
    const double value = integrate_dim(integrate_dim, 0, rel_tol);
    out.log_contributions.push_back(std::log(value) + ref);
    out.max_quadrature_error = std::max(out.max_quadrature_error, worst);
  }
  out.log_evidence = log_sum_exp(out.log_contributions);
  return out;
}

namespace {

// Integrates g(tree) * q(tree) over the three N = 3 topologies in
// coordinates y = log t1, s = log(t2 - t1).
template <class G>
double integrate_n3(const VariationalParams& params, double rel_tol, G&& g) {
  if (params.n_taxa() != 3) throw std::invalid_argument("N = 3 quadrature needs three taxa");
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t k = 0; k < params.n_pairs(); ++k) {
    lo = std::min(lo, params.mu()[k] - 12.0 * params.sigma(k));
    hi = std::max(hi, params.mu()[k] + 12.0 * params.sigma(k));
  }
  const auto topologies = enumerate_ranked_topologies(3);
  double total = 0.0;
  for (const auto& topo : topologies) {
    const UltrametricTree shape(3, topo, {1.0, 2.0});
    auto outer = [&](double y) {
      const double t1 = std::exp(y);
      auto inner = [&](double s) {
        const double gap = std::exp(s);
        const auto tree = shape.with_times({t1, t1 + gap});
        const double log_q = log_density(params, tree).log_q;
        const double dens = std::exp(log_q + y + s);
        return dens == 0.0 ? 0.0 : dens * g(tree, log_q);
      };
      return GK::integrate(inner, std::min(lo, y) - 30.0, hi + 2.0, kMaxDepth, rel_tol * 1e-2);
    };
    total += GK::integrate(outer, lo, hi, kMaxDepth, rel_tol);
  }
  return total;
}

}  // namespace

double exact_elbo_n3(const VariationalParams& params, const Alignment& a, const PriorConfig& prior,
                     double rel_tol) {
  return integrate_n3(params, rel_tol, [&](const UltrametricTree& tree, double log_q) {
    return log_likelihood(a, tree) + log_prior(tree, prior) - log_q;
  });
}

double variational_mass_n3(const VariationalParams& params, double rel_tol) {
  return integrate_n3(params, rel_tol, [](const UltrametricTree&, double) { return 1.0; });
}

}  // namespace vipr
