#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vipr/alignment.hpp"
#include "vipr/coalescent_prior.hpp"
#include "vipr/tree.hpp"
#include "vipr/variational.hpp"

namespace vipr {

/// Kingman coalescent: with k lineages wait Exponential(C(k,2)/n_e), then
/// merge a uniformly chosen pair of lineages.
UltrametricTree simulate_coalescent(std::size_t n_taxa, double n_e, Rng& rng);

/// Jukes-Cantor evolution down the tree from a uniform root state.
Alignment simulate_sequences(const UltrametricTree& tree, const std::vector<std::string>& taxa,
                             std::size_t n_sites, Rng& rng);

/// "t1", "t2", ...
std::vector<std::string> default_taxon_names(std::size_t n_taxa);

/// Every ranked topology (ordered merge sequence) over n taxa: 1, 3, 18, 180 ...
std::vector<std::vector<Bipartition>> enumerate_ranked_topologies(std::size_t n_taxa);

struct ExactPosterior {
  std::vector<std::vector<Bipartition>> topologies;
  std::vector<double> log_contributions;  ///< log of each topology's evidence share
  double log_evidence = 0.0;
  double max_quadrature_error = 0.0;      ///< largest relative error estimate reported
};

/// log p(Y) for N in {2, 3, 4}, integrating likelihood x prior over the
/// ordered times of each ranked topology by nested adaptive Gauss-Kronrod
/// quadrature. The hold time of each epoch is mapped to [0, 1) through the
/// exponential CDF of that epoch's coalescent rate; the prior density itself
/// is evaluated by log_prior, so the M = 0 case checks its normalization.
ExactPosterior exact_evidence(const Alignment& a, const PriorConfig& prior,
                              double rel_tol = 1e-6);

/// The single-sample objective E_q[log p(tree, Y) - log q(tree)] for N = 3
/// by 2-D quadrature over (log t1, log(t2 - t1)) for each topology.
double exact_elbo_n3(const VariationalParams& params, const Alignment& a, const PriorConfig& prior,
                     double rel_tol = 1e-10);

/// Integral of q over all N = 3 trees (should be 1).
double variational_mass_n3(const VariationalParams& params, double rel_tol = 1e-10);

}  // namespace vipr
