#pragma once

#include <cstddef>
#include <vector>

#include "vipr/alignment.hpp"
#include "vipr/kernels/pruning_kernels.hpp"
#include "vipr/subst_model.hpp"
#include "vipr/tree.hpp"

namespace vipr {

/// Per-node conditional likelihoods for every site pattern, with per-pattern
/// power-of-two scaling. Reusable across evaluations to avoid reallocation.
struct PartialLikelihoodTable {
  std::size_t n_patterns = 0;
  /// partials[node]: 4 * n_patterns values; largest entry per pattern in [0.5, 1)
  /// for internal nodes, indicator or all-ones vectors for leaves.
  std::vector<std::vector<double>> partials;
  /// edge[node]: P(branch above node) applied to partials[node] (non-root nodes).
  std::vector<std::vector<double>> edge;
  /// exponents[node]: accumulated base-2 scaling per pattern.
  std::vector<std::vector<std::int32_t>> exponents;

  void reset(std::size_t n_nodes, std::size_t n_patterns);
};

struct LikelihoodOptions {
  const SubstitutionModel* model = nullptr;          // defaults to Jukes-Cantor
  const kernels::PruningKernels* kernels = nullptr;  // defaults to active_kernels()
};

/// log p(alignment | tree) by post-order pruning over site patterns, summing
/// weight * log p(pattern). Returns -inf when some observed pattern has zero
/// probability (only possible with zero-length branches). Throws TreeError if
/// the taxon counts differ and std::runtime_error on a NaN result.
double log_likelihood(const Alignment& a, const UltrametricTree& tree,
                      const LikelihoodOptions& opts = {});

/// Per-pattern log-likelihoods (without weights), in pattern order.
std::vector<double> pattern_log_likelihoods(const Alignment& a, const UltrametricTree& tree,
                                            const LikelihoodOptions& opts = {});

struct LikelihoodGradient {
  double log_likelihood = 0.0;
  /// d log p / d t_n for each event n, topology fixed.
  std::vector<double> d_times;
};

/// Log-likelihood and its derivative with respect to every coalescent time in
/// one post-order plus one pre-order sweep.
LikelihoodGradient log_likelihood_time_gradient(const Alignment& a, const UltrametricTree& tree,
                                                const LikelihoodOptions& opts = {});

/// Direct enumeration of all 4^(N-1) internal-state assignments per pattern,
/// accumulated with log-sum-exp. Independent of the pruning code; used as an
/// oracle. Throws std::invalid_argument for N > 8.
double brute_force_log_likelihood(const Alignment& a, const UltrametricTree& tree);

}  // namespace vipr
