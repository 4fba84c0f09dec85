#pragma once

#include <cstddef>
#include <vector>

#include "vipr/tree.hpp"

namespace vipr {

struct PriorConfig {
  double n_e = 5.0;  ///< effective population size
};

/// Kingman coalescent rate with k lineages, C(k,2) / n_e.
double coalescent_rate(std::size_t k, double n_e);

/// log(2^(N-1) / (N! (N-1)!)), the density prefactor over ranked labeled trees.
double coalescent_log_prefactor(std::size_t n_taxa);

/// Kingman log density of (topology, times) with constant population size.
///
/// While k lineages remain (k = N down to 2) the hold time is
/// h_k = t_{N-k+1} - t_{N-k} with t_0 = 0, contributing log(lambda_k) -
/// lambda_k h_k. The topology enters only through N. Throws
/// std::invalid_argument for n_e <= 0 or non-finite times.
double log_prior(const UltrametricTree& tree, const PriorConfig& cfg);

/// Same density from the ordered time vector alone.
double log_prior_times(const std::vector<double>& times, const PriorConfig& cfg);

/// d log_prior / d t_n for each event.
std::vector<double> log_prior_time_gradient(const std::vector<double>& times,
                                            const PriorConfig& cfg);

}  // namespace vipr
