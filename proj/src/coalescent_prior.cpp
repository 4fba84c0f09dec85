#include "vipr/coalescent_prior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vipr {
namespace {

void check(const PriorConfig& cfg) {
  if (!(cfg.n_e > 0.0) || !std::isfinite(cfg.n_e))
    throw std::invalid_argument("effective population size must be positive");
}

}  // namespace

double coalescent_rate(std::size_t k, double n_e) {
  return 0.5 * static_cast<double>(k) * static_cast<double>(k - 1) / n_e;
}

double coalescent_log_prefactor(std::size_t n_taxa) {
  const double n = static_cast<double>(n_taxa);
  return (n - 1.0) * std::numbers::ln2 - std::lgamma(n + 1.0) - std::lgamma(n);
}

double log_prior_times(const std::vector<double>& times, const PriorConfig& cfg) {
  check(cfg);
  const std::size_t n_taxa = times.size() + 1;
  double total = coalescent_log_prefactor(n_taxa);
  double previous = 0.0;
  for (std::size_t e = 0; e < times.size(); ++e) {
    if (!std::isfinite(times[e]))
      throw std::invalid_argument("coalescent time " + std::to_string(e) + " is not finite");
    const double hold = times[e] - previous;
    if (hold < 0.0)
      throw std::invalid_argument("negative hold time before event " + std::to_string(e));
    const double rate = coalescent_rate(n_taxa - e, cfg.n_e);
    total += std::log(rate) - rate * hold;
    previous = times[e];
  }
  return total;
}

double log_prior(const UltrametricTree& tree, const PriorConfig& cfg) {
  return log_prior_times(tree.times(), cfg);
}

std::vector<double> log_prior_time_gradient(const std::vector<double>& times,
                                            const PriorConfig& cfg) {
  check(cfg);
  const std::size_t n_taxa = times.size() + 1;
  std::vector<double> grad(times.size());
  for (std::size_t e = 0; e < times.size(); ++e) {
    // t_e ends the epoch with n-e lineages and starts the one with n-e-1.
    grad[e] = -coalescent_rate(n_taxa - e, cfg.n_e);
    if (e + 1 < times.size()) grad[e] += coalescent_rate(n_taxa - e - 1, cfg.n_e);
  }
  return grad;
}

}  // namespace vipr
