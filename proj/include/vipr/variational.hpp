#pragma once

#include <concepts>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "vipr/clustering.hpp"
#include "vipr/tree.hpp"

namespace vipr {

/// Partial derivatives of a per-pair log density term.
struct PairTermGrad {
  double d_loc = 0.0;
  double d_log_scale = 0.0;
  double d_t = 0.0;
};

/// A continuous distribution for one matrix entry t^{u,v} with two
/// unconstrained parameters, sampled by a transform of standard normal noise.
template <class D>
concept PairDistribution = requires(double t, double loc, double log_scale, double z) {
  { D::log_pdf(t, loc, log_scale) } -> std::convertible_to<double>;
  { D::log_survival(t, loc, log_scale) } -> std::convertible_to<double>;
  { D::log_pdf_grad(t, loc, log_scale) } -> std::same_as<PairTermGrad>;
  { D::log_survival_grad(t, loc, log_scale) } -> std::same_as<PairTermGrad>;
  { D::transform(loc, log_scale, z) } -> std::convertible_to<double>;
};

/// t = exp(mu + sigma z): the distribution of log t is N(mu, sigma^2).
/// Parameters are (mu, log sigma).
struct LogNormalPair {
  static double log_pdf(double t, double mu, double log_sigma);
  static double log_survival(double t, double mu, double log_sigma);
  static PairTermGrad log_pdf_grad(double t, double mu, double log_sigma);
  static PairTermGrad log_survival_grad(double t, double mu, double log_sigma);
  static double transform(double mu, double log_sigma, double z);
};

/// Log-normal log density; throws std::invalid_argument for t <= 0 or sigma <= 0.
double lognormal_logpdf(double t, double mu, double sigma);
/// log P(T > t) for a log-normal T, accurate far into the upper tail.
double lognormal_log_survival(double t, double mu, double sigma);

/// Per-pair parameters (mu, log sigma), indexed like PairMatrix.
class VariationalParams {
 public:
  VariationalParams(std::vector<std::string> taxa, std::vector<double> mu,
                    std::vector<double> log_sigma);
  /// Every pair gets the same (mu, sigma).
  static VariationalParams uniform(std::vector<std::string> taxa, double mu, double sigma);

  std::size_t n_taxa() const { return taxa_.size(); }
  std::size_t n_pairs() const { return mu_.size(); }
  const std::vector<std::string>& taxa() const { return taxa_; }
  const std::vector<double>& mu() const { return mu_; }
  const std::vector<double>& log_sigma() const { return log_sigma_; }
  double sigma(std::size_t k) const;

  /// Unconstrained parameter vector mu ++ log_sigma.
  std::vector<double> flat() const;
  void set_flat(const std::vector<double>& values);
  std::size_t dim() const { return 2 * mu_.size(); }

  bool operator==(const VariationalParams&) const = default;

 private:
  std::vector<std::string> taxa_;
  std::vector<double> mu_;
  std::vector<double> log_sigma_;
};

/// Checkpoint JSON: {"taxa": [...], "pairs": [{"u", "v", "mu", "sigma"}, ...]}.
std::string params_to_json(const VariationalParams& params);
VariationalParams params_from_json(const std::string& text);
void write_params_file(const std::string& path, const VariationalParams& params);
VariationalParams read_params_file(const std::string& path);

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream, index), so that sample k of
/// iteration i is reproducible regardless of scheduling.
Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

struct TreeSample {
  UltrametricTree tree;
  std::vector<double> matrix;                ///< t^{u,v} per pair
  std::vector<double> noise;                 ///< z^{u,v} per pair
  std::vector<std::size_t> selected_pairs;   ///< pair realizing each event
};

/// Draws z ~ N(0, I), sets t = transform(params, z) and clusters it.
template <PairDistribution D = LogNormalPair>
TreeSample sample_tree(const VariationalParams& params, Rng& rng);

/// Same, from given noise.
template <PairDistribution D = LogNormalPair>
TreeSample tree_from_noise(const VariationalParams& params, std::vector<double> noise);

/// Log density of a tree under the single-linkage variational family,
/// evaluated event by event with every pair visited once.
struct DensityBreakdown {
  double log_q = 0.0;
  /// Per event: log(sum_pairs q/Q) + sum_pairs log Q over the event's cross pairs.
  std::vector<double> event_terms;
  /// Per pair, at the time of the event where the pair coalesces.
  std::vector<double> pair_log_pdf;
  std::vector<double> pair_log_survival;
};

/// Throws std::invalid_argument for a taxon-count mismatch or a non-positive
/// event time, std::runtime_error for a non-finite result.
template <PairDistribution D = LogNormalPair>
DensityBreakdown log_density(const VariationalParams& params, const UltrametricTree& tree);

struct DensityGradient {
  double log_q = 0.0;
  std::vector<double> grad;     ///< d log q / d (mu ++ log_sigma)
  std::vector<double> d_times;  ///< d log q / d t_n at fixed parameters
};

template <PairDistribution D = LogNormalPair>
DensityGradient log_density_gradient(const VariationalParams& params, const UltrametricTree& tree);

/// Raised when the minimum cross-pair entry of an event is not unique.
class ClusteringTieError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// For event n: the pair whose entry realized t_n and the pathwise partials
/// of t_n with respect to that pair's parameters at fixed noise.
struct PathwiseEntry {
  std::size_t pair = 0;
  double dt_dloc = 0.0;
  double dt_dlog_scale = 0.0;
};

/// Selection map of a sampled tree. Throws std::invalid_argument when the
/// noise does not reproduce the tree's times and ClusteringTieError when an
/// event's minimum is attained by more than one pair.
std::vector<PathwiseEntry> pathwise_time_jacobian(const VariationalParams& params,
                                                  const UltrametricTree& tree,
                                                  const std::vector<double>& noise);

}  // namespace vipr
