#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vipr/alignment.hpp"
#include "vipr/coalescent_prior.hpp"
#include "vipr/variational.hpp"

namespace vipr {

enum class EstimatorKind { kLoor, kReparam, kVimco };

EstimatorKind parse_estimator(const std::string& name);
std::string estimator_name(EstimatorKind kind);

/// One draw from q together with everything the estimators need.
struct SampleEvaluation {
  TreeSample sample;
  double log_likelihood = 0.0;
  double log_prior = 0.0;
  double log_q = 0.0;
  double f = 0.0;                    ///< log p(tree, Y) - log q(tree)
  std::vector<double> grad_log_q;    ///< d log q / d(mu ++ log_sigma)
  std::vector<double> pathwise_grad; ///< d f(g(Z)) / d(mu ++ log_sigma) at fixed Z, when requested
};

struct BatchEvaluation {
  std::vector<SampleEvaluation> samples;
  std::vector<double> f_values() const;
};

struct BatchOptions {
  bool needs_pathwise = false;
  std::size_t threads = 1;
};

/// Raised when a sample's f value is not finite; carries the sample index.
class SampleError : public std::runtime_error {
 public:
  SampleError(std::size_t index, const std::string& what)
      : std::runtime_error("sample " + std::to_string(index) + ": " + what), index(index) {}
  std::size_t index;
};

/// K samples; sample k draws from make_rng(seed, stream, k). With
/// needs_pathwise, draws whose clustering has a tied minimum are redrawn from
/// the same stream.
BatchEvaluation evaluate_batch(const VariationalParams& params, const Alignment& a,
                               const PriorConfig& prior, std::size_t k, std::uint64_t seed,
                               std::uint64_t stream, const BatchOptions& opts = {});

/// Fills grad_log_q and the scalar terms for an already-sampled tree.
SampleEvaluation evaluate_sample(const VariationalParams& params, const Alignment& a,
                                 const PriorConfig& prior, TreeSample sample, bool needs_pathwise);

struct GradientEstimate {
  std::vector<double> grad;  ///< aligned with VariationalParams::flat()
  double elbo_estimate = 0.0;
  std::vector<double> f_values;
  double effective_sample_size = 0.0;
};

double elbo_estimate(const std::vector<double>& f);
/// log-mean-exp of f: the K-sample bound.
double multisample_elbo_estimate(const std::vector<double>& f);
/// (sum w)^2 / sum w^2 for w = exp(f).
double effective_sample_size(const std::vector<double>& f);

/// Leave-one-out REINFORCE: (1/K) sum_k (f_k - mean_{l != k} f_l) grad log q_k.
GradientEstimate grad_loor(const BatchEvaluation& batch);
/// Mean of the per-sample pathwise gradients (biased: ignores topology jumps).
GradientEstimate grad_reparam(const BatchEvaluation& batch);
/// VIMCO for the K-sample bound: sum_k (L - L^{-k} - softmax(f)_k) grad log q_k,
/// where L^{-k} swaps f_k for the mean of the other f values.
GradientEstimate grad_vimco(const BatchEvaluation& batch);

/// Per-sample VIMCO learning signals L - L^{-k}.
std::vector<double> vimco_learning_signals(const std::vector<double>& f);

GradientEstimate estimate_gradient(EstimatorKind kind, const BatchEvaluation& batch);

struct MllEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  double effective_sample_size = 0.0;
};

/// Importance-sampling log evidence: log-mean-exp of f over n draws from q,
/// with a jackknife standard error.
MllEstimate estimate_mll(const VariationalParams& params, const Alignment& a,
                         const PriorConfig& prior, std::size_t n_samples, std::uint64_t seed,
                         std::uint64_t stream, std::size_t threads = 1);
/// Same statistics from precomputed log weights.
MllEstimate mll_from_log_weights(const std::vector<double>& f);

}  // namespace vipr
