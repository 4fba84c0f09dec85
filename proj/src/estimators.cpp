#include "vipr/estimators.hpp"

#include <cmath>
#include <numeric>
#include <optional>

#include "vipr/likelihood.hpp"
#include "vipr/math.hpp"
#include "vipr/parallel.hpp"

namespace vipr {

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "loor") return EstimatorKind::kLoor;
  if (name == "reparam") return EstimatorKind::kReparam;
  if (name == "vimco") return EstimatorKind::kVimco;
  throw std::invalid_argument("unknown estimator '" + name + "' (expected loor, reparam or vimco)");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kLoor: return "loor";
    case EstimatorKind::kReparam: return "reparam";
    case EstimatorKind::kVimco: return "vimco";
  }
  return "?";
}

std::vector<double> BatchEvaluation::f_values() const {
  std::vector<double> f;
  f.reserve(samples.size());
  for (const auto& s : samples) f.push_back(s.f);
  return f;
}

SampleEvaluation evaluate_sample(const VariationalParams& params, const Alignment& a,
                                 const PriorConfig& prior, TreeSample sample,
                                 bool needs_pathwise) {
  SampleEvaluation ev{std::move(sample), 0.0, 0.0, 0.0, 0.0, {}, {}};
  const auto& tree = ev.sample.tree;
  auto dq = log_density_gradient(params, tree);
  ev.log_q = dq.log_q;
  ev.grad_log_q = std::move(dq.grad);
  ev.log_prior = log_prior(tree, prior);
  if (!needs_pathwise) {
    ev.log_likelihood = log_likelihood(a, tree);
  } else {
    const auto jac = pathwise_time_jacobian(params, tree, ev.sample.noise);
    const auto lik = log_likelihood_time_gradient(a, tree);
    const auto dprior = log_prior_time_gradient(tree.times(), prior);
    ev.log_likelihood = lik.log_likelihood;
    const std::size_t np = params.n_pairs();
    ev.pathwise_grad.resize(2 * np);
    for (std::size_t i = 0; i < 2 * np; ++i) ev.pathwise_grad[i] = -ev.grad_log_q[i];
    for (std::size_t e = 0; e < tree.n_events(); ++e) {
      const double df_dt = lik.d_times[e] + dprior[e] - dq.d_times[e];
      ev.pathwise_grad[jac[e].pair] += df_dt * jac[e].dt_dloc;
      ev.pathwise_grad[np + jac[e].pair] += df_dt * jac[e].dt_dlog_scale;
    }
  }
  ev.f = ev.log_likelihood + ev.log_prior - ev.log_q;
  return ev;
}

BatchEvaluation evaluate_batch(const VariationalParams& params, const Alignment& a,
                               const PriorConfig& prior, std::size_t k, std::uint64_t seed,
                               std::uint64_t stream, const BatchOptions& opts) {
  if (k < 1) throw std::invalid_argument("batch size must be at least 1");
  std::vector<std::optional<SampleEvaluation>> slots(k);
  parallel_for(k, opts.threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, stream, i);
    for (int attempt = 0;; ++attempt) {
      try {
        slots[i] = evaluate_sample(params, a, prior, sample_tree(params, rng), opts.needs_pathwise);
        break;
      } catch (const ClusteringTieError&) {
        if (attempt >= 100) throw SampleError(i, "repeated clustering ties");
      }
    }
    if (!std::isfinite(slots[i]->f))
      throw SampleError(i, "non-finite f value (log-likelihood " +
                               std::to_string(slots[i]->log_likelihood) + ")");
  });
  BatchEvaluation batch;
  batch.samples.reserve(k);
  for (auto& s : slots) batch.samples.push_back(std::move(*s));
  return batch;
}

double elbo_estimate(const std::vector<double>& f) {
  if (f.empty()) throw std::invalid_argument("elbo_estimate of an empty batch");
  return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
}

double multisample_elbo_estimate(const std::vector<double>& f) {
  if (f.empty()) throw std::invalid_argument("multisample_elbo_estimate of an empty batch");
  return log_sum_exp(f) - std::log(static_cast<double>(f.size()));
}

double effective_sample_size(const std::vector<double>& f) {
  if (f.empty()) return 0.0;
  const double hi = *std::max_element(f.begin(), f.end());
  double s = 0.0, s2 = 0.0;
  for (double x : f) {
    const double w = std::exp(x - hi);
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

namespace {

GradientEstimate score_function(const BatchEvaluation& batch, const std::vector<double>& coeff) {
  GradientEstimate out;
  out.f_values = batch.f_values();
  out.effective_sample_size = effective_sample_size(out.f_values);
  const std::size_t dim = batch.samples.front().grad_log_q.size();
  out.grad.assign(dim, 0.0);
  for (std::size_t k = 0; k < batch.samples.size(); ++k) {
    const auto& g = batch.samples[k].grad_log_q;
    for (std::size_t i = 0; i < dim; ++i) out.grad[i] += coeff[k] * g[i];
  }
  return out;
}

void require_two(const BatchEvaluation& batch, const char* name) {
  if (batch.samples.size() < 2)
    throw std::invalid_argument(std::string(name) + " needs a batch of at least 2 samples");
}

}  // namespace

GradientEstimate grad_loor(const BatchEvaluation& batch) {
  require_two(batch, "LOOR");
  const auto f = batch.f_values();
  const double kk = static_cast<double>(f.size());
  const double sum = std::accumulate(f.begin(), f.end(), 0.0);
  std::vector<double> coeff(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double loo_mean = (sum - f[k]) / (kk - 1.0);
    coeff[k] = (f[k] - loo_mean) / kk;
  }
  auto out = score_function(batch, coeff);
  out.elbo_estimate = elbo_estimate(f);
  return out;
}

GradientEstimate grad_reparam(const BatchEvaluation& batch) {
  if (batch.samples.empty()) throw std::invalid_argument("reparameterization needs samples");
  GradientEstimate out;
  out.f_values = batch.f_values();
  out.effective_sample_size = effective_sample_size(out.f_values);
  out.elbo_estimate = elbo_estimate(out.f_values);
  const std::size_t dim = batch.samples.front().pathwise_grad.size();
  if (dim == 0) throw std::invalid_argument("batch was evaluated without pathwise quantities");
  out.grad.assign(dim, 0.0);
  const double inv_k = 1.0 / static_cast<double>(batch.samples.size());
  for (const auto& s : batch.samples)
    for (std::size_t i = 0; i < dim; ++i) out.grad[i] += inv_k * s.pathwise_grad[i];
  return out;
}

std::vector<double> vimco_learning_signals(const std::vector<double>& f) {
  if (f.size() < 2) throw std::invalid_argument("VIMCO needs a batch of at least 2 samples");
  const double kk = static_cast<double>(f.size());
  const double full = multisample_elbo_estimate(f);
  const double sum = std::accumulate(f.begin(), f.end(), 0.0);
  std::vector<double> swapped(f);
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    swapped[k] = (sum - f[k]) / (kk - 1.0);
    out[k] = full - multisample_elbo_estimate(swapped);
    swapped[k] = f[k];
  }
  return out;
}

GradientEstimate grad_vimco(const BatchEvaluation& batch) {
  require_two(batch, "VIMCO");
  const auto f = batch.f_values();
  const auto signal = vimco_learning_signals(f);
  std::vector<double> weights(f.size());
  softmax(f, weights);
  std::vector<double> coeff(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) coeff[k] = signal[k] - weights[k];
  auto out = score_function(batch, coeff);
  out.elbo_estimate = multisample_elbo_estimate(f);
  return out;
}

GradientEstimate estimate_gradient(EstimatorKind kind, const BatchEvaluation& batch) {
  switch (kind) {
    case EstimatorKind::kLoor: return grad_loor(batch);
    case EstimatorKind::kReparam: return grad_reparam(batch);
    case EstimatorKind::kVimco: return grad_vimco(batch);
  }
  throw std::invalid_argument("unknown estimator");
}

MllEstimate mll_from_log_weights(const std::vector<double>& f) {
  if (f.size() < 2) throw std::invalid_argument("MLL estimate needs at least 2 samples");
  const double n = static_cast<double>(f.size());
  const double hi = *std::max_element(f.begin(), f.end());
  if (hi == kNegInf) throw std::runtime_error("all importance weights are zero");
  double s = 0.0;
  for (double x : f) s += std::exp(x - hi);
  MllEstimate out;
  out.estimate = hi + std::log(s) - std::log(n);
  out.effective_sample_size = effective_sample_size(f);
  // Jackknife over the log-mean-exp.
  std::vector<double> loo(f.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double share = std::exp(f[i] - hi) / s;
    loo[i] = hi + std::log(s) + std::log1p(-share) - std::log(n - 1.0);
    mean += loo[i];
  }
  mean /= n;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  out.standard_error = std::isfinite(ss) ? std::sqrt((n - 1.0) / n * ss) : INFINITY;
  return out;
}

MllEstimate estimate_mll(const VariationalParams& params, const Alignment& a,
                         const PriorConfig& prior, std::size_t n_samples, std::uint64_t seed,
                         std::uint64_t stream, std::size_t threads) {
  if (n_samples < 2) throw std::invalid_argument("MLL estimate needs at least 2 samples");
  std::vector<double> f(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, stream, i);
    const auto s = sample_tree(params, rng);
    f[i] = log_likelihood(a, s.tree) + log_prior(s.tree, prior) - log_density(params, s.tree).log_q;
  });
  return mll_from_log_weights(f);
}

}  // namespace vipr
