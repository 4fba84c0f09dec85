#include "vipr/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numeric>

namespace vipr {
namespace {

constexpr std::size_t kMaxConsecutiveSkips = 50;

// Stream ids keep training batches and MLL evaluations on disjoint RNG streams.
std::uint64_t train_stream(std::size_t iteration) { return 2 * static_cast<std::uint64_t>(iteration); }
std::uint64_t eval_stream(std::size_t iteration) { return 2 * static_cast<std::uint64_t>(iteration) + 1; }

std::string fmt(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

void RunConfig::validate() const {
  std::vector<std::string> problems;
  if (batch_size < 1) problems.emplace_back("batch size must be >= 1");
  if (estimator != EstimatorKind::kReparam && batch_size < 2)
    problems.emplace_back(estimator_name(estimator) + " needs batch size >= 2");
  if (eval_every < 1) problems.emplace_back("eval cadence must be >= 1");
  if (eval_samples < 2) problems.emplace_back("eval sample count must be >= 2");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    problems.emplace_back("learning rate must be finite and > 0");
  if (max_iterations < 1) problems.emplace_back("iteration limit must be >= 1");
  if (wallclock_budget_s < 0.0) problems.emplace_back("wallclock budget must be >= 0");
  if (problems.empty()) return;
  std::string msg = "invalid run configuration:";
  for (const auto& p : problems) msg += " " + p + ";";
  throw std::invalid_argument(msg);
}

TrainResult train(const RunConfig& run, const Alignment& a, const PriorConfig& prior,
                  const VariationalParams& init, const EvalCallback& on_eval) {
  run.validate();
  if (init.taxa() != a.taxa())
    throw std::invalid_argument("initial parameters and alignment have different taxa");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  TrainResult result{init, {}, {}, 0};
  AdamState adam(init.dim(), run.learning_rate);
  std::vector<double> theta = init.flat();
  BatchOptions opts{run.estimator == EstimatorKind::kReparam, run.threads};
  std::size_t consecutive_skips = 0;
  std::string last_error;

  for (std::size_t iter = 1; iter <= run.max_iterations; ++iter) {
    if (!run.deterministic && run.wallclock_budget_s > 0.0 && elapsed() >= run.wallclock_budget_s)
      break;

    bool stepped = false;
    double elbo = NAN, grad_norm = NAN;
    try {
      const auto batch = evaluate_batch(result.params, a, prior, run.batch_size, run.seed,
                                        train_stream(iter), opts);
      const auto est = estimate_gradient(run.estimator, batch);
      elbo = est.elbo_estimate;
      grad_norm = std::sqrt(std::inner_product(est.grad.begin(), est.grad.end(),
                                               est.grad.begin(), 0.0));
      stepped = adam_step(adam, theta, est.grad);
      if (!stepped) last_error = "non-finite gradient";
    } catch (const SampleError& e) {
      last_error = e.what();
    }
    if (stepped) {
      result.params.set_flat(theta);
      consecutive_skips = 0;
    } else {
      ++result.skipped_iterations;
      if (++consecutive_skips > kMaxConsecutiveSkips)
        throw TrainingAborted("training aborted at iteration " + std::to_string(iter) + " after " +
                              std::to_string(consecutive_skips) +
                              " consecutive skipped updates; last error: " + last_error);
    }
    result.elbo_history.push_back(elbo);

    if (iter % run.eval_every == 0 || iter == run.max_iterations) {
      const auto mll = estimate_mll(result.params, a, prior, run.eval_samples, run.seed,
                                    eval_stream(iter), run.threads);
      TraceRecord rec{iter, run.deterministic ? 0.0 : elapsed(), elbo, mll.estimate,
                      mll.standard_error, grad_norm};
      result.trace.push_back(rec);
      if (on_eval) on_eval(result.params, rec);
    }
  }
  return result;
}

double selection_statistic(const std::vector<TraceRecord>& trace, std::size_t last) {
  if (trace.empty()) return -INFINITY;
  const std::size_t n = std::min(last, trace.size());
  double s = 0.0;
  for (std::size_t i = trace.size() - n; i < trace.size(); ++i) s += trace[i].mll;
  return std::isfinite(s) ? s / static_cast<double>(n) : -INFINITY;
}

SweepResult sweep(const RunConfig& run, const SweepConfig& grid, const Alignment& a,
                  const PriorConfig& prior, const VariationalParams& init) {
  if (grid.learning_rates.empty() || grid.restarts < 1)
    throw std::invalid_argument("sweep needs at least one learning rate and one restart");
  SweepResult out{TrainResult{init, {}, {}, 0}, {}, {}};
  bool have_best = false;
  std::size_t cell = 0;
  for (double lr : grid.learning_rates) {
    for (std::size_t r = 0; r < grid.restarts; ++r, ++cell) {
      RunConfig cfg = run;
      cfg.learning_rate = lr;
      cfg.seed = run.seed + 1000003ULL * cell;
      SweepEntry entry{lr, r, cfg.seed, -INFINITY, false, {}};
      try {
        auto res = train(cfg, a, prior, init);
        entry.statistic = selection_statistic(res.trace);
        if (!have_best || entry.statistic > out.best_entry.statistic) {
          out.best = std::move(res);
          out.best_entry = entry;
          have_best = true;
        }
      } catch (const std::exception& e) {
        entry.failed = true;
        entry.error = e.what();
      }
      out.leaderboard.push_back(entry);
    }
  }
  if (!have_best) throw std::runtime_error("every sweep run failed");
  std::stable_sort(out.leaderboard.begin(), out.leaderboard.end(),
                   [](const SweepEntry& x, const SweepEntry& y) {
                     if (x.failed != y.failed) return !x.failed;
                     return x.statistic > y.statistic;
                   });
  return out;
}

VariationalParams initialize_from_trees(const std::vector<UltrametricTree>& trees,
                                        const std::vector<std::string>& taxa, double sigma_min) {
  if (trees.size() < 2) throw std::invalid_argument("initialization needs at least two trees");
  const std::size_t n = taxa.size();
  for (const auto& t : trees)
    if (t.n_taxa() != n) throw std::invalid_argument("trees disagree on the taxon set");
  const std::size_t p = n_pairs(n);
  std::vector<double> sum(p, 0.0), sum_sq(p, 0.0);
  for (const auto& t : trees) {
    const auto events = t.pair_events();
    for (std::size_t k = 0; k < p; ++k) {
      const double time = t.time(events[k]);
      if (!(time > 0.0)) throw std::invalid_argument("tree with a zero coalescent time");
      const double x = std::log(time);
      sum[k] += x;
      sum_sq[k] += x * x;
    }
  }
  const double m = static_cast<double>(trees.size());
  std::vector<double> mu(p), log_sigma(p);
  for (std::size_t k = 0; k < p; ++k) {
    mu[k] = sum[k] / m;
    const double var = std::max(0.0, (sum_sq[k] - m * mu[k] * mu[k]) / (m - 1.0));
    log_sigma[k] = std::log(std::max(std::sqrt(var), sigma_min));
  }
  return VariationalParams(taxa, std::move(mu), std::move(log_sigma));
}

VariationalParams initialize_from_distances(const Alignment& a, double sigma, double t_floor) {
  const std::size_t n = a.n_taxa();
  const std::size_t p = n_pairs(n);
  const auto& w = a.pattern_weights();
  std::vector<double> mu(p);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      double comparable = 0.0, differing = 0.0;
      for (std::size_t q = 0; q < a.n_patterns(); ++q) {
        const Base x = a.pattern_state(u, q), y = a.pattern_state(v, q);
        if (x == kMissing || y == kMissing) continue;
        comparable += w[q];
        if (x != y) differing += w[q];
      }
      double t = t_floor;
      if (comparable > 0.0) {
        const double p_hat = std::min(differing / comparable, 0.74);
        const double d = -0.75 * std::log(1.0 - 4.0 * p_hat / 3.0);
        t = std::max(d / 2.0, t_floor);
      }
      mu[pair_index(n, u, v)] = std::log(t);
    }
  }
  return VariationalParams(a.taxa(), std::move(mu), std::vector<double>(p, std::log(sigma)));
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "iteration,elapsed_s,elbo,mll,mll_se,grad_norm\n";
  for (const auto& r : trace)
    out << r.iteration << ',' << fmt(r.elapsed_s) << ',' << fmt(r.elbo) << ',' << fmt(r.mll) << ','
        << fmt(r.mll_se) << ',' << fmt(r.grad_norm) << '\n';
}

}  // namespace vipr
