#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vipr/adam.hpp"
#include "vipr/alignment.hpp"
#include "vipr/coalescent_prior.hpp"
#include "vipr/estimators.hpp"
#include "vipr/variational.hpp"

namespace vipr {

struct RunConfig {
  EstimatorKind estimator = EstimatorKind::kLoor;
  std::size_t batch_size = 10;
  double learning_rate = 0.01;
  std::size_t max_iterations = 10000;
  double wallclock_budget_s = 0.0;  ///< 0 disables; ignored in deterministic mode
  std::size_t eval_every = 10;
  std::size_t eval_samples = 50;
  std::uint64_t seed = 1;
  bool deterministic = false;
  std::size_t threads = 1;

  /// Throws std::invalid_argument describing every violated constraint.
  void validate() const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double elapsed_s = 0.0;
  double elbo = 0.0;
  double mll = 0.0;
  double mll_se = 0.0;
  double grad_norm = 0.0;
};

struct TrainResult {
  VariationalParams params;
  std::vector<TraceRecord> trace;
  std::vector<double> elbo_history;  ///< batch ELBO estimate per iteration
  std::size_t skipped_iterations = 0;
};

class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Called after every MLL evaluation with the current parameters.
using EvalCallback = std::function<void(const VariationalParams&, const TraceRecord&)>;

/// Stochastic-gradient ascent on the variational objective with Adam until
/// the iteration or wallclock budget is exhausted. Every eval_every
/// iterations an importance-sampling MLL estimate is appended to the trace,
/// drawn from its own RNG streams. Throws TrainingAborted after more than 50
/// consecutive iterations with non-finite gradients.
TrainResult train(const RunConfig& run, const Alignment& a, const PriorConfig& prior,
                  const VariationalParams& init, const EvalCallback& on_eval = {});

/// The "highest average MLL in the last 10 estimates" statistic.
double selection_statistic(const std::vector<TraceRecord>& trace, std::size_t last = 10);

struct SweepEntry {
  double learning_rate = 0.0;
  std::size_t restart = 0;
  std::uint64_t seed = 0;
  double statistic = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  TrainResult best;
  SweepEntry best_entry;
  std::vector<SweepEntry> leaderboard;  ///< sorted by statistic, descending; failures last
};

struct SweepConfig {
  std::vector<double> learning_rates{0.001, 0.003, 0.01, 0.03};
  std::size_t restarts = 10;
};

/// Runs learning_rates x restarts (distinct seeds derived from run.seed) and
/// keeps the run with the highest selection statistic. Throws
/// std::runtime_error if every run fails.
SweepResult sweep(const RunConfig& run, const SweepConfig& grid, const Alignment& a,
                  const PriorConfig& prior, const VariationalParams& init);

/// Per pair: mean and sample standard deviation (floored at sigma_min) of the
/// log coalescent times across the trees.
VariationalParams initialize_from_trees(const std::vector<UltrametricTree>& trees,
                                        const std::vector<std::string>& taxa,
                                        double sigma_min = 0.01);

/// Per pair: JC-corrected distance from the proportion of differing observed
/// sites, mu = log(max(d / 2, t_floor)), sigma = `sigma` for every pair.
VariationalParams initialize_from_distances(const Alignment& a, double sigma = 0.5,
                                            double t_floor = 1e-4);

/// CSV with header iteration,elapsed_s,elbo,mll,mll_se,grad_norm.
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace vipr
