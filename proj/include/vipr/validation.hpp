#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vipr {

enum class CheckLevel { kFast, kFull };

struct CheckOptions {
  CheckLevel level = CheckLevel::kFull;
  std::uint64_t seed = 20190416;
  std::size_t threads = 1;
  std::ostream* log = nullptr;  ///< progress and per-check diagnostics
};

struct CheckResult {
  int criterion = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// One line per result: "PASS [3] title: detail (1.2 s)".
std::string format_check_line(const CheckResult& r);

// The nine acceptance checks. kFull uses the sample sizes and tolerances of
// the acceptance criteria; kFast shrinks the sample sizes (tolerances stay
// expressed in standard errors, so they widen accordingly).
CheckResult check_density_cells(const CheckOptions& opts);
CheckResult check_likelihood_oracle(const CheckOptions& opts);
CheckResult check_prior_normalization(const CheckOptions& opts);
CheckResult check_gradients(const CheckOptions& opts);
CheckResult check_estimator_unbiasedness(const CheckOptions& opts);
CheckResult check_evidence_recovery(const CheckOptions& opts);
CheckResult check_topology_recovery(const CheckOptions& opts);
CheckResult check_scaling(const CheckOptions& opts);
CheckResult check_determinism(const CheckOptions& opts);

/// Runs the selected criteria (all when empty) in order.
std::vector<CheckResult> run_checks(const CheckOptions& opts, const std::vector<int>& criteria = {});

struct ScalingRow {
  std::size_t n_taxa = 0;
  std::string path;  ///< "density_gradient", "sample" or an estimator name
  double seconds_per_iter = 0.0;
  std::size_t repetitions = 0;
};

/// Per-iteration wallclock for each N: the log_density + gradient path on
/// trees drawn from q, tree sampling alone, and one full gradient iteration
/// (batch of 10 on a simulated alignment of `n_sites`) for each estimator.
std::vector<ScalingRow> run_scaling_benchmark(const std::vector<std::size_t>& taxa,
                                              std::size_t iters, std::uint64_t seed,
                                              std::size_t n_sites = 100);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slope per path over the rows.
std::vector<std::pair<std::string, double>> scaling_slopes(const std::vector<ScalingRow>& rows);

}  // namespace vipr
