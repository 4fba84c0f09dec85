#pragma once

#include <string>
#include <vector>

#include "vipr/trainer.hpp"

namespace vipr {

/// Three-panel SVG: MLL estimate versus iteration, then histograms of the
/// sampled trees' total lengths and log-likelihoods.
std::string render_report_svg(const std::vector<TraceRecord>& trace,
                              const std::vector<double>& tree_lengths,
                              const std::vector<double>& log_likelihoods);

}  // namespace vipr
