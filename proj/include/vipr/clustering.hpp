#pragma once

#include <cstddef>
#include <vector>

#include "vipr/tree.hpp"

namespace vipr {

/// Tree produced by single-linkage clustering together with, for every event,
/// the flat pair index whose matrix entry realized that event's time.
struct ClusteringResult {
  UltrametricTree tree;
  std::vector<std::size_t> selected_pairs;
};

/// Single-linkage clustering as a literal argmin loop: at each step pick the
/// smallest not-yet-coalesced pair and merge the two clusters containing it.
/// O(N^3). Ties are broken by the lowest flat pair index.
ClusteringResult single_linkage_naive(const PairMatrix& matrix);

/// Same output as single_linkage_naive in O(N^2): a Prim minimum spanning
/// tree under the (value, flat index) order, replayed in that order.
ClusteringResult single_linkage_fast(const PairMatrix& matrix);

inline UltrametricTree single_linkage(const PairMatrix& matrix) {
  return single_linkage_fast(matrix).tree;
}

}  // namespace vipr
