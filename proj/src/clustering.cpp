#include "vipr/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace vipr {
namespace {

/// Union-find over taxa carrying the clade of each cluster root.
class Clusters {
 public:
  explicit Clusters(std::size_t n) : parent_(n), clade_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
    for (std::size_t i = 0; i < n; ++i) clade_[i] = Clade::singleton(n, i);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  Bipartition merge(std::size_t u, std::size_t v) {
    const std::size_t ru = find(u), rv = find(v);
    Bipartition bp{clade_[ru], clade_[rv]};
    parent_[rv] = ru;
    clade_[ru] = clade_[ru] | clade_[rv];
    clade_[rv] = Clade();
    return bp;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<Clade> clade_;
};

ClusteringResult replay(const PairMatrix& matrix, const std::vector<std::size_t>& ordered_pairs) {
  const std::size_t n = matrix.n_taxa();
  const auto pairs = pair_list(n);
  Clusters clusters(n);
  std::vector<Bipartition> events;
  std::vector<double> times;
  events.reserve(n - 1);
  times.reserve(n - 1);
  for (std::size_t k : ordered_pairs) {
    events.push_back(clusters.merge(pairs[k].first, pairs[k].second));
    times.push_back(matrix.at_flat(k));
  }
  return {UltrametricTree(n, std::move(events), std::move(times)), ordered_pairs};
}

}  // namespace

ClusteringResult single_linkage_naive(const PairMatrix& matrix) {
  const std::size_t n = matrix.n_taxa();
  const auto pairs = pair_list(n);
  // cluster id per taxon; pairs with equal ids have coalesced
  std::vector<std::size_t> cluster(n);
  std::iota(cluster.begin(), cluster.end(), 0);
  std::vector<std::size_t> selected;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best = pairs.size();
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (cluster[pairs[k].first] == cluster[pairs[k].second]) continue;
      if (matrix.at_flat(k) < best_value) {
        best_value = matrix.at_flat(k);
        best = k;
      }
    }
    selected.push_back(best);
    const std::size_t keep = cluster[pairs[best].first];
    const std::size_t drop = cluster[pairs[best].second];
    for (auto& c : cluster)
      if (c == drop) c = keep;
  }
  return replay(matrix, selected);
}

ClusteringResult single_linkage_fast(const PairMatrix& matrix) {
  const std::size_t n = matrix.n_taxa();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  struct Key {
    double value;
    std::size_t pair;
    bool operator<(const Key& o) const {
      return value < o.value || (value == o.value && pair < o.pair);
    }
  };
  std::vector<bool> in_tree(n, false);
  std::vector<Key> best(n, Key{kInf, std::numeric_limits<std::size_t>::max()});
  std::vector<Key> mst;
  mst.reserve(n - 1);

  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const std::size_t k = pair_index(n, current, v);
      const Key cand{matrix.at_flat(k), k};
      if (cand < best[v]) best[v] = cand;
      if (next == n || best[v] < best[next]) next = v;
    }
    in_tree[next] = true;
    mst.push_back(best[next]);
    current = next;
  }
  std::sort(mst.begin(), mst.end());
  std::vector<std::size_t> ordered;
  ordered.reserve(mst.size());
  for (const auto& key : mst) ordered.push_back(key.pair);
  return replay(matrix, ordered);
}

}  // namespace vipr
