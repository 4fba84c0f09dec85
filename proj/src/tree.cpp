#include "vipr/tree.hpp"

#include <cmath>
#include <string>

namespace vipr {

std::vector<std::pair<std::size_t, std::size_t>> pair_list(std::size_t n_taxa) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(n_pairs(n_taxa));
  for (std::size_t u = 0; u < n_taxa; ++u)
    for (std::size_t v = u + 1; v < n_taxa; ++v) out.emplace_back(u, v);
  return out;
}

PairMatrix::PairMatrix(std::size_t n_taxa, std::vector<double> values)
    : n_taxa_(n_taxa), values_(std::move(values)) {
  if (n_taxa_ < 2) throw TreeError("pair matrix needs at least two taxa");
  if (values_.size() != n_pairs(n_taxa_))
    throw TreeError("pair matrix for " + std::to_string(n_taxa_) + " taxa needs " +
                    std::to_string(n_pairs(n_taxa_)) + " values, got " +
                    std::to_string(values_.size()));
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (!std::isfinite(values_[k]) || values_[k] <= 0.0)
      throw TreeError("pair matrix entry " + std::to_string(k) +
                      " must be finite and positive, got " + std::to_string(values_[k]));
}

UltrametricTree::UltrametricTree(std::size_t n_taxa, std::vector<Bipartition> events,
                                 std::vector<double> times)
    : n_taxa_(n_taxa), events_(std::move(events)), times_(std::move(times)) {
  if (n_taxa_ < 2) throw TreeError("tree needs at least two taxa");
  if (events_.size() != n_taxa_ - 1 || times_.size() != n_taxa_ - 1)
    throw TreeError("tree over " + std::to_string(n_taxa_) + " taxa needs " +
                    std::to_string(n_taxa_ - 1) + " events and times");
  for (std::size_t n = 0; n < times_.size(); ++n) {
    if (!std::isfinite(times_[n]) || times_[n] < 0.0)
      throw TreeError("coalescent time " + std::to_string(n) + " is negative or non-finite");
    if (n > 0 && times_[n] < times_[n - 1])
      throw TreeError("coalescent times must be nondecreasing (event " + std::to_string(n) + ")");
  }

  // cluster_node[taxon]: node id of the current cluster containing the taxon.
  std::vector<std::size_t> cluster_node(n_taxa_);
  std::vector<Clade> node_clade(2 * n_taxa_ - 1);
  for (std::size_t i = 0; i < n_taxa_; ++i) {
    cluster_node[i] = i;
    node_clade[i] = Clade::singleton(n_taxa_, i);
  }
  children_.resize(events_.size());
  parent_.assign(2 * n_taxa_ - 1, 2 * n_taxa_ - 2);

  auto resolve = [&](const Clade& c, std::size_t n) {
    if (c.words().size() != (n_taxa_ + 63) / 64 || c.empty())
      throw TreeError("event " + std::to_string(n) + " has an empty or mis-sized clade");
    const std::size_t node = cluster_node[c.min_member()];
    if (!(node_clade[node] == c))
      throw TreeError("event " + std::to_string(n) + " does not join two current clusters");
    return node;
  };

  for (std::size_t n = 0; n < events_.size(); ++n) {
    auto& ev = events_[n];
    if (!ev.left.disjoint(ev.right))
      throw TreeError("event " + std::to_string(n) + " has overlapping clades");
    std::size_t a = resolve(ev.left, n);
    std::size_t b = resolve(ev.right, n);
    if (ev.right.precedes(ev.left)) {
      std::swap(ev.left, ev.right);
      std::swap(a, b);
    }
    const std::size_t node = n_taxa_ + n;
    children_[n] = {a, b};
    parent_[a] = node;
    parent_[b] = node;
    node_clade[node] = ev.left | ev.right;
    for (std::size_t taxon : node_clade[node].members()) cluster_node[taxon] = node;
  }
  if (node_clade[root()].size() != n_taxa_)
    throw TreeError("final event does not cover every taxon");
}

std::vector<std::size_t> UltrametricTree::pair_events() const {
  std::vector<std::size_t> out(n_pairs(n_taxa_));
  for (std::size_t n = 0; n < events_.size(); ++n) {
    const auto ws = events_[n].left.members();
    const auto zs = events_[n].right.members();
    for (std::size_t w : ws)
      for (std::size_t z : zs) out[pair_index(n_taxa_, w, z)] = n;
  }
  return out;
}

UltrametricTree UltrametricTree::with_times(std::vector<double> times) const {
  return UltrametricTree(n_taxa_, events_, std::move(times));
}

double coalescent_time_of_pair(const UltrametricTree& tree, std::size_t u, std::size_t v) {
  if (u == v || u >= tree.n_taxa() || v >= tree.n_taxa())
    throw TreeError("coalescent_time_of_pair: taxa must be distinct ids below " +
                    std::to_string(tree.n_taxa()));
  for (std::size_t n = 0; n < tree.n_events(); ++n) {
    const auto& ev = tree.event(n);
    if ((ev.left.contains(u) && ev.right.contains(v)) ||
        (ev.left.contains(v) && ev.right.contains(u)))
      return tree.time(n);
  }
  throw TreeError("pair never coalesces");  // unreachable for a validated tree
}

double tree_length(const UltrametricTree& tree) {
  double total = 0.0;
  for (std::size_t node = 0; node + 1 < tree.n_nodes(); ++node) total += tree.branch_length(node);
  return total;
}

}  // namespace vipr
