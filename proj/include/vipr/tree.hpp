#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vipr/clade.hpp"

namespace vipr {

class TreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat index of the unordered taxon pair {u, v}, u != v, among the
/// N(N-1)/2 pairs listed as (0,1), (0,2), ..., (0,N-1), (1,2), ...
inline std::size_t pair_index(std::size_t n_taxa, std::size_t u, std::size_t v) {
  if (u > v) std::swap(u, v);
  return u * n_taxa - u * (u + 1) / 2 + (v - u - 1);
}
inline std::size_t n_pairs(std::size_t n_taxa) { return n_taxa * (n_taxa - 1) / 2; }
/// Inverse of pair_index, as (u, v) with u < v, in flat-index order.
std::vector<std::pair<std::size_t, std::size_t>> pair_list(std::size_t n_taxa);

/// The symmetric matrix of strictly positive, finite pairwise values t^{u,v}.
class PairMatrix {
 public:
  /// Throws TreeError on a size mismatch or a non-finite / non-positive entry.
  PairMatrix(std::size_t n_taxa, std::vector<double> values);

  std::size_t n_taxa() const { return n_taxa_; }
  double operator()(std::size_t u, std::size_t v) const { return values_[pair_index(n_taxa_, u, v)]; }
  double at_flat(std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_taxa_;
  std::vector<double> values_;
};

/// One coalescent event: the clades merging at that time. `left` holds the
/// clade with the smaller minimum taxon id.
struct Bipartition {
  Clade left;
  Clade right;
  bool operator==(const Bipartition&) const = default;
};

/// A rooted binary ultrametric tree as its N-1 coalescent events in time order.
///
/// Node numbering: leaves are 0..N-1 (taxon ids), event n is internal node
/// N+n, so the root is node 2N-2. Leaves sit at time 0. Every unordered taxon
/// pair coalesces in exactly one event. Immutable after construction.
class UltrametricTree {
 public:
  /// Validates and canonicalizes (left/right swapped so left.min < right.min).
  /// Times must be finite, >= 0 and nondecreasing; each event must join two
  /// current clusters; the last event must cover every taxon.
  UltrametricTree(std::size_t n_taxa, std::vector<Bipartition> events, std::vector<double> times);

  std::size_t n_taxa() const { return n_taxa_; }
  std::size_t n_events() const { return events_.size(); }
  std::size_t n_nodes() const { return 2 * n_taxa_ - 1; }
  std::size_t root() const { return 2 * n_taxa_ - 2; }

  const Bipartition& event(std::size_t n) const { return events_[n]; }
  const std::vector<Bipartition>& events() const { return events_; }
  double time(std::size_t n) const { return times_[n]; }
  const std::vector<double>& times() const { return times_; }

  bool is_leaf(std::size_t node) const { return node < n_taxa_; }
  std::size_t left_child(std::size_t n) const { return children_[n].first; }
  std::size_t right_child(std::size_t n) const { return children_[n].second; }
  /// Parent node id; the root has none (returns the root itself).
  std::size_t parent(std::size_t node) const { return parent_[node]; }
  double node_time(std::size_t node) const {
    return is_leaf(node) ? 0.0 : times_[node - n_taxa_];
  }
  /// Parent time minus node time, for any non-root node.
  double branch_length(std::size_t node) const {
    return node_time(parent_[node]) - node_time(node);
  }

  /// Event index at which each pair coalesces, indexed by pair_index.
  std::vector<std::size_t> pair_events() const;

  /// Same topology and times with times replaced (must keep the ordering).
  UltrametricTree with_times(std::vector<double> times) const;

  bool operator==(const UltrametricTree& other) const {
    return n_taxa_ == other.n_taxa_ && events_ == other.events_ && times_ == other.times_;
  }

 private:
  std::size_t n_taxa_;
  std::vector<Bipartition> events_;
  std::vector<double> times_;
  std::vector<std::pair<std::size_t, std::size_t>> children_;
  std::vector<std::size_t> parent_;
};

/// Time of the event at which taxa u and v coalesce.
double coalescent_time_of_pair(const UltrametricTree& tree, std::size_t u, std::size_t v);

/// Sum of all branch lengths.
double tree_length(const UltrametricTree& tree);

}  // namespace vipr
