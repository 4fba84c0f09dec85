#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "vipr/clustering.hpp"

using namespace vipr;

TEST_CASE("three taxa: root time is the smaller cross entry") {
  // pairs (a,b)=1, (a,c)=3, (b,c)=2
  const PairMatrix m(3, {1.0, 3.0, 2.0});
  for (const auto& res : {single_linkage_naive(m), single_linkage_fast(m)}) {
    const auto& t = res.tree;
    CHECK(t.event(0).left == Clade::singleton(3, 0));
    CHECK(t.event(0).right == Clade::singleton(3, 1));
    CHECK(t.event(1).left == (Clade::singleton(3, 0) | Clade::singleton(3, 1)));
    CHECK(t.event(1).right == Clade::singleton(3, 2));
    CHECK(t.times() == std::vector<double>{1.0, 2.0});
    CHECK(res.selected_pairs == std::vector<std::size_t>{0, 2});
  }
}

TEST_CASE("two taxa") {
  const auto t = single_linkage(PairMatrix(2, {5.0}));
  CHECK(t.times() == std::vector<double>{5.0});
}

namespace {

// Independent O(N^3) reference written against cluster lists rather than
// pair bookkeeping: merge the two clusters with the smallest single-linkage
// distance, min over cross pairs.
std::vector<std::pair<std::vector<std::size_t>, double>> reference_merges(const PairMatrix& m) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < m.n_taxa(); ++i) clusters.push_back({i});
  std::vector<std::pair<std::vector<std::size_t>, double>> out;
  while (clusters.size() > 1) {
    double best = INFINITY;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j)
        for (auto u : clusters[i])
          for (auto v : clusters[j])
            if (m(u, v) < best) {
              best = m(u, v);
              bi = i;
              bj = j;
            }
    auto merged = clusters[bi];
    merged.insert(merged.end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(merged.begin(), merged.end());
    out.emplace_back(merged, best);
    clusters.erase(clusters.begin() + static_cast<long>(bj));
    clusters[bi] = merged;
  }
  return out;
}

}  // namespace

TEST_CASE("fast, naive and reference clustering agree on random matrices") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 10;
    const auto m = testing::random_matrix(n, rng);
    const auto naive = single_linkage_naive(m);
    const auto fast = single_linkage_fast(m);
    CHECK(naive.tree == fast.tree);
    CHECK(naive.selected_pairs == fast.selected_pairs);
    const auto ref = reference_merges(m);
    for (std::size_t e = 0; e < ref.size(); ++e) {
      const auto merged = (fast.tree.event(e).left | fast.tree.event(e).right).members();
      CHECK(merged == ref[e].first);
      CHECK(fast.tree.time(e) == ref[e].second);
    }
    for (std::size_t e = 1; e < fast.tree.n_events(); ++e)
      CHECK(fast.tree.time(e - 1) <= fast.tree.time(e));
  }
}

TEST_CASE("ties resolve to the lowest flat pair index in both variants") {
  Rng rng(4);
  std::uniform_int_distribution<int> level(1, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + trial % 6;
    std::vector<double> v(n_pairs(n));
    for (auto& x : v) x = level(rng);
    const PairMatrix m(n, v);
    const auto naive = single_linkage_naive(m);
    const auto fast = single_linkage_fast(m);
    CHECK(naive.tree == fast.tree);
    CHECK(naive.selected_pairs == fast.selected_pairs);
  }
  const PairMatrix flat(3, {1.0, 1.0, 1.0});
  CHECK(single_linkage(flat).event(0).right == Clade::singleton(3, 1));
}

TEST_CASE("an ultrametric matrix reproduces its tree") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 9;
    const auto truth = simulate_coalescent(n, 5.0, rng);
    std::vector<double> v(n_pairs(n));
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t w = u + 1; w < n; ++w) v[pair_index(n, u, w)] = coalescent_time_of_pair(truth, u, w);
    CHECK(single_linkage(PairMatrix(n, v)) == truth);
  }
}
