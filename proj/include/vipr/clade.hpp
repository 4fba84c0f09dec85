#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace vipr {

/// A set of taxon ids stored as a bitset (one word up to 64 taxa).
class Clade {
 public:
  Clade() = default;
  explicit Clade(std::size_t n_taxa) : words_((n_taxa + 63) / 64, 0) {}
  static Clade singleton(std::size_t n_taxa, std::size_t taxon) {
    Clade c(n_taxa);
    c.insert(taxon);
    return c;
  }
  static Clade full(std::size_t n_taxa);

  void insert(std::size_t taxon) { words_[taxon >> 6] |= std::uint64_t{1} << (taxon & 63); }
  bool contains(std::size_t taxon) const {
    return (words_[taxon >> 6] >> (taxon & 63)) & 1u;
  }
  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }
  /// Smallest member; the clade must be nonempty.
  std::size_t min_member() const;
  std::vector<std::size_t> members() const;

  bool disjoint(const Clade& other) const;
  Clade operator|(const Clade& other) const;
  bool operator==(const Clade& other) const = default;
  /// Orders by smallest member first, which gives canonical child ordering.
  bool precedes(const Clade& other) const { return min_member() < other.min_member(); }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::vector<std::uint64_t> words_;
};

}  // namespace vipr
