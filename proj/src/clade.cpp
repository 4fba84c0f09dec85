#include "vipr/clade.hpp"

namespace vipr {

Clade Clade::full(std::size_t n_taxa) {
  Clade c(n_taxa);
  for (std::size_t i = 0; i < n_taxa; ++i) c.insert(i);
  return c;
}

std::size_t Clade::min_member() const {
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w]) return 64 * w + static_cast<std::size_t>(std::countr_zero(words_[w]));
  return static_cast<std::size_t>(-1);
}

std::vector<std::size_t> Clade::members() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      out.push_back(64 * w + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

bool Clade::disjoint(const Clade& other) const {
  for (std::size_t w = 0; w < words_.size(); ++w)
    if (words_[w] & other.words_[w]) return false;
  return true;
}

Clade Clade::operator|(const Clade& other) const {
  Clade out = *this;
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] |= other.words_[w];
  return out;
}

}  // namespace vipr
