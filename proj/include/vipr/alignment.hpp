#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vipr {

/// Nucleotide codes. Base order A, C, G, T is fixed across the library.
enum Base : std::uint8_t { kA = 0, kC = 1, kG = 2, kT = 3, kMissing = 4 };

inline constexpr int kNumStates = 4;

/// Maps a FASTA character to a Base; anything outside ACGT (any case) is missing.
Base base_from_char(char c);
char base_to_char(Base b);

/// Raised for malformed alignment input. The message carries taxon and line.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An N x M DNA alignment together with its site-pattern compression.
///
/// Rows are stored per taxon. Unique columns ("patterns") are kept in
/// taxon-major layout, `pattern_state(taxon, p)`, so pruning can fill leaf
/// vectors with one contiguous read per taxon. Immutable after construction.
class Alignment {
 public:
  /// Builds and compresses an alignment. Throws AlignmentError if there are
  /// fewer than two taxa, empty or duplicate names, ragged rows or invalid codes.
  /// With `compress == false` every site becomes its own pattern of weight 1.
  Alignment(std::vector<std::string> taxa, std::vector<std::vector<Base>> rows,
            bool compress = true);

  std::size_t n_taxa() const { return taxa_.size(); }
  std::size_t n_sites() const { return n_sites_; }
  std::size_t n_patterns() const { return weights_.size(); }

  const std::vector<std::string>& taxa() const { return taxa_; }
  const std::vector<Base>& row(std::size_t taxon) const { return rows_[taxon]; }
  Base state(std::size_t taxon, std::size_t site) const { return rows_[taxon][site]; }

  Base pattern_state(std::size_t taxon, std::size_t pattern) const {
    return patterns_[taxon * n_patterns() + pattern];
  }
  /// All pattern states of one taxon, length n_patterns().
  std::span<const Base> taxon_patterns(std::size_t taxon) const {
    return {patterns_.data() + taxon * n_patterns(), n_patterns()};
  }
  const std::vector<double>& pattern_weights() const { return weights_; }
  const std::vector<std::size_t>& pattern_index() const { return pattern_index_; }
  bool compressed() const { return compressed_; }

  /// Index of a taxon name, or throws AlignmentError.
  std::size_t taxon_index(std::string_view name) const;

  bool operator==(const Alignment& other) const;

 private:
  std::vector<std::string> taxa_;
  std::vector<std::vector<Base>> rows_;
  std::size_t n_sites_ = 0;
  bool compressed_ = true;
  std::vector<Base> patterns_;
  std::vector<double> weights_;
  std::vector<std::size_t> pattern_index_;
};

/// Parses FASTA text. Sequence lines may wrap; characters are case-insensitive.
Alignment parse_fasta(std::string_view text, bool compress = true);
Alignment read_fasta_file(const std::string& path, bool compress = true);

std::string to_fasta(const Alignment& a, std::size_t line_width = 60);

/// Removes every column whose non-missing characters are all identical
/// (including columns with a single or no observed character). The result may
/// have zero sites; `warning`, when given, receives a message in that case.
Alignment drop_constant_sites(const Alignment& a, std::string* warning = nullptr);

/// {"taxa": [...], "n_sites": M, "n_patterns": P}
std::string alignment_summary_json(const Alignment& a);

}  // namespace vipr
