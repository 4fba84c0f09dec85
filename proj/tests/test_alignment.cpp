#include <doctest.h>

#include <random>
#include <string>

#include "test_support.hpp"
#include "vipr/alignment.hpp"
#include "vipr/likelihood.hpp"

using namespace vipr;

TEST_CASE("two records, two patterns") {
  const auto a = parse_fasta(">a\nAC\n>b\nAG\n");
  CHECK(a.n_taxa() == 2);
  CHECK(a.n_sites() == 2);
  REQUIRE(a.n_patterns() == 2);
  CHECK(a.pattern_state(0, 0) == kA);
  CHECK(a.pattern_state(1, 0) == kA);
  CHECK(a.pattern_state(0, 1) == kC);
  CHECK(a.pattern_state(1, 1) == kG);
  CHECK(a.pattern_weights() == std::vector<double>{1.0, 1.0});
}

TEST_CASE("gaps and ambiguity codes become missing") {
  const auto a = parse_fasta(">a\nA-\n>b\nAN\n");
  CHECK(a.state(0, 1) == kMissing);
  CHECK(a.state(1, 1) == kMissing);
  const auto b = parse_fasta(">x\nRYKM?U\n>y\nacgtAC\n");
  for (std::size_t m = 0; m < 6; ++m) CHECK(b.state(0, m) == kMissing);
  CHECK(b.state(1, 0) == kA);  // lower case accepted
}

TEST_CASE("identical columns compress") {
  const auto a = parse_fasta(">a\nAA\n>b\nAA\n");
  REQUIRE(a.n_patterns() == 1);
  CHECK(a.pattern_weights()[0] == 2.0);
  CHECK(a.pattern_index() == std::vector<std::size_t>{0, 0});
  const auto raw = parse_fasta(">a\nAA\n>b\nAA\n", false);
  CHECK(raw.n_patterns() == 2);
}

TEST_CASE("wrapped lines, CRLF and header descriptions") {
  const auto a = parse_fasta(">a desc here\r\nAC\r\nGT\r\n\r\n>b\nACG\nA\n");
  CHECK(a.taxa() == std::vector<std::string>{"a", "b"});
  CHECK(a.n_sites() == 4);
  CHECK(a.state(1, 3) == kA);
}

TEST_CASE("errors name the taxon and line") {
  CHECK_THROWS_WITH_AS(parse_fasta(""), "empty FASTA input", AlignmentError);
  CHECK_THROWS_WITH_AS(parse_fasta(">a\nAC\n>a\nAG\n"),
                       doctest::Contains("line 3: duplicate taxon name 'a'"), AlignmentError);
  CHECK_THROWS_WITH_AS(parse_fasta(">a\nAC\n>b\nAGT\n"),
                       doctest::Contains("line 3: taxon 'b' has length 3"), AlignmentError);
  CHECK_THROWS_AS(parse_fasta("AC\n>a\nAC\n"), AlignmentError);
  CHECK_THROWS_AS(parse_fasta(">a\nAC\n"), AlignmentError);
}

TEST_CASE("drop_constant_sites") {
  const auto a = parse_fasta(">a\nAC\n>b\nAG\n");
  const auto d = drop_constant_sites(a);
  CHECK(d.n_sites() == 1);
  CHECK(d.state(0, 0) == kC);
  CHECK(d.state(1, 0) == kG);

  std::string warning;
  const auto lone = drop_constant_sites(parse_fasta(">a\nA\n>b\n-\n"), &warning);
  CHECK(lone.n_sites() == 0);
  CHECK(lone.n_patterns() == 0);
  CHECK_FALSE(warning.empty());

  const auto keep = parse_fasta(">a\nCG\n>b\nGC\n");
  CHECK(drop_constant_sites(keep) == keep);
}

TEST_CASE("FASTA round trip reproduces the alignment") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testing::random_alignment(2 + trial % 6, 1 + trial * 7, rng, 0.2);
    CHECK(parse_fasta(to_fasta(a, 1 + trial % 13)) == a);
  }
}

TEST_CASE("pattern compression preserves the likelihood") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    auto a = testing::random_alignment(n, 40, rng, 0.1);
    // duplicate columns so that compression actually merges something
    std::vector<std::vector<Base>> rows;
    for (std::size_t i = 0; i < n; ++i) {
      auto r = a.row(i);
      r.insert(r.end(), a.row(i).begin(), a.row(i).begin() + 20);
      rows.push_back(r);
    }
    const Alignment packed(a.taxa(), rows, true), raw(a.taxa(), rows, false);
    CHECK(packed.n_patterns() < raw.n_patterns());
    double sum_w = 0.0;
    for (double w : packed.pattern_weights()) sum_w += w;
    CHECK(sum_w == doctest::Approx(static_cast<double>(packed.n_sites())));
    const auto tree = testing::random_tree(n, rng);
    const double x = log_likelihood(packed, tree), y = log_likelihood(raw, tree);
    CHECK(std::abs(x - y) <= 1e-12 * std::abs(y));
  }
}

TEST_CASE("summary JSON") {
  const auto a = parse_fasta(">a\nAAC\n>b\nAAG\n");
  CHECK(alignment_summary_json(a) == R"({"n_patterns":2,"n_sites":3,"taxa":["a","b"]})");
}
