#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vipr/tree.hpp"

namespace vipr {

/// Rooted Newick with branch lengths equal to time differences, children
/// ordered by smallest taxon id, e.g. "((a:1,b:1):1,c:2);".
std::string to_newick(const UltrametricTree& tree, const std::vector<std::string>& taxa);

/// Parses one rooted binary Newick tree whose leaf names are drawn from
/// `taxa`. Internal labels and a root branch length are ignored. Throws
/// TreeError for non-binary nodes, unknown or repeated taxa, missing branch
/// lengths, or leaf depths that differ by more than `ultrametric_tol`.
UltrametricTree from_newick(std::string_view text, const std::vector<std::string>& taxa,
                            double ultrametric_tol = 1e-6);

/// Every ';'-terminated tree in a file.
std::vector<UltrametricTree> read_newick_file(const std::string& path,
                                              const std::vector<std::string>& taxa);

}  // namespace vipr
