#include "vipr/newick.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>

namespace vipr {
namespace {

std::string format_length(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void write_node(const UltrametricTree& tree, const std::vector<std::string>& taxa,
                std::size_t node, std::string& out) {
  if (tree.is_leaf(node)) {
    out += taxa[node];
  } else {
    const std::size_t n = node - tree.n_taxa();
    out += '(';
    write_node(tree, taxa, tree.left_child(n), out);
    out += ',';
    write_node(tree, taxa, tree.right_child(n), out);
    out += ')';
  }
  if (node != tree.root()) {
    out += ':';
    out += format_length(tree.branch_length(node));
  }
}

struct ParsedNode {
  std::string label;
  double length = 0.0;
  bool has_length = false;
  std::vector<std::unique_ptr<ParsedNode>> children;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::unique_ptr<ParsedNode> parse() {
    skip_ws();
    auto root = node();
    skip_ws();
    if (!eat(';')) fail("expected ';'");
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
    return root;
  }

 private:
  std::unique_ptr<ParsedNode> node() {
    auto out = std::make_unique<ParsedNode>();
    skip_ws();
    if (eat('(')) {
      do {
        out->children.push_back(node());
        skip_ws();
      } while (eat(','));
      if (!eat(')')) fail("expected ')'");
    }
    out->label = label();
    skip_ws();
    if (eat(':')) {
      skip_ws();
      const char* first = text_.data() + pos_;
      const char* last = text_.data() + text_.size();
      auto [ptr, ec] = std::from_chars(first, last, out->length);
      if (ec != std::errc()) fail("invalid branch length");
      pos_ += static_cast<std::size_t>(ptr - first);
      out->has_length = true;
    }
    return out;
  }

  std::string label() {
    skip_ws();
    std::string s;
    if (eat('\'')) {
      while (pos_ < text_.size()) {
        const char c = text_[pos_++];
        if (c == '\'') {
          if (pos_ < text_.size() && text_[pos_] == '\'') {
            s += '\'';
            ++pos_;
            continue;
          }
          return s;
        }
        s += c;
      }
      fail("unterminated quoted label");
    }
    while (pos_ < text_.size() && std::string_view("(),:; \t\r\n").find(text_[pos_]) ==
                                      std::string_view::npos)
      s += text_[pos_++];
    return s;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw TreeError("newick: " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct Built {
  Clade clade;
  double height;
};

struct Internal {
  Clade left, right;
  double height;
};

}  // namespace

std::string to_newick(const UltrametricTree& tree, const std::vector<std::string>& taxa) {
  if (taxa.size() != tree.n_taxa()) throw TreeError("to_newick: taxon name count mismatch");
  std::string out;
  write_node(tree, taxa, tree.root(), out);
  out += ';';
  return out;
}

UltrametricTree from_newick(std::string_view text, const std::vector<std::string>& taxa,
                            double ultrametric_tol) {
  const std::size_t n = taxa.size();
  std::unordered_map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < n; ++i) ids.emplace(taxa[i], i);

  const auto root = Parser(text).parse();
  std::vector<bool> seen(n, false);
  std::vector<Internal> internals;

  // Returns the clade and height (time above the leaves) of a subtree.
  auto build = [&](auto&& self, const ParsedNode& node) -> Built {
    if (node.children.empty()) {
      auto it = ids.find(node.label);
      if (it == ids.end()) throw TreeError("newick: unknown taxon '" + node.label + "'");
      if (seen[it->second]) throw TreeError("newick: taxon '" + node.label + "' appears twice");
      seen[it->second] = true;
      return {Clade::singleton(n, it->second), 0.0};
    }
    if (node.children.size() != 2)
      throw TreeError("newick: node with " + std::to_string(node.children.size()) +
                      " children; only binary trees are supported");
    Built kids[2];
    double via[2];
    for (int c = 0; c < 2; ++c) {
      const auto& child = *node.children[c];
      if (!child.has_length) throw TreeError("newick: missing branch length");
      if (!(child.length >= 0.0) || !std::isfinite(child.length))
        throw TreeError("newick: negative or non-finite branch length");
      kids[c] = self(self, child);
      via[c] = kids[c].height + child.length;
    }
    if (std::abs(via[0] - via[1]) > ultrametric_tol * std::max(1.0, std::abs(via[0])))
      throw TreeError("newick: tree is not ultrametric (leaf depths differ by " +
                      std::to_string(std::abs(via[0] - via[1])) + ")");
    const double height = 0.5 * (via[0] + via[1]);
    internals.push_back({kids[0].clade, kids[1].clade, height});
    return {kids[0].clade | kids[1].clade, height};
  };
  build(build, *root);
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw TreeError("newick: tree does not contain every taxon");

  // Post-order already lists children before parents; a stable sort by
  // height keeps that order among equal heights.
  std::stable_sort(internals.begin(), internals.end(),
                   [](const Internal& a, const Internal& b) { return a.height < b.height; });
  std::vector<Bipartition> events;
  std::vector<double> times;
  for (auto& in : internals) {
    events.push_back({std::move(in.left), std::move(in.right)});
    times.push_back(in.height);
  }
  return UltrametricTree(n, std::move(events), std::move(times));
}

std::vector<UltrametricTree> read_newick_file(const std::string& path,
                                              const std::vector<std::string>& taxa) {
  std::ifstream in(path);
  if (!in) throw TreeError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<UltrametricTree> trees;
  std::size_t start = 0;
  while (true) {
    const std::size_t semi = text.find(';', start);
    if (semi == std::string::npos) break;
    trees.push_back(from_newick(std::string_view(text).substr(start, semi - start + 1), taxa));
    start = semi + 1;
  }
  return trees;
}

}  // namespace vipr
