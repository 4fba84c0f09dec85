#include "vipr/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vipr/math.hpp"

namespace vipr {
namespace {

const SubstitutionModel& model_or_default(const LikelihoodOptions& opts) {
  static const JukesCantor jc;
  return opts.model ? *opts.model : jc;
}

const kernels::PruningKernels& kernels_or_default(const LikelihoodOptions& opts) {
  return opts.kernels ? *opts.kernels : kernels::active_kernels();
}

void check_taxa(const Alignment& a, const UltrametricTree& tree) {
  if (a.n_taxa() != tree.n_taxa())
    throw TreeError("alignment has " + std::to_string(a.n_taxa()) + " taxa but tree has " +
                    std::to_string(tree.n_taxa()));
}

Matrix4 transpose(const Matrix4& m) {
  Matrix4 t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t[4 * j + i] = m[4 * i + j];
  return t;
}

// Fills the table bottom-up and returns per-pattern site likelihoods at the
// root (scaled) in `root_site`.
void prune(const Alignment& a, const UltrametricTree& tree, const SubstitutionModel& model,
           const kernels::PruningKernels& k, PartialLikelihoodTable& table,
           std::vector<double>& root_site) {
  const std::size_t n = tree.n_taxa();
  const std::size_t np = a.n_patterns();
  table.reset(tree.n_nodes(), np);

  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    auto& v = table.partials[leaf];
    const auto states = a.taxon_patterns(leaf);
    for (std::size_t p = 0; p < np; ++p) {
      const Base b = states[p];
      for (int s = 0; s < 4; ++s) v[4 * p + s] = (b == kMissing || b == s) ? 1.0 : 0.0;
    }
  }
  for (std::size_t e = 0; e < tree.n_events(); ++e) {
    const std::size_t node = n + e;
    auto& out_exp = table.exponents[node];
    for (std::size_t child : {tree.left_child(e), tree.right_child(e)}) {
      const Matrix4 p = model.transition(tree.branch_length(child));
      k.transition_apply(p.data(), table.partials[child].data(), table.edge[child].data(), np);
      const auto& ce = table.exponents[child];
      for (std::size_t q = 0; q < np; ++q) out_exp[q] += ce[q];
    }
    k.combine_rescale(table.edge[tree.left_child(e)].data(), table.edge[tree.right_child(e)].data(),
                      table.partials[node].data(), out_exp.data(), np);
  }
  const Vector4 pi = model.stationary();
  std::vector<double> pi_rep(4 * np);
  for (std::size_t q = 0; q < np; ++q)
    for (int s = 0; s < 4; ++s) pi_rep[4 * q + s] = pi[s];
  root_site.resize(np);
  k.dot(pi_rep.data(), table.partials[tree.root()].data(), root_site.data(), np);
}

double accumulate(const Alignment& a, const std::vector<double>& root_site,
                  const std::vector<std::int32_t>& root_exp) {
  const auto& w = a.pattern_weights();
  double total = 0.0;
  for (std::size_t q = 0; q < root_site.size(); ++q) {
    if (root_site[q] == 0.0) return kNegInf;
    total += w[q] * (std::log(root_site[q]) + root_exp[q] * std::numbers::ln2);
  }
  if (std::isnan(total)) throw std::runtime_error("log-likelihood evaluated to NaN");
  return total;
}

}  // namespace

void PartialLikelihoodTable::reset(std::size_t n_nodes, std::size_t np) {
  n_patterns = np;
  partials.resize(n_nodes);
  edge.resize(n_nodes);
  exponents.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    partials[i].assign(4 * np, 0.0);
    edge[i].assign(4 * np, 0.0);
    exponents[i].assign(np, 0);
  }
}

double log_likelihood(const Alignment& a, const UltrametricTree& tree,
                      const LikelihoodOptions& opts) {
  check_taxa(a, tree);
  PartialLikelihoodTable table;
  std::vector<double> root_site;
  prune(a, tree, model_or_default(opts), kernels_or_default(opts), table, root_site);
  return accumulate(a, root_site, table.exponents[tree.root()]);
}

std::vector<double> pattern_log_likelihoods(const Alignment& a, const UltrametricTree& tree,
                                            const LikelihoodOptions& opts) {
  check_taxa(a, tree);
  PartialLikelihoodTable table;
  std::vector<double> root_site;
  prune(a, tree, model_or_default(opts), kernels_or_default(opts), table, root_site);
  const auto& e = table.exponents[tree.root()];
  std::vector<double> out(root_site.size());
  for (std::size_t q = 0; q < out.size(); ++q)
    out[q] = root_site[q] == 0.0 ? kNegInf : std::log(root_site[q]) + e[q] * std::numbers::ln2;
  return out;
}

LikelihoodGradient log_likelihood_time_gradient(const Alignment& a, const UltrametricTree& tree,
                                                const LikelihoodOptions& opts) {
  check_taxa(a, tree);
  const auto& model = model_or_default(opts);
  const auto& k = kernels_or_default(opts);
  const std::size_t n = tree.n_taxa();
  const std::size_t np = a.n_patterns();

  PartialLikelihoodTable table;
  std::vector<double> root_site;
  prune(a, tree, model, k, table, root_site);

  LikelihoodGradient out;
  out.log_likelihood = accumulate(a, root_site, table.exponents[tree.root()]);
  out.d_times.assign(tree.n_events(), 0.0);
  if (np == 0) return out;

  // outside[node]: joint probability of the data outside the subtree with
  // each state at the node (rescaled freely; only ratios are used).
  std::vector<std::vector<double>> outside(tree.n_nodes());
  const Vector4 pi = model.stationary();
  outside[tree.root()].resize(4 * np);
  for (std::size_t q = 0; q < np; ++q)
    for (int s = 0; s < 4; ++s) outside[tree.root()][4 * q + s] = pi[s];

  // edge_ratio[node] = sum_q w_q * d log p_q / d (branch length above node)
  std::vector<double> edge_ratio(tree.n_nodes(), 0.0);
  std::vector<double> above(4 * np), deriv(4 * np), num(np), den(np);
  std::vector<std::int32_t> scratch(np);
  const auto& w = a.pattern_weights();

  for (std::size_t e = tree.n_events(); e-- > 0;) {
    const std::size_t node = n + e;
    const std::size_t kids[2] = {tree.left_child(e), tree.right_child(e)};
    for (int c = 0; c < 2; ++c) {
      const std::size_t child = kids[c];
      const std::size_t sibling = kids[1 - c];
      // above = outside(parent) * (P_sibling L_sibling)
      std::fill(scratch.begin(), scratch.end(), 0);
      k.combine_rescale(outside[node].data(), table.edge[sibling].data(), above.data(),
                        scratch.data(), np);
      const double b = tree.branch_length(child);
      const Matrix4 dp = model.transition_derivative(b);
      k.transition_apply(dp.data(), table.partials[child].data(), deriv.data(), np);
      k.dot(above.data(), deriv.data(), num.data(), np);
      k.dot(above.data(), table.edge[child].data(), den.data(), np);
      double acc = 0.0;
      for (std::size_t q = 0; q < np; ++q) acc += w[q] * num[q] / den[q];
      edge_ratio[child] = acc;
      if (!tree.is_leaf(child)) {
        const Matrix4 pt = transpose(model.transition(b));
        outside[child].resize(4 * np);
        k.transition_apply(pt.data(), above.data(), outside[child].data(), np);
      }
    }
  }
  for (std::size_t e = 0; e < tree.n_events(); ++e) {
    const std::size_t node = n + e;
    double d = edge_ratio[tree.left_child(e)] + edge_ratio[tree.right_child(e)];
    if (node != tree.root()) d -= edge_ratio[node];
    out.d_times[e] = d;
  }
  return out;
}

double brute_force_log_likelihood(const Alignment& a, const UltrametricTree& tree) {
  check_taxa(a, tree);
  const std::size_t n = tree.n_taxa();
  if (n > 8) throw std::invalid_argument("brute-force likelihood is limited to N <= 8 taxa");
  const std::size_t n_internal = n - 1;
  std::size_t n_assign = 1;
  for (std::size_t i = 0; i < n_internal; ++i) n_assign *= 4;

  const Vector4 pi = jc_stationary();
  std::vector<Matrix4> p(tree.n_nodes());
  for (std::size_t node = 0; node + 1 < tree.n_nodes(); ++node)
    p[node] = jc_transition(tree.branch_length(node));

  double total = 0.0;
  std::vector<int> state(tree.n_nodes());
  std::vector<double> terms(n_assign);
  for (std::size_t q = 0; q < a.n_patterns(); ++q) {
    for (std::size_t assign = 0; assign < n_assign; ++assign) {
      std::size_t code = assign;
      for (std::size_t i = 0; i < n_internal; ++i) {
        state[n + i] = static_cast<int>(code % 4);
        code /= 4;
      }
      double log_term = std::log(pi[state[tree.root()]]);
      for (std::size_t node = 0; node + 1 < tree.n_nodes(); ++node) {
        const int from = state[tree.parent(node)];
        double factor;
        if (tree.is_leaf(node)) {
          const Base b = a.pattern_state(node, q);
          if (b == kMissing) {
            factor = 0.0;
            for (int s = 0; s < 4; ++s) factor += p[node][4 * from + s];
          } else {
            factor = p[node][4 * from + b];
          }
        } else {
          factor = p[node][4 * from + state[node]];
        }
        log_term += std::log(factor);
      }
      terms[assign] = log_term;
    }
    const double site = log_sum_exp(terms);
    if (site == kNegInf) return kNegInf;
    total += a.pattern_weights()[q] * site;
  }
  return total;
}

}  // namespace vipr
