#include "vipr/variational.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "vipr/math.hpp"

namespace vipr {

// ---- log-normal pair distribution ------------------------------------------

double LogNormalPair::log_pdf(double t, double mu, double log_sigma) {
  const double sigma = std::exp(log_sigma);
  const double x = (std::log(t) - mu) / sigma;
  return -std::log(t) - log_sigma - kLogSqrt2Pi - 0.5 * x * x;
}

double LogNormalPair::log_survival(double t, double mu, double log_sigma) {
  return log_normal_survival((std::log(t) - mu) / std::exp(log_sigma));
}

PairTermGrad LogNormalPair::log_pdf_grad(double t, double mu, double log_sigma) {
  const double sigma = std::exp(log_sigma);
  const double x = (std::log(t) - mu) / sigma;
  return {x / sigma, x * x - 1.0, (-1.0 - x / sigma) / t};
}

PairTermGrad LogNormalPair::log_survival_grad(double t, double mu, double log_sigma) {
  const double sigma = std::exp(log_sigma);
  const double x = (std::log(t) - mu) / sigma;
  const double h = normal_hazard(x);  // d log Q / dx = -h
  return {h / sigma, h * x, -h / (sigma * t)};
}

double LogNormalPair::transform(double mu, double log_sigma, double z) {
  return std::exp(mu + std::exp(log_sigma) * z);
}

double lognormal_logpdf(double t, double mu, double sigma) {
  if (!(t > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("lognormal_logpdf needs t > 0 and sigma > 0");
  return LogNormalPair::log_pdf(t, mu, std::log(sigma));
}

double lognormal_log_survival(double t, double mu, double sigma) {
  if (!(t > 0.0) || !(sigma > 0.0))
    throw std::invalid_argument("lognormal_log_survival needs t > 0 and sigma > 0");
  return LogNormalPair::log_survival(t, mu, std::log(sigma));
}

// ---- parameters ---------------------------------------------------------------

VariationalParams::VariationalParams(std::vector<std::string> taxa, std::vector<double> mu,
                                     std::vector<double> log_sigma)
    : taxa_(std::move(taxa)), mu_(std::move(mu)), log_sigma_(std::move(log_sigma)) {
  if (taxa_.size() < 2) throw std::invalid_argument("variational parameters need >= 2 taxa");
  const std::size_t p = vipr::n_pairs(taxa_.size());
  if (mu_.size() != p || log_sigma_.size() != p)
    throw std::invalid_argument("variational parameters need one (mu, sigma) per taxon pair");
  for (std::size_t k = 0; k < p; ++k)
    if (!std::isfinite(mu_[k]) || !std::isfinite(log_sigma_[k]))
      throw std::invalid_argument("variational parameter " + std::to_string(k) + " is not finite");
}

VariationalParams VariationalParams::uniform(std::vector<std::string> taxa, double mu,
                                             double sigma) {
  const std::size_t p = vipr::n_pairs(taxa.size());
  return VariationalParams(std::move(taxa), std::vector<double>(p, mu),
                           std::vector<double>(p, std::log(sigma)));
}

double VariationalParams::sigma(std::size_t k) const { return std::exp(log_sigma_[k]); }

std::vector<double> VariationalParams::flat() const {
  std::vector<double> out(mu_);
  out.insert(out.end(), log_sigma_.begin(), log_sigma_.end());
  return out;
}

void VariationalParams::set_flat(const std::vector<double>& values) {
  if (values.size() != dim()) throw std::invalid_argument("flat parameter size mismatch");
  std::copy(values.begin(), values.begin() + mu_.size(), mu_.begin());
  std::copy(values.begin() + mu_.size(), values.end(), log_sigma_.begin());
}

std::string params_to_json(const VariationalParams& params) {
  nlohmann::ordered_json j;
  j["taxa"] = params.taxa();
  auto pairs = nlohmann::ordered_json::array();
  const auto list = pair_list(params.n_taxa());
  for (std::size_t k = 0; k < list.size(); ++k) {
    nlohmann::ordered_json entry;
    entry["u"] = params.taxa()[list[k].first];
    entry["v"] = params.taxa()[list[k].second];
    entry["mu"] = params.mu()[k];
    entry["sigma"] = params.sigma(k);
    pairs.push_back(std::move(entry));
  }
  j["pairs"] = std::move(pairs);
  return j.dump(2) + "\n";
}

VariationalParams params_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  auto taxa = j.at("taxa").get<std::vector<std::string>>();
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < taxa.size(); ++i) ids[taxa[i]] = i;
  const std::size_t p = vipr::n_pairs(taxa.size());
  std::vector<double> mu(p, 0.0), log_sigma(p, 0.0);
  std::vector<bool> seen(p, false);
  for (const auto& entry : j.at("pairs")) {
    const auto u = ids.find(entry.at("u").get<std::string>());
    const auto v = ids.find(entry.at("v").get<std::string>());
    if (u == ids.end() || v == ids.end() || u->second == v->second)
      throw std::invalid_argument("params JSON: pair refers to unknown or identical taxa");
    const double sigma = entry.at("sigma").get<double>();
    if (!(sigma > 0.0)) throw std::invalid_argument("params JSON: sigma must be positive");
    const std::size_t k = pair_index(taxa.size(), u->second, v->second);
    mu[k] = entry.at("mu").get<double>();
    log_sigma[k] = std::log(sigma);
    seen[k] = true;
  }
  for (bool s : seen)
    if (!s) throw std::invalid_argument("params JSON: missing taxon pair");
  return VariationalParams(std::move(taxa), std::move(mu), std::move(log_sigma));
}

void write_params_file(const std::string& path, const VariationalParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << params_to_json(params);
}

VariationalParams read_params_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return params_from_json(buf.str());
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

// ---- sampling -------------------------------------------------------------------

template <PairDistribution D>
TreeSample tree_from_noise(const VariationalParams& params, std::vector<double> noise) {
  const std::size_t p = params.n_pairs();
  if (noise.size() != p) throw std::invalid_argument("noise vector size mismatch");
  std::vector<double> t(p);
  for (std::size_t k = 0; k < p; ++k) t[k] = D::transform(params.mu()[k], params.log_sigma()[k], noise[k]);
  auto clustered = single_linkage_fast(PairMatrix(params.n_taxa(), t));
  return {std::move(clustered.tree), std::move(t), std::move(noise),
          std::move(clustered.selected_pairs)};
}

template <PairDistribution D>
TreeSample sample_tree(const VariationalParams& params, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> z(params.n_pairs());
  for (auto& v : z) v = normal(rng);
  return tree_from_noise<D>(params, std::move(z));
}

// ---- density -----------------------------------------------------------------------

namespace {

void check_tree(const VariationalParams& params, const UltrametricTree& tree) {
  if (params.n_taxa() != tree.n_taxa())
    throw std::invalid_argument("tree and variational parameters disagree on taxon count");
  for (std::size_t e = 0; e < tree.n_events(); ++e)
    if (!(tree.time(e) > 0.0))
      throw std::invalid_argument("variational density needs strictly positive event times");
}

// Cross pairs (flat indices) of event e, written into `out`.
void cross_pairs(const UltrametricTree& tree, std::size_t e, std::vector<std::size_t>& left,
                 std::vector<std::size_t>& right, std::vector<std::size_t>& out) {
  left = tree.event(e).left.members();
  right = tree.event(e).right.members();
  out.clear();
  for (std::size_t w : left)
    for (std::size_t z : right) out.push_back(pair_index(tree.n_taxa(), w, z));
}

}  // namespace

template <PairDistribution D>
DensityBreakdown log_density(const VariationalParams& params, const UltrametricTree& tree) {
  check_tree(params, tree);
  DensityBreakdown out;
  out.event_terms.resize(tree.n_events());
  out.pair_log_pdf.assign(params.n_pairs(), 0.0);
  out.pair_log_survival.assign(params.n_pairs(), 0.0);
  std::vector<std::size_t> left, right, pairs;
  std::vector<double> ratios;
  for (std::size_t e = 0; e < tree.n_events(); ++e) {
    const double t = tree.time(e);
    cross_pairs(tree, e, left, right, pairs);
    ratios.resize(pairs.size());
    double survival_sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const std::size_t k = pairs[i];
      const double lp = D::log_pdf(t, params.mu()[k], params.log_sigma()[k]);
      const double ls = D::log_survival(t, params.mu()[k], params.log_sigma()[k]);
      out.pair_log_pdf[k] = lp;
      out.pair_log_survival[k] = ls;
      ratios[i] = lp - ls;
      survival_sum += ls;
    }
    out.event_terms[e] = log_sum_exp(ratios) + survival_sum;
    out.log_q += out.event_terms[e];
  }
  if (std::isnan(out.log_q)) throw std::runtime_error("variational log density is NaN");
  return out;
}

template <PairDistribution D>
DensityGradient log_density_gradient(const VariationalParams& params, const UltrametricTree& tree) {
  check_tree(params, tree);
  const std::size_t np = params.n_pairs();
  DensityGradient out;
  out.grad.assign(2 * np, 0.0);
  out.d_times.assign(tree.n_events(), 0.0);
  std::vector<std::size_t> left, right, pairs;
  std::vector<double> ratios, share;
  std::vector<PairTermGrad> gp, gs;
  for (std::size_t e = 0; e < tree.n_events(); ++e) {
    const double t = tree.time(e);
    cross_pairs(tree, e, left, right, pairs);
    const std::size_t m = pairs.size();
    ratios.resize(m);
    share.resize(m);
    gp.resize(m);
    gs.resize(m);
    double survival_sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = pairs[i];
      const double mu = params.mu()[k], ls = params.log_sigma()[k];
      const double lp = D::log_pdf(t, mu, ls);
      const double lq = D::log_survival(t, mu, ls);
      ratios[i] = lp - lq;
      survival_sum += lq;
      gp[i] = D::log_pdf_grad(t, mu, ls);
      gs[i] = D::log_survival_grad(t, mu, ls);
    }
    const double lse = softmax(ratios, share);
    out.log_q += lse + survival_sum;
    double dt = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = pairs[i];
      const double s = share[i];
      out.grad[k] = s * (gp[i].d_loc - gs[i].d_loc) + gs[i].d_loc;
      out.grad[np + k] = s * (gp[i].d_log_scale - gs[i].d_log_scale) + gs[i].d_log_scale;
      dt += s * (gp[i].d_t - gs[i].d_t) + gs[i].d_t;
    }
    out.d_times[e] = dt;
  }
  if (std::isnan(out.log_q)) throw std::runtime_error("variational log density is NaN");
  return out;
}

std::vector<PathwiseEntry> pathwise_time_jacobian(const VariationalParams& params,
                                                  const UltrametricTree& tree,
                                                  const std::vector<double>& noise) {
  check_tree(params, tree);
  if (noise.size() != params.n_pairs()) throw std::invalid_argument("noise vector size mismatch");
  std::vector<PathwiseEntry> out(tree.n_events());
  std::vector<std::size_t> left, right, pairs;
  for (std::size_t e = 0; e < tree.n_events(); ++e) {
    cross_pairs(tree, e, left, right, pairs);
    std::size_t best = pairs.front();
    double best_t = std::numeric_limits<double>::infinity();
    int hits = 0;
    for (std::size_t k : pairs) {
      const double t = LogNormalPair::transform(params.mu()[k], params.log_sigma()[k], noise[k]);
      if (t < best_t) {
        best_t = t;
        best = k;
        hits = 1;
      } else if (t == best_t) {
        ++hits;
      }
    }
    if (best_t != tree.time(e))
      throw std::invalid_argument("noise does not reproduce event " + std::to_string(e) +
                                  " of the tree");
    if (hits > 1 || (e > 0 && tree.time(e) == tree.time(e - 1)))
      throw ClusteringTieError("tied single-linkage minimum at event " + std::to_string(e));
    out[e] = {best, best_t, best_t * params.sigma(best) * noise[best]};
  }
  return out;
}

template TreeSample sample_tree<LogNormalPair>(const VariationalParams&, Rng&);
template TreeSample tree_from_noise<LogNormalPair>(const VariationalParams&, std::vector<double>);
template DensityBreakdown log_density<LogNormalPair>(const VariationalParams&, const UltrametricTree&);
template DensityGradient log_density_gradient<LogNormalPair>(const VariationalParams&,
                                                             const UltrametricTree&);

}  // namespace vipr
