#include "vipr/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "vipr/alignment.hpp"
#include "vipr/coalescent_prior.hpp"
#include "vipr/estimators.hpp"
#include "vipr/kernels/pruning_kernels.hpp"
#include "vipr/likelihood.hpp"
#include "vipr/newick.hpp"
#include "vipr/parallel.hpp"
#include "vipr/svg_plot.hpp"
#include "vipr/synthetic.hpp"
#include "vipr/trainer.hpp"
#include "vipr/validation.hpp"

namespace fs = std::filesystem;

namespace vipr::cli {

// RNG streams outside the training range (2 * iteration and 2 * iteration + 1).
constexpr std::uint64_t kTreeStream = ~std::uint64_t{0} - 1;
constexpr std::uint64_t kMllStream = ~std::uint64_t{0} - 2;

struct InferSettings {
  std::string fasta;
  std::string out_dir = "vipr_out";
  std::string estimator = "loor";
  std::size_t batch_size = 10;
  double lr = 0.01;
  std::size_t iters = 10000;
  double budget = 0.0;
  std::size_t eval_every = 10;
  std::size_t eval_samples = 50;
  std::uint64_t seed = 1;
  bool deterministic = false;
  std::size_t threads = 0;
  double pop_size = 5.0;
  std::string init = "distances";
  double init_sigma = 0.5;
  bool sweep = false;
  std::vector<double> sweep_rates{0.001, 0.003, 0.01, 0.03};
  std::size_t sweep_restarts = 10;
  std::size_t n_tree_samples = 1000;
  bool no_compress = false;
  bool drop_constant = false;
  bool plot = false;
};

struct MllSettings {
  std::string params;
  std::string fasta;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  double pop_size = 5.0;
  bool json = false;
};

struct SampleSettings {
  std::string params;
  std::size_t n = 10;
  std::uint64_t seed = 1;
};

struct SimulateSettings {
  std::size_t taxa = 0;
  std::size_t sites = 0;
  double pop_size = 5.0;
  std::uint64_t seed = 1;
  std::string out_dir = "vipr_sim";
};

struct CheckSettings {
  std::string level = "fast";
  std::vector<int> criteria;
  std::uint64_t seed = 20190416;
  std::size_t threads = 0;
};

struct BenchSettings {
  std::vector<std::size_t> taxa{8, 16, 32, 64};
  std::size_t iters = 200;
  std::size_t sites = 100;
  std::uint64_t seed = 1;
  std::string out_csv;
};

struct Settings {
  std::string kernels = "auto";
  InferSettings infer;
  MllSettings mll;
  SampleSettings sample;
  SimulateSettings simulate;
  CheckSettings check;
  BenchSettings bench;
};

namespace {

// Error carrying the exit code it maps to.
struct CommandError : std::runtime_error {
  CommandError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

// JSON config: one object per subcommand, keys are long flag names without
// the leading dashes, e.g. {"infer": {"lr": 0.03, "deterministic": true}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto* sub : app->get_subcommands({})) {
      nlohmann::ordered_json section = nlohmann::ordered_json::object();
      for (const auto* opt : sub->get_options()) {
        if (!opt->get_configurable() || opt->get_lnames().empty()) continue;
        const auto& name = opt->get_lnames().front();
        if (opt->count() > 0) {
          const auto& res = opt->results();
          section[name] = res.size() == 1 ? nlohmann::ordered_json(res[0])
                                          : nlohmann::ordered_json(res);
        } else if (default_also && !opt->get_default_str().empty()) {
          section[name] = opt->get_default_str();
        }
      }
      if (!section.empty()) doc[sub->get_name()] = section;
    }
    return doc.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [section, body] : doc.items()) {
      if (!body.is_object())
        throw CLI::ConversionError("config section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items()) {
        CLI::ConfigItem item;
        item.parents = {section};
        item.name = key;
        std::replace(item.name.begin(), item.name.end(), '_', '-');  // eval_every == eval-every
        if (value.is_array()) {
          for (const auto& v : value) item.inputs.push_back(scalar(v));
        } else {
          item.inputs.push_back(scalar(value));
        }
        items.push_back(std::move(item));
      }
    }
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config values must be strings, numbers, booleans or arrays");
  }
};

std::string fmt(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::size_t resolve_threads(std::size_t requested) {
  return requested == 0 ? default_threads() : requested;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CommandError(kExitBadInput, "cannot write " + path.string());
  f << text;
  if (!f) throw CommandError(kExitBadInput, "write failed for " + path.string());
}

Alignment load_alignment(const std::string& path, bool compress) {
  try {
    return read_fasta_file(path, compress);
  } catch (const AlignmentError& e) {
    throw CommandError(kExitBadInput, path + ": " + e.what());
  }
}

VariationalParams load_params(const std::string& path) {
  try {
    return read_params_file(path);
  } catch (const std::exception& e) {
    throw CommandError(kExitBadInput, path + ": " + e.what());
  }
}

void require_same_taxa(const VariationalParams& p, const Alignment& a) {
  if (p.taxa() != a.taxa())
    throw CommandError(kExitBadInput,
                       "parameter file and alignment list different taxa (names and order must match)");
}

VariationalParams initial_params(const InferSettings& s, const Alignment& a) {
  if (s.init == "distances") return initialize_from_distances(a, s.init_sigma);
  const std::string prefix = "trees=";
  if (s.init.rfind(prefix, 0) == 0) {
    const std::string path = s.init.substr(prefix.size());
    try {
      const auto trees = read_newick_file(path, a.taxa());
      return initialize_from_trees(trees, a.taxa());
    } catch (const std::exception& e) {
      throw CommandError(kExitBadInput, path + ": " + e.what());
    }
  }
  throw CommandError(kExitBadInput, "--init must be 'distances' or 'trees=<file>'");
}

int cmd_infer(const InferSettings& s, std::ostream& out, std::ostream& err) {
  Alignment a = load_alignment(s.fasta, !s.no_compress);
  if (s.drop_constant) {
    std::string warning;
    a = drop_constant_sites(a, &warning);
    if (!warning.empty()) err << "warning: " << warning << "\n";
  }
  const PriorConfig prior{s.pop_size};
  if (!(s.pop_size > 0.0)) throw CommandError(kExitBadInput, "--pop-size must be > 0");

  RunConfig run;
  try {
    run.estimator = parse_estimator(s.estimator);
  } catch (const std::invalid_argument& e) {
    throw CommandError(kExitBadInput, e.what());
  }
  run.batch_size = s.batch_size;
  run.learning_rate = s.lr;
  run.max_iterations = s.iters;
  run.wallclock_budget_s = s.budget;
  run.eval_every = s.eval_every;
  run.eval_samples = s.eval_samples;
  run.seed = s.seed;
  run.deterministic = s.deterministic;
  run.threads = resolve_threads(s.threads);
  try {
    run.validate();
  } catch (const std::invalid_argument& e) {
    throw CommandError(kExitBadInput, e.what());
  }
  if (s.sweep && (s.sweep_rates.empty() || s.sweep_restarts == 0))
    throw CommandError(kExitBadInput, "--sweep needs at least one rate and one restart");

  const auto init = initial_params(s, a);
  const fs::path dir = s.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CommandError(kExitBadInput, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "alignment.json", alignment_summary_json(a));

  TrainResult result{init, {}, {}, 0};
  try {
    if (s.sweep) {
      const auto sw = sweep(run, SweepConfig{s.sweep_rates, s.sweep_restarts}, a, prior, init);
      std::ostringstream board;
      board << "rank,learning_rate,restart,seed,statistic,error\n";
      for (std::size_t i = 0; i < sw.leaderboard.size(); ++i) {
        const auto& e = sw.leaderboard[i];
        board << i + 1 << "," << fmt(e.learning_rate) << "," << e.restart << "," << e.seed << ","
              << (e.failed ? std::string("nan") : fmt(e.statistic)) << "," << e.error << "\n";
      }
      write_text(dir / "leaderboard.csv", board.str());
      result = sw.best;
      err << "sweep: best learning rate " << fmt(sw.best_entry.learning_rate) << ", restart "
          << sw.best_entry.restart << "\n";
    } else {
      result = train(run, a, prior, init, [&](const VariationalParams& p, const TraceRecord&) {
        write_text(dir / "params.json", params_to_json(p));
      });
    }
  } catch (const TrainingAborted& e) {
    err << "training aborted: " << e.what() << "\n";
    return kExitAborted;
  } catch (const std::runtime_error& e) {
    // every sweep cell failed
    err << "training aborted: " << e.what() << "\n";
    return kExitAborted;
  }

  std::ostringstream trace;
  write_trace_csv(trace, result.trace);
  write_text(dir / "trace.csv", trace.str());
  write_text(dir / "params.json", params_to_json(result.params));

  const std::size_t n = s.n_tree_samples;
  std::vector<std::string> newick(n);
  std::vector<double> lengths(n), logliks(n);
  parallel_for(n, run.threads, [&](std::size_t i) {
    auto rng = make_rng(s.seed, kTreeStream, i);
    const auto sample = sample_tree(result.params, rng);
    newick[i] = to_newick(sample.tree, a.taxa());
    lengths[i] = tree_length(sample.tree);
    logliks[i] = log_likelihood(a, sample.tree);
  });
  std::ostringstream trees, metrics;
  metrics << "sample,tree_length,log_likelihood\n";
  for (std::size_t i = 0; i < n; ++i) {
    trees << newick[i] << "\n";
    metrics << i << "," << fmt(lengths[i]) << "," << fmt(logliks[i]) << "\n";
  }
  write_text(dir / "trees.nwk", trees.str());
  write_text(dir / "metrics.csv", metrics.str());
  if (s.plot) write_text(dir / "plot.svg", render_report_svg(result.trace, lengths, logliks));

  if (!result.trace.empty()) {
    const auto& last = result.trace.back();
    out << "iterations " << last.iteration << "\n"
        << "final MLL " << fmt(last.mll) << " +/- " << fmt(last.mll_se) << "\n"
        << "selection statistic " << fmt(selection_statistic(result.trace)) << "\n";
  }
  if (result.skipped_iterations > 0)
    err << "warning: " << result.skipped_iterations
        << " iterations skipped because of non-finite gradients\n";
  out << "outputs written to " << dir.string() << "\n";
  return kExitOk;
}

int cmd_mll(const MllSettings& s, std::ostream& out) {
  const auto params = load_params(s.params);
  const auto a = load_alignment(s.fasta, true);
  require_same_taxa(params, a);
  if (!(s.pop_size > 0.0)) throw CommandError(kExitBadInput, "--pop-size must be > 0");
  if (s.n_samples < 2) throw CommandError(kExitBadInput, "--n-samples must be >= 2");
  const auto est = estimate_mll(params, a, {s.pop_size}, s.n_samples, s.seed, kMllStream,
                                resolve_threads(s.threads));
  if (s.json) {
    nlohmann::ordered_json j;
    j["mll"] = est.estimate;
    j["standard_error"] = est.standard_error;
    j["effective_sample_size"] = est.effective_sample_size;
    j["n_samples"] = s.n_samples;
    out << j.dump(2) << "\n";
  } else {
    out << fmt(est.estimate) << " +/- " << fmt(est.standard_error) << " (ESS "
        << fmt(est.effective_sample_size) << " of " << s.n_samples << ")\n";
  }
  return kExitOk;
}

int cmd_sample(const SampleSettings& s, std::ostream& out) {
  const auto params = load_params(s.params);
  for (std::size_t i = 0; i < s.n; ++i) {
    auto rng = make_rng(s.seed, kTreeStream, i);
    out << to_newick(sample_tree(params, rng).tree, params.taxa()) << "\n";
  }
  return kExitOk;
}

int cmd_simulate(const SimulateSettings& s, std::ostream& out) {
  if (s.taxa < 2) throw CommandError(kExitBadInput, "--taxa must be >= 2");
  if (s.sites < 1) throw CommandError(kExitBadInput, "--sites must be >= 1");
  if (!(s.pop_size > 0.0)) throw CommandError(kExitBadInput, "--pop-size must be > 0");
  auto rng = make_rng(s.seed, 0);
  const auto tree = simulate_coalescent(s.taxa, s.pop_size, rng);
  const auto names = default_taxon_names(s.taxa);
  const auto a = simulate_sequences(tree, names, s.sites, rng);
  const fs::path dir = s.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CommandError(kExitBadInput, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "alignment.fasta", to_fasta(a));
  write_text(dir / "truth.nwk", to_newick(tree, names) + "\n");
  nlohmann::ordered_json manifest;
  manifest["seed"] = s.seed;
  manifest["n_e"] = s.pop_size;
  manifest["n_taxa"] = s.taxa;
  manifest["n_sites"] = s.sites;
  manifest["alignment"] = "alignment.fasta";
  manifest["truth"] = "truth.nwk";
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << (dir / "alignment.fasta").string() << ", " << (dir / "truth.nwk").string()
      << ", " << (dir / "manifest.json").string() << "\n";
  return kExitOk;
}

int cmd_check(const CheckSettings& s, std::ostream& out, std::ostream& err) {
  CheckOptions opts;
  if (s.level == "fast") {
    opts.level = CheckLevel::kFast;
  } else if (s.level == "full") {
    opts.level = CheckLevel::kFull;
  } else {
    throw CommandError(kExitBadInput, "--level must be fast or full");
  }
  opts.seed = s.seed;
  opts.threads = resolve_threads(s.threads);
  opts.log = &err;
  bool all = true;
  for (const auto& r : run_checks(opts, s.criteria)) {
    out << format_check_line(r) << "\n" << std::flush;
    all = all && r.passed;
  }
  return all ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const BenchSettings& s, std::ostream& out, std::ostream& err) {
  if (s.taxa.empty()) throw CommandError(kExitBadInput, "--taxa-list is empty");
  for (auto n : s.taxa)
    if (n < 2) throw CommandError(kExitBadInput, "--taxa-list entries must be >= 2");
  const auto rows = run_scaling_benchmark(s.taxa, s.iters, s.seed, s.sites);
  std::ostringstream csv;
  csv << "n_taxa,path,seconds_per_iter,repetitions\n";
  for (const auto& r : rows)
    csv << r.n_taxa << "," << r.path << "," << fmt(r.seconds_per_iter) << "," << r.repetitions
        << "\n";
  out << csv.str();
  if (!s.out_csv.empty()) write_text(s.out_csv, csv.str());
  if (s.taxa.size() >= 2)
    for (const auto& [path, slope] : scaling_slopes(rows))
      err << "log-log slope " << path << " " << fmt(slope) << "\n";
  return kExitOk;
}

}  // namespace

std::shared_ptr<Settings> make_settings() { return std::make_shared<Settings>(); }

std::unique_ptr<CLI::App> make_app(Settings& st) {
  auto app = std::make_unique<CLI::App>(
      "Variational Bayesian inference of ultrametric phylogenies with single-linkage tree "
      "sampling.",
      "vipr");
  app->require_subcommand(1);
  app->set_config("--config", "",
                  "JSON file with one object per subcommand holding long flag names, e.g. "
                  "{\"infer\": {\"lr\": 0.03}}; command-line flags take precedence");
  app->config_formatter(std::make_shared<JsonConfig>());
  app->allow_config_extras(CLI::config_extras_mode::error);
  app->add_option("--kernels", st.kernels, "Pruning kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->envname("VIPR_KERNELS")
      ->capture_default_str();

  auto* infer = app->add_subcommand("infer", "Fit the variational distribution to an alignment");
  auto& in = st.infer;
  infer->add_option("fasta", in.fasta, "Aligned DNA sequences in FASTA format")->required();
  infer->add_option("--out", in.out_dir, "Output directory")
      ->envname("VIPR_OUT_DIR")
      ->capture_default_str();
  infer->add_option("--estimator", in.estimator, "Gradient estimator: loor, reparam or vimco")
      ->check(CLI::IsMember({"loor", "reparam", "vimco"}))
      ->capture_default_str();
  infer->add_option("--batch-size", in.batch_size, "Trees sampled per iteration (K)")
      ->capture_default_str();
  infer->add_option("--lr", in.lr, "Adam learning rate")->capture_default_str();
  infer->add_option("--iters", in.iters, "Maximum number of iterations")->capture_default_str();
  infer->add_option("--budget", in.budget,
                    "Wallclock budget in seconds (0 = none; ignored with --deterministic)")
      ->capture_default_str();
  infer->add_option("--eval-every", in.eval_every, "Iterations between MLL estimates")
      ->capture_default_str();
  infer->add_option("--eval-samples", in.eval_samples, "Importance samples per MLL estimate")
      ->capture_default_str();
  infer->add_option("--seed", in.seed, "Master random seed")->capture_default_str();
  infer->add_flag("--deterministic", in.deterministic,
                  "Reproducible outputs: elapsed times recorded as 0 and the wallclock budget "
                  "ignored");
  infer->add_option("--threads", in.threads, "Worker threads (0 = all hardware threads)")
      ->envname("VIPR_THREADS")
      ->capture_default_str();
  infer->add_option("--pop-size", in.pop_size, "Coalescent effective population size n_e")
      ->capture_default_str();
  infer->add_option("--init", in.init,
                    "Initialization: 'distances' (JC pair distances) or 'trees=<file>' "
                    "(one Newick tree per line)")
      ->capture_default_str();
  infer->add_option("--init-sigma", in.init_sigma, "Log-scale spread used by --init distances")
      ->capture_default_str();
  infer->add_flag("--sweep", in.sweep, "Run the learning-rate x restart grid and keep the best run");
  infer->add_option("--sweep-rates", in.sweep_rates, "Learning rates tried by --sweep")
      ->delimiter(',')
      ->capture_default_str();
  infer->add_option("--sweep-restarts", in.sweep_restarts, "Restarts per rate for --sweep")
      ->capture_default_str();
  infer->add_option("--n-tree-samples", in.n_tree_samples,
                    "Trees drawn from the fitted distribution into trees.nwk and metrics.csv")
      ->capture_default_str();
  infer->add_flag("--no-compress", in.no_compress,
                  "Keep every alignment column instead of merging identical site patterns");
  infer->add_flag("--drop-constant", in.drop_constant, "Remove constant columns before fitting");
  infer->add_flag("--plot", in.plot, "Write plot.svg with the MLL trace and tree histograms");
  infer->fallthrough();

  auto* mll = app->add_subcommand("mll", "Importance-sampling estimate of the marginal likelihood");
  auto& ml = st.mll;
  mll->add_option("params", ml.params, "Fitted parameters (params.json)")->required();
  mll->add_option("fasta", ml.fasta, "Alignment in FASTA format")->required();
  mll->add_option("--n-samples", ml.n_samples, "Importance samples")->capture_default_str();
  mll->add_option("--seed", ml.seed, "Random seed")->capture_default_str();
  mll->add_option("--threads", ml.threads, "Worker threads (0 = all hardware threads)")
      ->envname("VIPR_THREADS")
      ->capture_default_str();
  mll->add_option("--pop-size", ml.pop_size, "Coalescent effective population size n_e")
      ->capture_default_str();
  mll->add_flag("--json", ml.json, "Print a JSON object instead of text");
  mll->fallthrough();

  auto* sample = app->add_subcommand("sample", "Print trees drawn from fitted parameters as Newick");
  auto& sa = st.sample;
  sample->add_option("params", sa.params, "Fitted parameters (params.json)")->required();
  sample->add_option("--n", sa.n, "Number of trees")->capture_default_str();
  sample->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  sample->fallthrough();

  auto* simulate = app->add_subcommand("simulate", "Simulate a coalescent tree and JC alignment");
  auto& si = st.simulate;
  simulate->add_option("--taxa", si.taxa, "Number of taxa")->required();
  simulate->add_option("--sites", si.sites, "Alignment length")->required();
  simulate->add_option("--pop-size", si.pop_size, "Coalescent effective population size n_e")
      ->capture_default_str();
  simulate->add_option("--seed", si.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out", si.out_dir, "Output directory")
      ->envname("VIPR_OUT_DIR")
      ->capture_default_str();
  simulate->fallthrough();

  auto* check = app->add_subcommand("check", "Run the oracle and property validation suite");
  auto& ch = st.check;
  check->add_option("--level", ch.level, "fast (reduced sample sizes) or full (acceptance sizes)")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  check->add_option("--criteria", ch.criteria, "Comma-separated criterion numbers (default all)")
      ->delimiter(',');
  check->add_option("--seed", ch.seed, "Random seed")->capture_default_str();
  check->add_option("--threads", ch.threads, "Worker threads (0 = all hardware threads)")
      ->envname("VIPR_THREADS")
      ->capture_default_str();
  check->fallthrough();

  auto* bench = app->add_subcommand("bench-scaling", "Time one iteration versus the number of taxa");
  auto& be = st.bench;
  bench->add_option("--taxa-list", be.taxa, "Comma-separated taxon counts")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--iters", be.iters, "Minimum repetitions per measurement")
      ->capture_default_str();
  bench->add_option("--sites", be.sites, "Alignment length for the estimator paths")
      ->capture_default_str();
  bench->add_option("--seed", be.seed, "Random seed")->capture_default_str();
  bench->add_option("--csv", be.out_csv, "Also write the CSV to this file");
  bench->fallthrough();
  return app;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto settings = make_settings();
  auto app = make_app(*settings);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app->parse(rev);
  } catch (const CLI::CallForHelp&) {
    // help() follows the selected subcommand, if any
    out << app->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app->help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (app->get_subcommands().empty()) err << "run 'vipr --help' for usage\n";
    return kExitBadInput;
  }

  try {
    if (settings->kernels == "scalar") kernels::select_kernels(kernels::KernelChoice::kScalar);
    if (settings->kernels == "avx2") kernels::select_kernels(kernels::KernelChoice::kAvx2);
    if (settings->kernels == "auto") kernels::select_kernels(kernels::KernelChoice::kAuto);
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  const auto* sub = app->get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "infer") return cmd_infer(settings->infer, out, err);
    if (name == "mll") return cmd_mll(settings->mll, out);
    if (name == "sample") return cmd_sample(settings->sample, out);
    if (name == "simulate") return cmd_simulate(settings->simulate, out);
    if (name == "check") return cmd_check(settings->check, out, err);
    if (name == "bench-scaling") return cmd_bench(settings->bench, out, err);
  } catch (const CommandError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  err << "error: unknown subcommand " << name << "\n";
  return kExitBadInput;
}

}  // namespace vipr::cli
