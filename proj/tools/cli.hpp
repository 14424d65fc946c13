#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "gbda/gbda.hpp"

namespace gbda::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Writes to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw DataError("cannot open output file '" + path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& get() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

struct Options {
  std::string corpus, query, priors, out, truth, a, b;
  std::int64_t tau_hat = 10;
  std::int64_t bench_tau_hat = 2;
  double gamma = 0.8;
  std::vector<double> gammas{0.5, 0.7, 0.9};
  std::string variant = "standard";
  double w = 1.0;
  std::size_t alpha = 100;
  std::size_t pairs = 100000;
  std::size_t gmm_k = 3;
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::int64_t n_max = 0;
  std::size_t budget = kDefaultGedBudget;
  std::size_t queries = 20;
  // gen
  std::size_t n = 8, d = 4, templates = 10, vertex_labels = 4, edge_labels = 3, edges_per_vertex = 2;
  std::string kind = "random";
  // omega-check
  std::size_t points = 10, trials = 1'000'000;
};

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

inline int cmd_gen(const Options& o, std::ostream& out) {
  GenSpec spec;
  spec.n_vertices = o.n;
  spec.target_degree = o.d;
  spec.kind = o.kind == "scale-free" ? GraphKind::scale_free : GraphKind::random;
  spec.vertex_labels = o.vertex_labels;
  spec.edge_labels = o.edge_labels;
  spec.edges_per_vertex = o.edges_per_vertex;
  spec.seed = o.seed;
  spec.validate();
  const auto corpus = generate_corpus(spec, o.templates);
  Sink sink(o.out, out);
  write_corpus(sink.get(), corpus.graphs);
  if (!o.truth.empty()) {
    std::ofstream t(o.truth);
    if (!t) throw DataError("cannot open truth file '" + o.truth + "'");
    write_truth(t, corpus.truth);
  }
  return kExitOk;
}

inline int cmd_index(const Options& o, std::ostream& out) {
  require(o.corpus, "--corpus");
  const auto corpus = read_corpus(o.corpus);
  Sink sink(o.out, out);
  for (const auto& g : corpus) sink.get() << index_to_json(compute_branches(g)).dump() << '\n';
  return kExitOk;
}

inline int cmd_precompute(const Options& o, std::ostream&) {
  require(o.corpus, "--corpus");
  require(o.out, "--out");
  if (o.tau_hat < 0) throw UsageError("--tau-hat must be >= 0");
  if (o.gmm_k < 1) throw UsageError("--gmm-k must be >= 1");
  const auto corpus = read_corpus(o.corpus);
  std::vector<BranchIndex> indexes;
  for (const auto& g : corpus) indexes.push_back(compute_branches(g));
  PrecomputeOptions pre;
  pre.tau_hat = o.tau_hat;
  pre.n_max = o.n_max;
  pre.n_pairs = o.pairs;
  pre.gmm.k = o.gmm_k;
  pre.gmm.seed = o.seed;
  pre.threads = o.threads;
  save_priors(precompute_priors(corpus, indexes, pre), o.out);
  return kExitOk;
}

inline SearchConfig search_config(const Options& o) {
  SearchConfig cfg;
  cfg.tau_hat = o.tau_hat;
  cfg.gamma = o.gamma;
  cfg.variant = parse_variant(o.variant);
  cfg.w = o.w;
  cfg.alpha = o.alpha;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

inline int cmd_search(const Options& o, std::ostream& out) {
  require(o.corpus, "--corpus");
  require(o.query, "--query");
  require(o.priors, "--priors");
  const auto cfg = search_config(o);
  const auto priors = load_priors(o.priors);
  const auto corpus = read_corpus(o.corpus);
  const auto query = load_graph_ref(o.query);
  std::vector<BranchIndex> indexes;
  for (const auto& g : corpus) indexes.push_back(compute_branches(g));
  PosteriorEngine engine(priors, cfg.tau_hat);
  const auto results = search(compute_branches(query), indexes, cfg, engine, corpus);
  Sink sink(o.out, out);
  for (const auto& r : results) sink.get() << result_to_json(r).dump() << '\n';
  return kExitOk;
}

inline int cmd_gbd(const Options& o, std::ostream& out) {
  require(o.a, "--a");
  require(o.b, "--b");
  const auto g1 = load_graph_ref(o.a), g2 = load_graph_ref(o.b);
  out << gbd(compute_branches(g1), compute_branches(g2)) << '\n';
  return kExitOk;
}

inline int cmd_ged_exact(const Options& o, std::ostream& out) {
  require(o.a, "--a");
  require(o.b, "--b");
  const auto g1 = load_graph_ref(o.a), g2 = load_graph_ref(o.b);
  const auto r = exact_ged(g1, g2, o.budget);
  if (!r.is_exact()) {
    throw DataError("search budget of " + std::to_string(o.budget) + " expansions exhausted; GED >= " +
                    std::to_string(r.value));
  }
  out << r.value << '\n';
  return kExitOk;
}

inline int cmd_bench(const Options& o, std::ostream& out) {
  require(o.corpus, "--corpus");
  BenchOptions opt;
  opt.tau_hat = o.bench_tau_hat;
  opt.gammas = o.gammas;
  opt.variant = parse_variant(o.variant);
  opt.w = o.w;
  opt.alpha = o.alpha;
  opt.queries = o.queries;
  opt.n_pairs = o.pairs;
  opt.gmm_k = o.gmm_k;
  opt.seed = o.seed;
  opt.threads = o.threads;
  opt.ged_budget = o.budget;
  if (opt.tau_hat < 0) throw UsageError("--tau-hat must be >= 0");
  for (double g : opt.gammas) {
    if (!(g >= 0 && g <= 1)) throw UsageError("--gamma must lie in [0, 1]");
  }
  const auto corpus = read_corpus(o.corpus);
  const auto r = run_bench(corpus, opt);
  out << report_table(r.rows);
  if (r.undecided) out << "undecided pairs (GED budget exhausted): " << r.undecided << '\n';
  if (!o.out.empty()) {
    nlohmann::json j{{"best_gamma", r.best_gamma}, {"undecided", r.undecided}};
    for (const auto& [name, rep] : r.rows) j["rows"][name] = report_to_json(rep);
    Sink sink(o.out, out);
    sink.get() << j.dump(2) << '\n';
  }
  return kExitOk;
}

inline int cmd_omega_check(const Options& o, std::ostream& out) {
  if (o.trials < 1) throw UsageError("--trials must be >= 1");
  const auto points = random_omega_points(o.points, o.seed);
  std::size_t failures = 0;
  char buf[256];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& q = points[i];
    for (int which = 1; which <= 4; ++which) {
      const double exact = closed_form_omega(which, q);
      const auto mc = mc_omega(which, q, o.trials, o.seed + 4 * i + static_cast<std::uint64_t>(which));
      // Standard error under the closed form, so a zero-probability point still has a scale.
      const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(o.trials));
      const bool ok = std::abs(mc.estimate - exact) <= 3 * se + 1e-12;
      failures += !ok;
      std::snprintf(buf, sizeof buf,
                    "omega%d v=%lld tau=%lld x=%lld m=%lld r=%lld phi=%lld D=%llu closed=%.6f mc=%.6f se=%.2e %s\n",
                    which, static_cast<long long>(q.v), static_cast<long long>(q.tau), static_cast<long long>(q.x),
                    static_cast<long long>(q.m), static_cast<long long>(q.r), static_cast<long long>(q.phi),
                    static_cast<unsigned long long>(q.d_types), exact, mc.estimate, se, ok ? "ok" : "MISMATCH");
      out << buf;
    }
  }
  out << failures << " of " << 4 * points.size() << " comparisons outside 3 standard errors\n";
  return kExitOk;
}

/// Parses argv and dispatches. Usage problems return 1, data problems 2;
/// diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Graph similarity search by estimating edit distance from branch distance"};
  app.name("gbda");
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Seed for every randomized step");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--variant", o.variant, "standard|v1|v2")->check(CLI::IsMember({"standard", "v1", "v2"}));
    sub->add_option("--w", o.w, "Intersection weight for v2");
    sub->add_option("--alpha", o.alpha, "Sample size for the v1 average vertex count");
  };

  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus with known GED pairs");
  gen->add_option("--n", o.n, "Vertices per graph");
  gen->add_option("--d", o.d, "Modified edges around the center (and its minimum degree)");
  gen->add_option("--kind", o.kind, "random|scale-free")->check(CLI::IsMember({"random", "scale-free"}));
  gen->add_option("--templates", o.templates, "Number of templates; each yields d + 1 graphs");
  gen->add_option("--vertex-labels", o.vertex_labels, "Vertex label alphabet size");
  gen->add_option("--edge-labels", o.edge_labels, "Edge label alphabet size");
  gen->add_option("--edges-per-vertex", o.edges_per_vertex, "Attachment edges per new vertex");
  gen->add_option("--truth", o.truth, "Write (base, variant, ged) records here");
  gen->add_option("--out", o.out, "Corpus output (JSON Lines); default stdout");
  add_common(gen);

  auto* index = app.add_subcommand("index", "Write the branch index of every corpus graph");
  index->add_option("--corpus", o.corpus, "Corpus (JSON Lines)");
  index->add_option("--out", o.out, "Index output; default stdout");

  auto* pre = app.add_subcommand("precompute", "Fit the GBD prior and build the GED prior table");
  pre->add_option("--corpus", o.corpus, "Corpus (JSON Lines)");
  pre->add_option("--tau-hat", o.tau_hat, "Largest GED threshold the priors will serve");
  pre->add_option("--pairs", o.pairs, "Sampled graph pairs for the GBD prior");
  pre->add_option("--gmm-k", o.gmm_k, "Mixture components");
  pre->add_option("--n-max", o.n_max, "Largest extended vertex count (0: corpus maximum)");
  pre->add_option("--out", o.out, "Prior file to write");
  add_common(pre);

  auto* srch = app.add_subcommand("search", "Rank corpus graphs by posterior P[GED <= tau-hat]");
  srch->add_option("--corpus", o.corpus, "Corpus (JSON Lines)");
  srch->add_option("--query", o.query, "Query graph as PATH#ID");
  srch->add_option("--priors", o.priors, "Prior file from precompute");
  srch->add_option("--tau-hat", o.tau_hat, "GED threshold");
  srch->add_option("--gamma", o.gamma, "Acceptance threshold on the posterior");
  srch->add_option("--out", o.out, "Results (JSON Lines); default stdout");
  add_model(srch);
  add_common(srch);

  auto* g = app.add_subcommand("gbd", "Branch distance between two graphs");
  g->add_option("--a", o.a, "First graph as PATH#ID");
  g->add_option("--b", o.b, "Second graph as PATH#ID");

  auto* ged = app.add_subcommand("ged-exact", "Exact edit distance between two graphs");
  ged->add_option("--a", o.a, "First graph as PATH#ID");
  ged->add_option("--b", o.b, "Second graph as PATH#ID");
  ged->add_option("--budget", o.budget, "Node expansion budget");

  auto* bench = app.add_subcommand("bench", "Precision, recall and F1 against exact-GED truth");
  bench->add_option("--corpus", o.corpus, "Corpus (JSON Lines)");
  bench->add_option("--tau-hat", o.bench_tau_hat, "GED threshold");
  bench->add_option("--gamma", o.gammas, "Acceptance thresholds to score (repeatable)");
  bench->add_option("--queries", o.queries, "Query graphs, evenly strided through the corpus");
  bench->add_option("--pairs", o.pairs, "Sampled graph pairs for the GBD prior");
  bench->add_option("--gmm-k", o.gmm_k, "Mixture components");
  bench->add_option("--budget", o.budget, "Exact GED expansion budget per pair");
  bench->add_option("--out", o.out, "Also write the report as JSON here");
  add_model(bench);
  add_common(bench);

  auto* omega = app.add_subcommand("omega-check", "Compare closed-form Omegas with Monte Carlo estimates");
  omega->add_option("--points", o.points, "Random parameter points");
  omega->add_option("--trials", o.trials, "Monte Carlo trials per estimate");
  omega->add_option("--seed", o.seed, "Seed for points and simulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen(o, out);
    if (*index) return cmd_index(o, out);
    if (*pre) return cmd_precompute(o, out);
    if (*srch) return cmd_search(o, out);
    if (*g) return cmd_gbd(o, out);
    if (*ged) return cmd_ged_exact(o, out);
    if (*bench) return cmd_bench(o, out);
    if (*omega) return cmd_omega_check(o, out);
  } catch (const DataError& e) {
    err << "gbda: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "gbda: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "gbda: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace gbda::cli
