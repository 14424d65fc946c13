#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gbda/assignment.hpp"
#include "gbda/branch.hpp"
#include "gbda/exact_ged.hpp"
#include "gbda/graph.hpp"
#include "gbda/metrics.hpp"
#include "gbda/priors.hpp"
#include "gbda/search.hpp"

namespace gbda {

struct BenchOptions {
  std::int64_t tau_hat = 2;
  std::vector<double> gammas{0.5, 0.7, 0.9};
  Variant variant = Variant::standard;
  double w = 1.0;
  std::size_t alpha = 100;
  /// Number of query graphs, taken at an even stride through the corpus.
  std::size_t queries = 20;
  std::size_t n_pairs = 100000;
  std::size_t gmm_k = 3;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t ged_budget = kDefaultGedBudget;
};

struct BenchResult {
  /// "gbda@<gamma>" rows, then "greedy" and "lsap".
  std::vector<std::pair<std::string, EvalReport>> rows;
  double best_gamma = 0;
  EvalReport best_gbda;
  EvalReport greedy;
  /// Pairs whose exact GED ran out of budget; counted as not similar.
  std::size_t undecided = 0;
};

inline std::vector<std::size_t> strided_queries(std::size_t corpus_size, std::size_t count) {
  std::vector<std::size_t> out;
  if (corpus_size == 0 || count == 0) return out;
  count = std::min(count, corpus_size);
  for (std::size_t i = 0; i < count; ++i) out.push_back(i * corpus_size / count);
  return out;
}

/// Similarity search quality against exact-GED truth: for each query q the
/// truth set is {g : GED(q, g) <= tau_hat}. GBDA is scored at every gamma,
/// the assignment baselines by thresholding their estimates at tau_hat.
inline BenchResult run_bench(std::span<const Graph> corpus, const BenchOptions& opt) {
  std::vector<BranchIndex> indexes;
  for (const auto& g : corpus) indexes.push_back(compute_branches(g));
  PrecomputeOptions pre;
  pre.tau_hat = opt.tau_hat;
  pre.n_pairs = opt.n_pairs;
  pre.gmm.k = opt.gmm_k;
  pre.gmm.seed = opt.seed;
  pre.threads = opt.threads;
  const PriorStore priors = precompute_priors(corpus, indexes, pre);
  PosteriorEngine engine(priors, opt.tau_hat);

  BenchResult out;
  std::map<double, std::vector<EvalReport>> gbda_reports;
  std::vector<EvalReport> greedy_reports, lsap_reports;
  for (std::size_t qi : strided_queries(corpus.size(), opt.queries)) {
    const Graph& q = corpus[qi];
    std::set<std::string> truth, greedy_hits, lsap_hits;
    Stopwatch greedy_clock;
    for (const auto& g : corpus) {
      if (greedy_assignment_estimate(q, g) <= opt.tau_hat) greedy_hits.insert(g.id());
    }
    const double greedy_time = greedy_clock.seconds();
    Stopwatch lsap_clock;
    for (const auto& g : corpus) {
      if (lsap_lower_bound(q, g) <= opt.tau_hat) lsap_hits.insert(g.id());
    }
    const double lsap_time = lsap_clock.seconds();
    for (const auto& g : corpus) {
      const auto r = exact_ged(q, g, opt.ged_budget, opt.tau_hat);
      if (r.is_exact()) {
        truth.insert(g.id());
      } else if (r.status == GedResult::Status::exceeded) {
        ++out.undecided;
      }
    }

    SearchConfig cfg;
    cfg.tau_hat = opt.tau_hat;
    cfg.variant = opt.variant;
    cfg.w = opt.w;
    cfg.alpha = opt.alpha;
    cfg.seed = opt.seed;
    cfg.threads = opt.threads;
    cfg.gamma = 0;
    Stopwatch gbda_clock;
    const auto results = search(compute_branches(q), indexes, cfg, engine, corpus);
    const double gbda_time = gbda_clock.seconds();
    for (double gamma : opt.gammas) {
      std::set<std::string> hits;
      for (const auto& r : results) {
        if (r.error.empty() && accept(r.phi, gamma)) hits.insert(r.graph_id);
      }
      auto rep = evaluate(hits, truth);
      rep.latencies.push_back(gbda_time);
      gbda_reports[gamma].push_back(std::move(rep));
    }
    auto g_rep = evaluate(greedy_hits, truth);
    g_rep.latencies.push_back(greedy_time);
    greedy_reports.push_back(std::move(g_rep));
    auto l_rep = evaluate(lsap_hits, truth);
    l_rep.latencies.push_back(lsap_time);
    lsap_reports.push_back(std::move(l_rep));
  }

  bool first = true;
  for (double gamma : opt.gammas) {
    const auto rep = merge_reports(gbda_reports[gamma]);
    char name[32];
    std::snprintf(name, sizeof name, "gbda@%g", gamma);
    out.rows.emplace_back(name, rep);
    if (first || rep.f1 > out.best_gbda.f1) {
      out.best_gbda = rep;
      out.best_gamma = gamma;
      first = false;
    }
  }
  out.greedy = merge_reports(greedy_reports);
  out.rows.emplace_back("greedy", out.greedy);
  out.rows.emplace_back("lsap", merge_reports(lsap_reports));
  return out;
}

}  // namespace gbda
