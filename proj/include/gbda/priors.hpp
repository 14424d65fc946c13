#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gbda/branch.hpp"
#include "gbda/error.hpp"
#include "gbda/graph.hpp"
#include "gbda/model.hpp"

namespace gbda {

inline constexpr double kSigmaFloor = 1e-3;

struct GmmComponent {
  double weight = 0;
  double mean = 0;
  double stddev = 0;

  friend bool operator==(const GmmComponent&, const GmmComponent&) = default;
};

struct GmmModel {
  std::vector<GmmComponent> components;

  std::size_t k() const { return components.size(); }
  friend bool operator==(const GmmModel&, const GmmModel&) = default;
};

struct GmmOptions {
  std::size_t k = 3;
  std::size_t max_iter = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct GmmFit {
  GmmModel model;
  /// Mean log-likelihood per sample of the model entering each EM iteration.
  std::vector<double> log_likelihood;
};

/// GBDs of `n_pairs` uniformly drawn unordered pairs of distinct graphs
/// (with replacement across draws).
inline std::vector<double> sample_gbd_pairs(std::span<const BranchIndex> corpus, std::size_t n_pairs,
                                            std::uint64_t seed) {
  if (corpus.size() < 2) throw std::invalid_argument("sample_gbd_pairs: corpus needs at least 2 graphs");
  if (n_pairs == 0) throw std::invalid_argument("sample_gbd_pairs: n_pairs must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> first(0, corpus.size() - 1);
  std::uniform_int_distribution<std::size_t> second(0, corpus.size() - 2);
  std::vector<double> out;
  out.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    out.push_back(static_cast<double>(gbd(corpus[a], corpus[b])));
  }
  return out;
}

namespace detail {

inline double normal_log_pdf(double x, double mean, double sd) {
  static const double log_sqrt_2pi = 0.5 * std::log(2 * M_PI);
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - log_sqrt_2pi;
}

/// k-means++ seeding on 1-D points with multiplicities.
inline std::vector<double> seed_means(const std::vector<double>& values, const std::vector<double>& counts,
                                      std::size_t k, std::mt19937_64& rng) {
  std::vector<double> cum(values.size());
  auto draw = [&](const std::vector<double>& w) {
    std::partial_sum(w.begin(), w.end(), cum.begin());
    std::uniform_real_distribution<double> u(0.0, cum.back());
    const double t = u(rng);
    auto it = std::upper_bound(cum.begin(), cum.end(), t);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cum.begin(), values.size() - 1));
  };
  std::vector<double> means{values[draw(counts)]};
  std::vector<double> d2(values.size());
  while (means.size() < k) {
    double total = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double m : means) best = std::min(best, (values[i] - m) * (values[i] - m));
      d2[i] = counts[i] * best;
      total += d2[i];
    }
    // All mass already sits on a chosen centre: fall back to count-weighted draws.
    means.push_back(values[draw(total > 0 ? d2 : counts)]);
  }
  std::sort(means.begin(), means.end());
  return means;
}

}  // namespace detail

/// EM for a 1-D Gaussian mixture. Equal samples are pooled, which leaves the
/// likelihood unchanged and makes large integer-valued GBD samples cheap.
inline GmmFit fit_gmm_trace(std::span<const double> samples, const GmmOptions& opt = {}) {
  if (opt.k == 0) throw std::invalid_argument("fit_gmm: k must be >= 1");
  if (samples.size() < opt.k) throw std::invalid_argument("fit_gmm: fewer samples than components");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> values, counts;
  for (double s : sorted) {
    if (!std::isfinite(s)) throw std::invalid_argument("fit_gmm: non-finite sample");
    if (values.empty() || values.back() != s) {
      values.push_back(s);
      counts.push_back(1);
    } else {
      counts.back() += 1;
    }
  }
  const double n = static_cast<double>(samples.size());
  double mean = 0, var = 0;
  for (std::size_t i = 0; i < values.size(); ++i) mean += counts[i] * values[i];
  mean /= n;
  for (std::size_t i = 0; i < values.size(); ++i) var += counts[i] * (values[i] - mean) * (values[i] - mean);
  const double sd0 = std::max(std::sqrt(var / n), kSigmaFloor);

  std::mt19937_64 rng(opt.seed);
  GmmFit fit;
  for (double m : detail::seed_means(values, counts, opt.k, rng)) {
    fit.model.components.push_back({1.0 / static_cast<double>(opt.k), m, sd0});
  }

  const std::size_t K = opt.k, U = values.size();
  std::vector<double> resp(U * K);
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < opt.max_iter; ++iter) {
    // E step: responsibilities and the log-likelihood of the current model.
    double ll = 0;
    for (std::size_t i = 0; i < U; ++i) {
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < K; ++c) {
        const auto& comp = fit.model.components[c];
        resp[i * K + c] = comp.weight > 0 ? std::log(comp.weight) + detail::normal_log_pdf(values[i], comp.mean, comp.stddev)
                                          : -std::numeric_limits<double>::infinity();
        top = std::max(top, resp[i * K + c]);
      }
      double sum = 0;
      for (std::size_t c = 0; c < K; ++c) sum += std::exp(resp[i * K + c] - top);
      const double lse = top + std::log(sum);
      for (std::size_t c = 0; c < K; ++c) resp[i * K + c] = std::exp(resp[i * K + c] - lse);
      ll += counts[i] * lse;
    }
    ll /= n;
    fit.log_likelihood.push_back(ll);
    if (iter > 0 && std::abs(ll - previous) < opt.tol) break;
    previous = ll;

    // M step, with the standard deviation constrained to >= kSigmaFloor.
    for (std::size_t c = 0; c < K; ++c) {
      double nk = 0, mu = 0;
      for (std::size_t i = 0; i < U; ++i) {
        nk += counts[i] * resp[i * K + c];
        mu += counts[i] * resp[i * K + c] * values[i];
      }
      auto& comp = fit.model.components[c];
      if (nk <= 0) {
        comp.weight = 0;
        continue;
      }
      mu /= nk;
      double v = 0;
      for (std::size_t i = 0; i < U; ++i) v += counts[i] * resp[i * K + c] * (values[i] - mu) * (values[i] - mu);
      comp.weight = nk / n;
      comp.mean = mu;
      comp.stddev = std::max(std::sqrt(v / nk), kSigmaFloor);
    }
  }

  double total = 0;
  for (const auto& c : fit.model.components) total += c.weight;
  for (auto& c : fit.model.components) c.weight /= total;
  return fit;
}

inline GmmModel fit_gmm(std::span<const double> samples, const GmmOptions& opt = {}) {
  return fit_gmm_trace(samples, opt).model;
}

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Λ2: GMM mass on [phi - 0.5, phi + 0.5].
inline double gbd_prior_prob(const GmmModel& model, double phi) {
  double p = 0;
  for (const auto& c : model.components) {
    p += c.weight * (standard_normal_cdf((phi + 0.5 - c.mean) / c.stddev) -
                     standard_normal_cdf((phi - 0.5 - c.mean) / c.stddev));
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Λ3 over (tau = 0..tau_hat) × (v = 1..n_max).
struct GedPriorTable {
  std::int64_t tau_hat = 0;
  std::int64_t n_max = 0;
  double norm_c = 0;
  std::vector<std::vector<double>> values;  // values[tau][v - 1]

  double at(std::int64_t tau, std::int64_t v) const {
    if (tau < 0 || tau > tau_hat) throw DataError("GED prior: tau " + std::to_string(tau) + " outside table");
    if (v < 1 || v > n_max) {
      throw DataError("GED prior: v = " + std::to_string(v) + " exceeds table n_max " + std::to_string(n_max));
    }
    return values[tau][v - 1];
  }

  friend bool operator==(const GedPriorTable&, const GedPriorTable&) = default;
};

/// sqrt(Σ_{phi=0}^{2 tau} Λ1 · Z²) for every tau of one v column, without norm_c.
/// Cells with Λ1 below the floor contribute nothing.
template <class K>
std::vector<double> jeffreys_column(const ModelParams& p, std::int64_t tau_hat) {
  detail::LikelihoodTable<K> table(p, tau_hat);
  std::vector<long double> acc(static_cast<std::size_t>(tau_hat + 1), 0.0L);
  for (std::int64_t phi = 0; phi <= 2 * tau_hat; ++phi) {
    const auto column = table.column(phi);
    for (std::int64_t tau = (phi + 1) / 2; tau <= tau_hat; ++tau) {
      const long double lambda = K::to_ld(column[tau]);
      if (!(lambda > kLambdaFloor)) continue;
      if (auto z = table.z(tau, phi)) acc[tau] += lambda * static_cast<long double>(*z) * (*z);
    }
  }
  std::vector<double> out;
  for (auto a : acc) out.push_back(static_cast<double>(std::sqrt(a)));
  return out;
}

/// Jeffreys GED prior table. Columns whose branch-type count D is below 2 are
/// left at zero. Columns are distributed over `threads` workers; the result
/// does not depend on the thread count.
inline GedPriorTable build_ged_prior(std::int64_t tau_hat, std::int64_t n_max, const LabelAlphabet& alphabet,
                                     unsigned threads = 1) {
  if (tau_hat < 0) throw std::invalid_argument("build_ged_prior: tau_hat must be >= 0");
  if (n_max < 1) throw std::invalid_argument("build_ged_prior: n_max must be >= 1");
  const auto lv = static_cast<std::int64_t>(alphabet.vertex_labels.size());
  const auto le = static_cast<std::int64_t>(alphabet.edge_labels.size());

  GedPriorTable t{tau_hat, n_max, 1.0 / (static_cast<double>(tau_hat + 1) * static_cast<double>(n_max)), {}};
  t.values.assign(static_cast<std::size_t>(tau_hat + 1), std::vector<double>(static_cast<std::size_t>(n_max), 0.0));

  std::atomic<std::int64_t> next{1};
  auto worker = [&] {
    for (std::int64_t v = next++; v <= n_max; v = next++) {
      if (lv < 1 || ModelParams::branch_types(v, lv, le) < 2) continue;
      const auto p = ModelParams::make(v, lv, le);
      const auto col = p.exact() ? jeffreys_column<detail::ExactKernel>(p, tau_hat)
                                 : jeffreys_column<detail::LogSpaceKernel>(p, tau_hat);
      for (std::int64_t tau = 0; tau <= tau_hat; ++tau) t.values[tau][v - 1] = t.norm_c * col[tau];
    }
  };
  threads = std::max(1u, threads);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return t;
}

struct PriorStore {
  GmmModel gmm;
  GedPriorTable ged_table;
  LabelAlphabet alphabet;
  std::size_t n_pairs = 0;

  friend bool operator==(const PriorStore&, const PriorStore&) = default;
};

struct PrecomputeOptions {
  std::int64_t tau_hat = 10;
  /// 0 means the largest vertex count in the corpus.
  std::int64_t n_max = 0;
  std::size_t n_pairs = 100000;
  GmmOptions gmm;
  unsigned threads = 1;
};

/// Offline stage: GMM over sampled GBDs plus the Jeffreys GED table.
inline PriorStore precompute_priors(std::span<const Graph> corpus, std::span<const BranchIndex> indexes,
                                    const PrecomputeOptions& opt) {
  PriorStore store;
  store.alphabet = LabelAlphabet::of(corpus);
  store.n_pairs = opt.n_pairs;
  const auto samples = sample_gbd_pairs(indexes, opt.n_pairs, opt.gmm.seed);
  store.gmm = fit_gmm(samples, opt.gmm);
  std::int64_t n_max = opt.n_max;
  if (n_max == 0) {
    for (const auto& g : corpus) n_max = std::max<std::int64_t>(n_max, static_cast<std::int64_t>(g.vertex_count()));
    n_max = std::max<std::int64_t>(n_max, 1);
  }
  store.ged_table = build_ged_prior(opt.tau_hat, n_max, store.alphabet, opt.threads);
  return store;
}

// ---------------------------------------------------------------------------
// Prior file: one JSON document, version 1.

inline constexpr int kPriorFileVersion = 1;

inline nlohmann::json priors_to_json(const PriorStore& s) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : s.gmm.components) comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"stddev", c.stddev}});
  return {{"version", kPriorFileVersion},
          {"gmm", {{"components", std::move(comps)}}},
          {"ged_table",
           {{"tau_hat", s.ged_table.tau_hat},
            {"n_max", s.ged_table.n_max},
            {"norm_c", s.ged_table.norm_c},
            {"values", s.ged_table.values}}},
          {"alphabet", {{"vertex_labels", s.alphabet.vertex_labels}, {"edge_labels", s.alphabet.edge_labels}}},
          {"n_pairs", s.n_pairs}};
}

inline PriorStore priors_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("version")) throw SchemaError("prior file: missing version");
    if (j.at("version") != kPriorFileVersion) {
      throw VersionError("prior file: unsupported version " + j.at("version").dump());
    }
    PriorStore s;
    for (const auto& c : j.at("gmm").at("components")) {
      s.gmm.components.push_back(
          {c.at("weight").get<double>(), c.at("mean").get<double>(), c.at("stddev").get<double>()});
    }
    const auto& t = j.at("ged_table");
    s.ged_table.tau_hat = t.at("tau_hat").get<std::int64_t>();
    s.ged_table.n_max = t.at("n_max").get<std::int64_t>();
    s.ged_table.norm_c = t.at("norm_c").get<double>();
    s.ged_table.values = t.at("values").get<std::vector<std::vector<double>>>();
    if (s.ged_table.tau_hat < 0 || s.ged_table.n_max < 1 ||
        s.ged_table.values.size() != static_cast<std::size_t>(s.ged_table.tau_hat + 1)) {
      throw SchemaError("prior file: ged_table shape does not match tau_hat");
    }
    for (const auto& row : s.ged_table.values) {
      if (row.size() != static_cast<std::size_t>(s.ged_table.n_max)) {
        throw SchemaError("prior file: ged_table shape does not match n_max");
      }
    }
    s.alphabet.vertex_labels = j.at("alphabet").at("vertex_labels").get<std::set<Label>>();
    s.alphabet.edge_labels = j.at("alphabet").at("edge_labels").get<std::set<Label>>();
    s.n_pairs = j.at("n_pairs").get<std::size_t>();
    if (s.gmm.components.empty()) throw SchemaError("prior file: empty GMM");
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError(std::string("prior file: ") + ex.what());
  }
}

inline void save_priors(const PriorStore& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write prior file '" + path + "'");
  out << priors_to_json(s).dump() << '\n';
  if (!out) throw DataError("error writing prior file '" + path + "'");
}

inline PriorStore load_priors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prior file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw SchemaError("prior file '" + path + "': " + ex.what());
  }
  return priors_from_json(j);
}

}  // namespace gbda
