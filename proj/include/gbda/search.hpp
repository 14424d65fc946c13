#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "gbda/branch.hpp"
#include "gbda/graph.hpp"
#include "gbda/model.hpp"
#include "gbda/priors.hpp"

namespace gbda {

/// Floor applied to the GBD prior before it is divided by.
inline constexpr double kGbdPriorFloor = 1e-12;

enum class Variant { standard, v1, v2 };

inline Variant parse_variant(const std::string& s) {
  if (s == "standard") return Variant::standard;
  if (s == "v1") return Variant::v1;
  if (s == "v2") return Variant::v2;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::standard: return "standard";
    case Variant::v1: return "v1";
    case Variant::v2: return "v2";
  }
  return "?";
}

struct SearchConfig {
  std::int64_t tau_hat = 10;
  double gamma = 0.8;
  Variant variant = Variant::standard;
  /// Sample size for the v1 average vertex count.
  std::size_t alpha = 100;
  /// Intersection weight for v2.
  double w = 1.0;
  unsigned threads = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (tau_hat < 0) throw std::invalid_argument("tau_hat must be >= 0");
    if (!(gamma >= 0 && gamma <= 1)) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (variant == Variant::v2 && !(w > 0)) throw std::invalid_argument("w must be > 0 for v2");
    if (variant == Variant::v1 && alpha < 1) throw std::invalid_argument("alpha must be >= 1 for v1");
  }
};

struct QueryResult {
  std::string graph_id;
  /// Branch distance fed to the model (rounded VGBD under v2).
  std::int64_t gbd = 0;
  /// Posterior before clamping; the accept test uses clamp(phi, 0, 1).
  double phi = 0;
  bool accepted = false;
  /// Non-empty when the posterior could not be evaluated; such entries are rejected.
  std::string error;

  friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

/// Σ_tau Λ1[tau] · Λ3[tau] / max(Λ2, floor).
inline double posterior_sum(std::span<const double> lambda1_column, std::span<const double> ged_prior,
                            double gbd_prior) {
  if (lambda1_column.size() != ged_prior.size()) {
    throw std::invalid_argument("posterior_sum: column lengths differ");
  }
  double s = 0;
  for (std::size_t t = 0; t < lambda1_column.size(); ++t) s += lambda1_column[t] * ged_prior[t];
  return s / std::max(gbd_prior, kGbdPriorFloor);
}

inline bool accept(double phi, double gamma) { return std::clamp(phi, 0.0, 1.0) >= gamma; }

/// Rounded mean vertex count of `alpha` graphs drawn without replacement.
inline std::int64_t v1_effective_v(std::span<const Graph> corpus, std::size_t alpha, std::uint64_t seed) {
  if (corpus.empty()) throw std::invalid_argument("v1_effective_v: empty corpus");
  if (alpha < 1) throw std::invalid_argument("v1_effective_v: alpha must be >= 1");
  const std::size_t n = std::min(alpha, corpus.size());
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<double>(corpus[order[i]].vertex_count());
  return std::llround(total / static_cast<double>(n));
}

/// Model-side distance for a pair under the configured variant.
inline std::int64_t model_distance(const BranchIndex& q, const BranchIndex& g, const SearchConfig& cfg) {
  if (cfg.variant == Variant::v2) return std::llround(vgbd(q, g, cfg.w));
  return static_cast<std::int64_t>(gbd(q, g));
}

/// Posterior evaluation against one PriorStore. Λ1 columns are cached per
/// (v, phi) and the Omega tables per v, so repeated sizes cost one lookup.
/// Safe to share between threads.
class PosteriorEngine {
 public:
  PosteriorEngine(const PriorStore& priors, std::int64_t tau_hat) : priors_(priors), tau_hat_(tau_hat) {
    if (tau_hat > priors.ged_table.tau_hat) {
      throw DataError("priors cover tau_hat <= " + std::to_string(priors.ged_table.tau_hat) + ", asked for " +
                      std::to_string(tau_hat));
    }
  }

  std::int64_t tau_hat() const { return tau_hat_; }

  /// Λ1(tau, phi) for tau = 0..tau_hat at extended size v.
  std::vector<double> lambda1_column(std::int64_t v, std::int64_t phi) {
    std::lock_guard lock(mu_);
    auto key = std::pair{v, phi};
    if (auto it = columns_.find(key); it != columns_.end()) return it->second;
    std::vector<double> col;
    auto& table = table_for(v);
    if (auto* exact = std::get_if<ExactTable>(&table)) {
      for (const auto& q : (*exact)->column(phi)) col.push_back(q.convert_to<double>());
    } else {
      for (auto q : std::get<FloatTable>(table)->column(phi)) col.push_back(static_cast<double>(q));
    }
    return columns_.emplace(key, std::move(col)).first->second;
  }

  double posterior(std::int64_t v, std::int64_t phi) {
    if (v < 1 || v > priors_.ged_table.n_max) {
      throw DataError("extended size " + std::to_string(v) + " exceeds prior table n_max " +
                      std::to_string(priors_.ged_table.n_max));
    }
    if (phi < 0 || phi > 3 * tau_hat_) return 0;
    const auto col = lambda1_column(v, phi);
    std::vector<double> ged(col.size());
    for (std::int64_t t = 0; t <= tau_hat_; ++t) ged[t] = priors_.ged_table.at(t, v);
    return posterior_sum(col, ged, gbd_prior_prob(priors_.gmm, static_cast<double>(phi)));
  }

 private:
  using ExactTable = std::unique_ptr<detail::LikelihoodTable<detail::ExactKernel>>;
  using FloatTable = std::unique_ptr<detail::LikelihoodTable<detail::LogSpaceKernel>>;
  using Table = std::variant<ExactTable, FloatTable>;

  Table& table_for(std::int64_t v) {
    auto it = tables_.find(v);
    if (it == tables_.end()) {
      const auto p = ModelParams::of(v, priors_.alphabet);
      Table t = p.exact() ? Table(std::make_unique<detail::LikelihoodTable<detail::ExactKernel>>(p, tau_hat_))
                          : Table(std::make_unique<detail::LikelihoodTable<detail::LogSpaceKernel>>(p, tau_hat_));
      it = tables_.emplace(v, std::move(t)).first;
    }
    return it->second;
  }

  const PriorStore& priors_;
  std::int64_t tau_hat_;
  std::mutex mu_;
  std::map<std::int64_t, Table> tables_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<double>> columns_;
};

inline bool result_order(const QueryResult& a, const QueryResult& b) {
  if (a.phi != b.phi) return a.phi > b.phi;
  return a.graph_id < b.graph_id;
}

/// Online stage. One result per corpus graph, ordered by
/// descending posterior then id. `corpus` supplies vertex counts for v1 and
/// must be parallel to `indexes` when non-empty.
inline std::vector<QueryResult> search(const BranchIndex& query, std::span<const BranchIndex> indexes,
                                       const SearchConfig& cfg, PosteriorEngine& engine,
                                       std::span<const Graph> corpus = {}) {
  cfg.validate();
  std::int64_t v_fixed = 0;
  if (cfg.variant == Variant::v1) {
    if (corpus.empty()) throw std::invalid_argument("search: variant v1 needs the corpus graphs");
    v_fixed = v1_effective_v(corpus, cfg.alpha, cfg.seed);
  }

  std::vector<QueryResult> out(indexes.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < indexes.size(); i = next++) {
      const auto& g = indexes[i];
      QueryResult r{g.graph_id, model_distance(query, g, cfg), 0, false, {}};
      try {
        const auto v = v_fixed ? v_fixed : static_cast<std::int64_t>(extended_vertex_count(query, g));
        r.phi = engine.posterior(v, r.gbd);
        r.accepted = accept(r.phi, cfg.gamma);
      } catch (const std::exception& ex) {
        r.phi = 0;
        r.accepted = false;
        r.error = ex.what();
      }
      out[i] = std::move(r);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(indexes.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::sort(out.begin(), out.end(), result_order);
  return out;
}

inline std::vector<QueryResult> search(const Graph& query, std::span<const Graph> corpus,
                                       std::span<const BranchIndex> indexes, const SearchConfig& cfg,
                                       const PriorStore& priors) {
  PosteriorEngine engine(priors, cfg.tau_hat);
  return search(compute_branches(query), indexes, cfg, engine, corpus);
}

inline nlohmann::json result_to_json(const QueryResult& r) {
  nlohmann::json j{{"id", r.graph_id}, {"gbd", r.gbd}, {"phi", r.phi}, {"accepted", r.accepted}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace gbda
