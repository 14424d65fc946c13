#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gbda/error.hpp"
#include "gbda/graph.hpp"

namespace gbda {

enum class GraphKind { random, scale_free };

struct GenSpec {
  std::size_t n_vertices = 8;
  /// Minimum center degree, and the largest number of modified edges.
  std::size_t target_degree = 4;
  GraphKind kind = GraphKind::random;
  std::size_t vertex_labels = 4;
  std::size_t edge_labels = 3;
  /// Edges each new vertex attaches with while the template grows.
  std::size_t edges_per_vertex = 2;
  std::uint64_t seed = 0;
  std::string id_prefix = "g";

  void validate() const {
    if (n_vertices < target_degree + 1) throw std::invalid_argument("GenSpec: n_vertices must be >= d + 1");
    if (vertex_labels < 2 || edge_labels < 2) throw std::invalid_argument("GenSpec: alphabets need >= 2 labels");
    if (edges_per_vertex < 1) throw std::invalid_argument("GenSpec: edges_per_vertex must be >= 1");
  }
};

inline constexpr int kTemplateRetries = 50;
inline constexpr std::size_t kSignatureHops = 2;

struct LabeledPair {
  Graph base;
  Graph variant;
  std::int64_t true_ged = 0;
};

/// {s0, s1, ..., s_hops} of a neighbor: s0 is its label, s_k the sorted
/// multiset of (vertex label, edge label) over BFS layer k, one entry per edge
/// reaching the layer from the one before.
struct NeighborSignature {
  Label root;
  std::vector<std::vector<std::pair<Label, Label>>> layers;

  friend auto operator<=>(const NeighborSignature&, const NeighborSignature&) = default;
  friend bool operator==(const NeighborSignature&, const NeighborSignature&) = default;
};

namespace detail {

/// BFS signature of `v`; edges listed in `skip` (by index) are ignored.
inline NeighborSignature signature_bfs(const Graph& g, VertexId v, std::size_t hops,
                                       const std::vector<char>& skip) {
  NeighborSignature sig{g.vertex_label(v), {}};
  std::vector<std::size_t> dist(g.vertex_count(), static_cast<std::size_t>(-1));
  std::vector<VertexId> frontier{v};
  dist[v] = 0;
  for (std::size_t k = 1; k <= hops && !frontier.empty(); ++k) {
    std::vector<std::pair<Label, Label>> layer;
    std::vector<VertexId> next;
    for (VertexId a : frontier) {
      for (const auto& [b, e] : g.incident(a)) {
        if (!skip.empty() && skip[e]) continue;
        if (dist[b] == static_cast<std::size_t>(-1)) {
          dist[b] = k;
          next.push_back(b);
        }
        if (dist[b] == k) layer.emplace_back(g.vertex_label(b), g.edges()[e].label);
      }
    }
    std::sort(layer.begin(), layer.end());
    sig.layers.push_back(std::move(layer));
    frontier = std::move(next);
  }
  return sig;
}

inline bool connected(const Graph& g) {
  if (g.vertex_count() == 0) return true;
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const VertexId a = stack.back();
    stack.pop_back();
    for (const auto& [b, e] : g.incident(a)) {
      if (!seen[b]) seen[b] = 1, ++count, stack.push_back(b);
    }
  }
  return count == g.vertex_count();
}

inline Label vertex_label_name(std::size_t i) { return "v" + std::to_string(i); }
inline Label edge_label_name(std::size_t i) { return "e" + std::to_string(i); }

}  // namespace detail

/// Signature of `v_i`, a neighbor of `center`, in the unmodified graph.
inline NeighborSignature neighbor_signature(const Graph& g, VertexId center, VertexId v_i,
                                            std::size_t hops = kSignatureHops) {
  if (!g.adjacent(center, v_i)) throw std::invalid_argument("neighbor_signature: vertex is not adjacent to center");
  return detail::signature_bfs(g, v_i, hops, {});
}

/// A vertex of degree >= min_degree whose neighbors have pairwise distinct
/// signatures, both with the center's edges in place and with them removed.
/// The second test rules out neighbors told apart only by their edge to the
/// center, which a pair of relabels could swap back. Highest degree first.
inline std::optional<VertexId> find_modification_center(const Graph& g, std::size_t min_degree,
                                                        std::size_t hops = kSignatureHops) {
  std::vector<VertexId> order(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return g.degree(a) > g.degree(b); });
  for (VertexId c : order) {
    if (g.degree(c) < min_degree) break;
    std::vector<char> skip(g.edge_count(), 0);
    for (const auto& [n, e] : g.incident(c)) skip[e] = 1;
    std::set<NeighborSignature> intact, detached;
    bool ok = true;
    for (const auto& [n, e] : g.incident(c)) {
      if (!intact.insert(neighbor_signature(g, c, n, hops)).second ||
          !detached.insert(detail::signature_bfs(g, n, hops, skip)).second) {
        ok = false;
        break;
      }
    }
    if (ok) return c;
  }
  return std::nullopt;
}

/// Connected template: each vertex i > 0 joins min(edges_per_vertex, i)
/// distinct earlier vertices, chosen uniformly (random) or in proportion to
/// their degree (scale_free).
inline Graph generate_template(const GenSpec& spec, std::mt19937_64& rng, const std::string& id) {
  spec.validate();
  const std::size_t n = spec.n_vertices;
  std::uniform_int_distribution<std::size_t> vlabel(0, spec.vertex_labels - 1), elabel(0, spec.edge_labels - 1);
  std::vector<Label> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(detail::vertex_label_name(vlabel(rng)));
  std::vector<Edge> edges;
  std::vector<VertexId> endpoints;  // each vertex once per incident edge
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t want = std::min(spec.edges_per_vertex, i);
    std::vector<VertexId> chosen;
    while (chosen.size() < want) {
      VertexId j;
      if (spec.kind == GraphKind::scale_free && !endpoints.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
        j = endpoints[pick(rng)];
        // Preferential draws can stall on a saturated neighbourhood; fall back to uniform.
        if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) {
          std::uniform_int_distribution<std::size_t> uni(0, i - 1);
          j = static_cast<VertexId>(uni(rng));
        }
      } else {
        std::uniform_int_distribution<std::size_t> uni(0, i - 1);
        j = static_cast<VertexId>(uni(rng));
      }
      if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) chosen.push_back(j);
    }
    for (VertexId j : chosen) {
      edges.push_back({j, static_cast<VertexId>(i), detail::edge_label_name(elabel(rng))});
      endpoints.push_back(j);
      endpoints.push_back(static_cast<VertexId>(i));
    }
  }
  return Graph(id, std::move(labels), std::move(edges));
}

/// Count of center-incident edges that differ between two graphs on the same
/// vertex set: deleted, inserted, or relabelled.
inline std::int64_t center_edge_difference(const Graph& a, const Graph& b, VertexId center) {
  std::int64_t diff = 0;
  for (VertexId n = 0; n < a.vertex_count(); ++n) {
    if (n == center) continue;
    const auto ea = a.find_edge(center, n), eb = b.find_edge(center, n);
    if ((ea == Graph::npos) != (eb == Graph::npos)) {
      ++diff;
    } else if (ea != Graph::npos && a.edges()[ea].label != b.edges()[eb].label) {
      ++diff;
    }
  }
  return diff;
}

/// One template and its variants for k = 0..d modified center edges. Each
/// modification deletes the edge or relabels it to a different label;
/// deletions that would disconnect the graph become relabels.
inline std::vector<LabeledPair> generate_pairs(const GenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const std::string base_id = spec.id_prefix + "b";
  for (int attempt = 0; attempt < kTemplateRetries; ++attempt) {
    Graph base = generate_template(spec, rng, base_id);
    const auto center = find_modification_center(base, spec.target_degree);
    if (!center) continue;

    std::vector<std::size_t> incident;
    for (const auto& [n, e] : base.incident(*center)) incident.push_back(e);
    std::shuffle(incident.begin(), incident.end(), rng);
    incident.resize(spec.target_degree);
    std::vector<bool> delete_edge(spec.target_degree);
    std::vector<std::size_t> new_label(spec.target_degree);
    for (std::size_t i = 0; i < spec.target_degree; ++i) {
      delete_edge[i] = std::bernoulli_distribution(0.5)(rng);
      new_label[i] = std::uniform_int_distribution<std::size_t>(0, spec.edge_labels - 2)(rng);
    }

    std::vector<LabeledPair> out;
    for (std::size_t k = 0; k <= spec.target_degree; ++k) {
      auto edges = base.edges();
      std::vector<char> drop(edges.size(), 0);
      for (std::size_t i = 0; i < k; ++i) {
        auto& e = edges[incident[i]];
        if (delete_edge[i]) {
          drop[incident[i]] = 1;
          std::vector<Edge> trial;
          for (std::size_t j = 0; j < edges.size(); ++j) {
            if (!drop[j]) trial.push_back(edges[j]);
          }
          if (detail::connected(Graph("", base.vertex_labels(), trial))) continue;
          drop[incident[i]] = 0;
        }
        // Relabel to the new_label[i]-th label other than the current one.
        std::vector<Label> others;
        for (std::size_t l = 0; l < spec.edge_labels; ++l) {
          if (detail::edge_label_name(l) != e.label) others.push_back(detail::edge_label_name(l));
        }
        e.label = others[new_label[i]];
      }
      std::vector<Edge> kept;
      for (std::size_t j = 0; j < edges.size(); ++j) {
        if (!drop[j]) kept.push_back(edges[j]);
      }
      Graph variant(spec.id_prefix + "k" + std::to_string(k), base.vertex_labels(), std::move(kept));
      const auto ged = center_edge_difference(base, variant, *center);
      if (ged != static_cast<std::int64_t>(k)) throw std::logic_error("generate_pairs: modification count mismatch");
      out.push_back({base, std::move(variant), ged});
    }
    return out;
  }
  throw DataError("generate_pairs: no modification center after " + std::to_string(kTemplateRetries) + " templates");
}

struct TruthRecord {
  std::string base_id;
  std::string variant_id;
  std::int64_t ged = 0;

  friend bool operator==(const TruthRecord&, const TruthRecord&) = default;
};

struct GeneratedCorpus {
  std::vector<Graph> graphs;
  std::vector<TruthRecord> truth;
};

/// `templates` independent templates, each contributing its base graph and
/// the variants k = 1..d. Template t uses seed (spec.seed, t) and id prefix
/// "<prefix><t>_".
inline GeneratedCorpus generate_corpus(const GenSpec& spec, std::size_t templates) {
  GeneratedCorpus out;
  for (std::size_t t = 0; t < templates; ++t) {
    GenSpec s = spec;
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(t)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    s.seed = (std::uint64_t{words[0]} << 32) | words[1];
    s.id_prefix = spec.id_prefix + std::to_string(t) + "_";
    auto pairs = generate_pairs(s);
    out.graphs.push_back(pairs.front().base);
    for (std::size_t k = 1; k < pairs.size(); ++k) {
      out.truth.push_back({pairs[k].base.id(), pairs[k].variant.id(), pairs[k].true_ged});
      out.graphs.push_back(std::move(pairs[k].variant));
    }
  }
  return out;
}

inline void write_truth(std::ostream& out, const std::vector<TruthRecord>& truth) {
  for (const auto& t : truth) {
    out << nlohmann::json{{"base_id", t.base_id}, {"variant_id", t.variant_id}, {"ged", t.ged}}.dump() << '\n';
  }
}

inline std::vector<TruthRecord> read_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open truth file '" + path + "'");
  std::vector<TruthRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("base_id").get<std::string>(), j.at("variant_id").get<std::string>(),
                     j.at("ged").get<std::int64_t>()});
    } catch (const nlohmann::json::exception& ex) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace gbda
