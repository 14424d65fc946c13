#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gbda/error.hpp"

namespace gbda {

using VertexId = std::uint32_t;
using Label = std::string;

/// Reserved label of virtual vertices and edges. Graphs read from corpus files
/// may not use it.
inline const Label kVirtualLabel = std::string("\0EPS", 4);

inline bool is_virtual(std::string_view label) { return label == kVirtualLabel; }

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  Label label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Simple labeled undirected graph. Instances are validated on construction
/// and immutable afterwards.
class Graph {
 public:
  Graph() = default;

  /// Throws DataError on self-loops, duplicate pairs, out-of-range endpoints,
  /// or virtual labels (unless `extended` is set).
  Graph(std::string id, std::vector<Label> vertex_labels, std::vector<Edge> edges,
        bool extended = false)
      : id_(std::move(id)),
        vertex_labels_(std::move(vertex_labels)),
        edges_(std::move(edges)),
        extended_(extended) {
    validate();
    build_adjacency();
  }

  const std::string& id() const { return id_; }
  std::size_t vertex_count() const { return vertex_labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Label>& vertex_labels() const { return vertex_labels_; }
  const Label& vertex_label(VertexId v) const { return vertex_labels_[v]; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool extended() const { return extended_; }

  /// Incident (neighbor, edge index) pairs of `v`.
  std::span<const std::pair<VertexId, std::size_t>> incident(VertexId v) const {
    return adjacency_[v];
  }
  std::size_t degree(VertexId v) const { return adjacency_[v].size(); }

  /// Index of the edge joining `a` and `b`, or npos.
  std::size_t find_edge(VertexId a, VertexId b) const {
    for (const auto& [n, e] : adjacency_[a]) {
      if (n == b) return e;
    }
    return npos;
  }
  bool adjacent(VertexId a, VertexId b) const { return find_edge(a, b) != npos; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.id_ == b.id_ && a.vertex_labels_ == b.vertex_labels_ && a.edges_ == b.edges_ &&
           a.extended_ == b.extended_;
  }

 private:
  void validate() const {
    const auto n = vertex_labels_.size();
    if (!extended_) {
      for (const auto& l : vertex_labels_) {
        if (is_virtual(l)) throw DataError("graph '" + id_ + "': vertex uses the virtual label");
      }
    }
    std::set<std::pair<VertexId, VertexId>> seen;
    for (const auto& e : edges_) {
      if (e.u >= n || e.v >= n) {
        throw DataError("graph '" + id_ + "': edge endpoint out of range");
      }
      if (e.u == e.v) throw DataError("graph '" + id_ + "': self-loop on vertex " + std::to_string(e.u));
      if (!extended_ && is_virtual(e.label)) {
        throw DataError("graph '" + id_ + "': edge uses the virtual label");
      }
      if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second) {
        throw DataError("graph '" + id_ + "': duplicate edge (" + std::to_string(e.u) + "," +
                        std::to_string(e.v) + ")");
      }
    }
  }

  void build_adjacency() {
    adjacency_.assign(vertex_labels_.size(), {});
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      adjacency_[edges_[i].u].emplace_back(edges_[i].v, i);
      adjacency_[edges_[i].v].emplace_back(edges_[i].u, i);
    }
  }

  std::string id_;
  std::vector<Label> vertex_labels_;
  std::vector<Edge> edges_;
  bool extended_ = false;
  std::vector<std::vector<std::pair<VertexId, std::size_t>>> adjacency_;
};

/// The label sets L_V and L_E of a corpus.
struct LabelAlphabet {
  std::set<Label> vertex_labels;
  std::set<Label> edge_labels;

  void add(const Graph& g) {
    for (const auto& l : g.vertex_labels()) {
      if (!is_virtual(l)) vertex_labels.insert(l);
    }
    for (const auto& e : g.edges()) {
      if (!is_virtual(e.label)) edge_labels.insert(e.label);
    }
  }

  static LabelAlphabet of(std::span<const Graph> corpus) {
    LabelAlphabet a;
    for (const auto& g : corpus) a.add(g);
    return a;
  }

  friend bool operator==(const LabelAlphabet&, const LabelAlphabet&) = default;
};

// ---------------------------------------------------------------------------
// JSON Lines corpus format:
//   {"id": "g1", "vertices": ["A", "B"], "edges": [[0, 1, "x"]]}

inline Graph graph_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw DataError("graph record is not a JSON object");
    auto id = j.at("id").get<std::string>();
    auto vertices = j.at("vertices").get<std::vector<std::string>>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw DataError("graph '" + id + "': edge must be [u, v, label]");
      const auto u = e[0].get<std::int64_t>();
      const auto v = e[1].get<std::int64_t>();
      if (u < 0 || v < 0) throw DataError("graph '" + id + "': negative vertex index");
      edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), e[2].get<std::string>()});
    }
    return Graph(std::move(id), std::move(vertices), std::move(edges));
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed graph record: ") + ex.what());
  }
}

inline nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v, e.label});
  return {{"id", g.id()}, {"vertices", g.vertex_labels()}, {"edges", std::move(edges)}};
}

inline Graph parse_graph_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& ex) {
    throw DataError(std::string("invalid JSON: ") + ex.what());
  }
  return graph_from_json(j);
}

inline std::vector<Graph> read_corpus(std::istream& in) {
  std::vector<Graph> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_graph_line(line));
    } catch (const DataError& ex) {
      throw DataError("line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

inline std::vector<Graph> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path + "'");
  try {
    return read_corpus(in);
  } catch (const DataError& ex) {
    throw DataError(path + ": " + ex.what());
  }
}

inline void write_corpus(std::ostream& out, std::span<const Graph> graphs) {
  for (const auto& g : graphs) out << graph_to_json(g).dump() << '\n';
}

/// Splits "path#id" into its parts. The id is everything after the last '#'.
inline std::pair<std::string, std::string> split_graph_ref(const std::string& ref) {
  const auto pos = ref.rfind('#');
  if (pos == std::string::npos || pos == 0 || pos + 1 == ref.size()) {
    throw DataError("graph reference '" + ref + "' is not of the form PATH#ID");
  }
  return {ref.substr(0, pos), ref.substr(pos + 1)};
}

inline const Graph& find_graph(std::span<const Graph> corpus, const std::string& id) {
  auto it = std::find_if(corpus.begin(), corpus.end(), [&](const Graph& g) { return g.id() == id; });
  if (it == corpus.end()) throw DataError("no graph with id '" + id + "'");
  return *it;
}

inline Graph load_graph_ref(const std::string& ref) {
  auto [path, id] = split_graph_ref(ref);
  auto corpus = read_corpus(path);
  return find_graph(corpus, id);
}

}  // namespace gbda
