#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "gbda/graph.hpp"

namespace gbda {

/// A vertex label together with the sorted multiset of its incident edge
/// labels. Ordering is lexicographic by byte value: root label first, then the
/// edge-label sequence.
struct Branch {
  Label root_label;
  std::vector<Label> edge_labels;

  friend auto operator<=>(const Branch&, const Branch&) = default;
  friend bool operator==(const Branch&, const Branch&) = default;
};

/// Branch isomorphism: equal root labels and equal edge-label multisets.
/// Both branches are expected to hold sorted edge labels, which Branch values
/// produced by compute_branches always do.
inline bool branch_isomorphic(const Branch& a, const Branch& b) {
  return a.edge_labels.size() == b.edge_labels.size() && a.root_label == b.root_label &&
         a.edge_labels == b.edge_labels;
}

/// The sorted branch multiset of one graph: its stored signature.
struct BranchIndex {
  std::string graph_id;
  std::size_t vertex_count = 0;
  std::vector<Branch> branches;

  friend bool operator==(const BranchIndex&, const BranchIndex&) = default;
};

inline Branch branch_of(const Graph& g, VertexId v) {
  Branch b{g.vertex_label(v), {}};
  b.edge_labels.reserve(g.degree(v));
  for (const auto& [n, e] : g.incident(v)) b.edge_labels.push_back(g.edges()[e].label);
  std::sort(b.edge_labels.begin(), b.edge_labels.end());
  return b;
}

inline BranchIndex compute_branches(const Graph& g) {
  BranchIndex idx{g.id(), g.vertex_count(), {}};
  idx.branches.reserve(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) idx.branches.push_back(branch_of(g, v));
  std::sort(idx.branches.begin(), idx.branches.end());
  return idx;
}

/// |B_a ∩ B_b| as multisets, by one merge walk over the sorted lists.
inline std::size_t branch_intersection_size(const BranchIndex& a, const BranchIndex& b) {
  std::size_t i = 0, j = 0, common = 0;
  const auto& x = a.branches;
  const auto& y = b.branches;
  while (i < x.size() && j < y.size()) {
    const auto c = x[i] <=> y[j];
    if (c == 0) {
      ++common, ++i, ++j;
    } else if (c < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return common;
}

/// Graph branch distance: max(|V_a|, |V_b|) - |B_a ∩ B_b|.
inline std::size_t gbd(const BranchIndex& a, const BranchIndex& b) {
  return std::max(a.vertex_count, b.vertex_count) - branch_intersection_size(a, b);
}

/// Weighted branch distance max(|V_a|, |V_b|) - w·|B_a ∩ B_b|.
inline double vgbd(const BranchIndex& a, const BranchIndex& b, double w) {
  return static_cast<double>(std::max(a.vertex_count, b.vertex_count)) -
         w * static_cast<double>(branch_intersection_size(a, b));
}

/// |V_1'| = |V_2'| for the pair's extended graphs. Nothing is materialized.
inline std::size_t extended_vertex_count(const Graph& g1, const Graph& g2) {
  return std::max(g1.vertex_count(), g2.vertex_count());
}
inline std::size_t extended_vertex_count(const BranchIndex& a, const BranchIndex& b) {
  return std::max(a.vertex_count, b.vertex_count);
}

/// Builds G^{k}: `k` virtual vertices are appended and every non-adjacent pair
/// is joined by a virtual edge, so the result is complete. Test support only.
inline Graph materialize_extended(const Graph& g, std::size_t k) {
  auto labels = g.vertex_labels();
  labels.insert(labels.end(), k, kVirtualLabel);
  const auto n = static_cast<VertexId>(labels.size());
  auto edges = g.edges();
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) {
      if (a < g.vertex_count() && b < g.vertex_count() && g.adjacent(a, b)) continue;
      edges.push_back({a, b, kVirtualLabel});
    }
  }
  return Graph(g.id(), std::move(labels), std::move(edges), /*extended=*/true);
}

// Index files are JSON Lines: {"id": ..., "vertex_count": n, "branches": [[root, e1, ...], ...]}.
// Loading re-sorts, so files written under another label order remain usable.

inline nlohmann::json index_to_json(const BranchIndex& idx) {
  nlohmann::json branches = nlohmann::json::array();
  for (const auto& b : idx.branches) {
    nlohmann::json row = nlohmann::json::array({b.root_label});
    for (const auto& l : b.edge_labels) row.push_back(l);
    branches.push_back(std::move(row));
  }
  return {{"id", idx.graph_id}, {"vertex_count", idx.vertex_count}, {"branches", std::move(branches)}};
}

inline BranchIndex index_from_json(const nlohmann::json& j) {
  try {
    BranchIndex idx{j.at("id").get<std::string>(), j.at("vertex_count").get<std::size_t>(), {}};
    for (const auto& row : j.at("branches")) {
      auto labels = row.get<std::vector<std::string>>();
      if (labels.empty()) throw DataError("index '" + idx.graph_id + "': empty branch");
      Branch b{labels.front(), {labels.begin() + 1, labels.end()}};
      std::sort(b.edge_labels.begin(), b.edge_labels.end());
      idx.branches.push_back(std::move(b));
    }
    if (idx.branches.size() != idx.vertex_count) {
      throw DataError("index '" + idx.graph_id + "': branch count differs from vertex_count");
    }
    std::sort(idx.branches.begin(), idx.branches.end());
    return idx;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed index record: ") + ex.what());
  }
}

}  // namespace gbda
