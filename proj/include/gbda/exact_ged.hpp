#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

#include "gbda/graph.hpp"

namespace gbda {

/// Marks a vertex of the first graph that is deleted rather than mapped.
inline constexpr std::int32_t kDeleted = -1;

namespace detail {

/// Both graphs with labels replaced by shared integer ids and a dense
/// adjacency matrix of edge-label ids (-1 for no edge).
struct LabelledPair {
  std::size_t n1 = 0, n2 = 0;
  std::vector<int> vl1, vl2;
  std::vector<int> adj1, adj2;
  std::vector<std::pair<VertexId, VertexId>> edges1, edges2;
  std::vector<int> el1, el2;
  int vertex_label_count = 0, edge_label_count = 0;

  LabelledPair(const Graph& g1, const Graph& g2) : n1(g1.vertex_count()), n2(g2.vertex_count()) {
    std::map<Label, int> vid, eid;
    auto vlabel = [&](const Label& l) { return vid.emplace(l, static_cast<int>(vid.size())).first->second; };
    auto elabel = [&](const Label& l) { return eid.emplace(l, static_cast<int>(eid.size())).first->second; };
    for (const auto& l : g1.vertex_labels()) vl1.push_back(vlabel(l));
    for (const auto& l : g2.vertex_labels()) vl2.push_back(vlabel(l));
    adj1.assign(n1 * n1, -1);
    adj2.assign(n2 * n2, -1);
    for (const auto& e : g1.edges()) {
      const int l = elabel(e.label);
      adj1[e.u * n1 + e.v] = adj1[e.v * n1 + e.u] = l;
      edges1.emplace_back(e.u, e.v);
      el1.push_back(l);
    }
    for (const auto& e : g2.edges()) {
      const int l = elabel(e.label);
      adj2[e.u * n2 + e.v] = adj2[e.v * n2 + e.u] = l;
      edges2.emplace_back(e.u, e.v);
      el2.push_back(l);
    }
    vertex_label_count = static_cast<int>(vid.size());
    edge_label_count = static_cast<int>(eid.size());
  }

  int edge1(std::size_t a, std::size_t b) const { return adj1[a * n1 + b]; }
  int edge2(std::int32_t a, std::int32_t b) const {
    if (a == kDeleted || b == kDeleted) return -1;
    return adj2[static_cast<std::size_t>(a) * n2 + static_cast<std::size_t>(b)];
  }
};

inline int edge_cost(int a, int b) { return a == b ? 0 : 1; }

}  // namespace detail

/// Unit cost of the edit path induced by a vertex mapping g1 -> g2 (entries
/// kDeleted for deleted vertices); g2 vertices not hit are inserted.
inline std::int64_t edit_path_cost(const Graph& g1, const Graph& g2, const std::vector<std::int32_t>& mapping) {
  const detail::LabelledPair lp(g1, g2);
  if (mapping.size() != lp.n1) throw std::invalid_argument("edit_path_cost: mapping size mismatch");
  std::vector<char> used(lp.n2, 0);
  std::int64_t cost = 0;
  for (std::size_t u = 0; u < lp.n1; ++u) {
    const auto t = mapping[u];
    if (t == kDeleted) {
      ++cost;
      continue;
    }
    if (t < 0 || static_cast<std::size_t>(t) >= lp.n2 || used[t]) {
      throw std::invalid_argument("edit_path_cost: mapping is not injective");
    }
    used[t] = 1;
    cost += lp.vl1[u] != lp.vl2[t];
  }
  for (std::size_t w = 0; w < lp.n2; ++w) cost += !used[w];
  // Edges of g1 against their images, then g2 edges with no preimage.
  for (std::size_t a = 0; a < lp.n1; ++a) {
    for (std::size_t b = a + 1; b < lp.n1; ++b) cost += detail::edge_cost(lp.edge1(a, b), lp.edge2(mapping[a], mapping[b]));
  }
  std::vector<std::int32_t> inverse(lp.n2, kDeleted);
  for (std::size_t u = 0; u < lp.n1; ++u) {
    if (mapping[u] != kDeleted) inverse[mapping[u]] = static_cast<std::int32_t>(u);
  }
  for (const auto& [a, b] : lp.edges2) cost += inverse[a] == kDeleted || inverse[b] == kDeleted;
  return cost;
}

struct GedResult {
  enum class Status { exact, exceeded, above_cutoff };
  Status status = Status::exact;
  /// GED when exact; otherwise the best lower bound reached.
  std::int64_t value = 0;
  std::size_t expansions = 0;

  bool is_exact() const { return status == Status::exact; }
};

inline constexpr std::size_t kDefaultGedBudget = 10'000'000;

/// Exact GED by best-first search over partial vertex mappings. The heuristic
/// is the label-multiset mismatch of the unmapped vertices plus that of the
/// edges not yet settled, which never overestimates. With a cutoff, the
/// search stops as soon as GED > cutoff is certain.
inline GedResult exact_ged(const Graph& g1, const Graph& g2, std::size_t budget = kDefaultGedBudget,
                           std::int64_t cutoff = std::numeric_limits<std::int64_t>::max()) {
  const detail::LabelledPair lp(g1, g2);
  const std::size_t n1 = lp.n1, n2 = lp.n2;
  if (n2 > 64) throw std::invalid_argument("exact_ged: at most 64 vertices supported");

  // Process high-degree vertices first; their edges settle early.
  std::vector<std::size_t> order(n1);
  for (std::size_t i = 0; i < n1; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return g1.degree(a) > g1.degree(b); });
  std::vector<std::size_t> rank(n1);
  for (std::size_t k = 0; k < n1; ++k) rank[order[k]] = k;

  struct Node {
    std::int64_t g, f;
    std::uint32_t parent;
    std::uint32_t depth;
    std::int32_t target;
    std::uint64_t used;
  };
  std::vector<Node> nodes;
  nodes.reserve(1024);

  std::vector<int> count(static_cast<std::size_t>(std::max(lp.vertex_label_count, lp.edge_label_count)) + 1);
  auto heuristic = [&](std::size_t depth, std::uint64_t used) {
    std::int64_t h = 0;
    // Vertices.
    std::fill(count.begin(), count.end(), 0);
    std::int64_t r1 = 0, r2 = 0, common = 0;
    for (std::size_t k = depth; k < n1; ++k) ++count[lp.vl1[order[k]]], ++r1;
    for (std::size_t w = 0; w < n2; ++w) {
      if (used >> w & 1) continue;
      ++r2;
      if (count[lp.vl2[w]] > 0) --count[lp.vl2[w]], ++common;
    }
    h += std::max(r1, r2) - common;
    // Edges with an endpoint still unprocessed on either side.
    std::fill(count.begin(), count.end(), 0);
    r1 = r2 = common = 0;
    for (std::size_t e = 0; e < lp.edges1.size(); ++e) {
      const auto [a, b] = lp.edges1[e];
      if (rank[a] >= depth || rank[b] >= depth) ++count[lp.el1[e]], ++r1;
    }
    for (std::size_t e = 0; e < lp.edges2.size(); ++e) {
      const auto [a, b] = lp.edges2[e];
      if ((used >> a & 1) && (used >> b & 1)) continue;
      ++r2;
      if (count[lp.el2[e]] > 0) --count[lp.el2[e]], ++common;
    }
    return h + std::max(r1, r2) - common;
  };

  auto cmp = [&](std::uint32_t a, std::uint32_t b) {
    const auto& x = nodes[a];
    const auto& y = nodes[b];
    if (x.f != y.f) return x.f > y.f;
    if (x.depth != y.depth) return x.depth < y.depth;
    return a > b;
  };
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, decltype(cmp)> open(cmp);

  std::vector<std::int32_t> assigned(n1);
  auto step_cost = [&](std::size_t k, std::int32_t t) {
    const std::size_t u = order[k];
    std::int64_t g = t == kDeleted ? 1 : (lp.vl1[u] != lp.vl2[t]);
    for (std::size_t j = 0; j < k; ++j) g += detail::edge_cost(lp.edge1(u, order[j]), lp.edge2(t, assigned[j]));
    return g;
  };
  auto completion_cost = [&](std::uint64_t used) {
    std::int64_t g = 0;
    for (std::size_t w = 0; w < n2; ++w) g += !(used >> w & 1);
    for (const auto& [a, b] : lp.edges2) g += !((used >> a & 1) && (used >> b & 1));
    return g;
  };

  // Greedy dive for an initial upper bound: extend by the cheapest step.
  std::int64_t ub = 0;
  {
    std::uint64_t used = 0;
    for (std::size_t k = 0; k < n1; ++k) {
      std::int32_t best = kDeleted;
      std::int64_t best_cost = step_cost(k, kDeleted);
      for (std::size_t w = 0; w < n2; ++w) {
        if (used >> w & 1) continue;
        const auto c = step_cost(k, static_cast<std::int32_t>(w));
        if (c < best_cost) best = static_cast<std::int32_t>(w), best_cost = c;
      }
      assigned[k] = best;
      ub += best_cost;
      if (best != kDeleted) used |= std::uint64_t{1} << best;
    }
    ub += completion_cost(used);
  }

  // Children with f >= ub cannot improve on the known path; children with
  // f > cutoff are dropped but remembered as a lower bound.
  GedResult result;
  std::int64_t dropped_min = std::numeric_limits<std::int64_t>::max();
  auto push = [&](Node n) {
    if (n.f >= ub) return;
    if (n.f > cutoff) {
      dropped_min = std::min(dropped_min, n.f);
      return;
    }
    nodes.push_back(n);
    open.push(static_cast<std::uint32_t>(nodes.size() - 1));
  };
  constexpr std::uint32_t kGoal = std::numeric_limits<std::uint32_t>::max();
  push({0, heuristic(0, 0), 0, 0, kDeleted, 0});

  while (!open.empty()) {
    const std::uint32_t id = open.top();
    open.pop();
    const Node cur = nodes[id];
    if (cur.depth == kGoal) {
      result.value = cur.g;
      return result;
    }
    if (++result.expansions > budget) {
      result.status = GedResult::Status::exceeded;
      result.value = cur.f;
      return result;
    }

    // Recover the partial mapping along the parent chain.
    for (std::uint32_t walk = id; nodes[walk].depth > 0; walk = nodes[walk].parent) {
      assigned[nodes[walk].depth - 1] = nodes[walk].target;
    }
    const std::size_t k = cur.depth;
    if (k == n1) {
      const std::int64_t g = cur.g + completion_cost(cur.used);
      push({g, g, id, kGoal, kDeleted, cur.used});
      continue;
    }
    auto expand = [&](std::int32_t t) {
      const std::int64_t g = cur.g + step_cost(k, t);
      const std::uint64_t used = t == kDeleted ? cur.used : cur.used | (std::uint64_t{1} << t);
      push({g, g + heuristic(k + 1, used), id, static_cast<std::uint32_t>(k + 1), t, used});
    };
    for (std::size_t w = 0; w < n2; ++w) {
      if (!(cur.used >> w & 1)) expand(static_cast<std::int32_t>(w));
    }
    expand(kDeleted);
  }
  // Every path cheaper than the greedy one was ruled out.
  if (ub <= cutoff) {
    result.value = ub;
    return result;
  }
  result.status = GedResult::Status::above_cutoff;
  result.value = std::min(ub, dropped_min);
  return result;
}

}  // namespace gbda
