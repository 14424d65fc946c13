#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gbda/branch.hpp"
#include "gbda/exact_ged.hpp"
#include "gbda/graph.hpp"

namespace gbda {

/// Square cost matrix in row-major order.
struct CostMatrix {
  std::size_t n = 0;
  std::vector<std::int64_t> cells;

  std::int64_t& at(std::size_t r, std::size_t c) { return cells[r * n + c]; }
  std::int64_t at(std::size_t r, std::size_t c) const { return cells[r * n + c]; }
};

inline constexpr std::int64_t kForbidden = std::numeric_limits<std::int64_t>::max() / 4;

/// Minimum-cost perfect assignment (Hungarian method with potentials,
/// O(n^3)). Returns the column assigned to each row.
inline std::vector<std::size_t> hungarian(const CostMatrix& m) {
  const std::size_t n = m.n;
  if (n == 0) return {};
  // 1-based potentials; column 0 is the virtual start.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, std::numeric_limits<std::int64_t>::max());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::int64_t delta = std::numeric_limits<std::int64_t>::max();
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = m.at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

namespace detail {

/// max(|a|, |b|) - |a ∩ b| for sorted label multisets.
inline std::int64_t multiset_mismatch(const std::vector<Label>& a, const std::vector<Label>& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common, ++i, ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<std::int64_t>(std::max(a.size(), b.size()) - common);
}

}  // namespace detail

/// Branch cost matrix with every entry doubled so it stays integral:
///   substitution u -> w: 2·[L(u) != L(w)] + mismatch(N(u), N(w))
///   deletion of u:       2 + deg(u)   (diagonal of the upper-right block)
///   insertion of w:      2 + deg(w)   (diagonal of the lower-left block)
/// Each edge edit is shared by its two endpoints, hence the half weight of
/// the neighbourhood term before doubling.
inline CostMatrix branch_cost_matrix(const Graph& g1, const Graph& g2) {
  const std::size_t n1 = g1.vertex_count(), n2 = g2.vertex_count();
  std::vector<Branch> b1, b2;
  for (VertexId u = 0; u < n1; ++u) b1.push_back(branch_of(g1, u));
  for (VertexId w = 0; w < n2; ++w) b2.push_back(branch_of(g2, w));
  CostMatrix m{n1 + n2, std::vector<std::int64_t>((n1 + n2) * (n1 + n2), 0)};
  for (std::size_t u = 0; u < n1; ++u) {
    for (std::size_t w = 0; w < n2; ++w) {
      m.at(u, w) = 2 * (b1[u].root_label != b2[w].root_label) +
                   detail::multiset_mismatch(b1[u].edge_labels, b2[w].edge_labels);
    }
    for (std::size_t k = 0; k < n1; ++k) {
      m.at(u, n2 + k) = k == u ? 2 + static_cast<std::int64_t>(b1[u].edge_labels.size()) : kForbidden;
    }
  }
  for (std::size_t w = 0; w < n2; ++w) {
    for (std::size_t k = 0; k < n2; ++k) {
      m.at(n1 + w, k) = k == w ? 2 + static_cast<std::int64_t>(b2[w].edge_labels.size()) : kForbidden;
    }
  }
  return m;
}

/// ceil(optimal assignment cost / 2) over the doubled branch matrix; never
/// exceeds the GED.
inline std::int64_t lsap_lower_bound(const Graph& g1, const Graph& g2) {
  const auto m = branch_cost_matrix(g1, g2);
  const auto assignment = hungarian(m);
  std::int64_t total = 0;
  for (std::size_t r = 0; r < m.n; ++r) total += m.at(r, assignment[r]);
  return (total + 1) / 2;
}

/// Vertex mapping chosen greedily row by row: each g1 vertex takes the
/// cheapest unused g2 vertex, or deletion when that is strictly cheaper.
/// Ties go to the lowest column.
inline std::vector<std::int32_t> greedy_assignment(const Graph& g1, const Graph& g2) {
  const std::size_t n1 = g1.vertex_count(), n2 = g2.vertex_count();
  const auto m = branch_cost_matrix(g1, g2);
  std::vector<char> taken(n2, 0);
  std::vector<std::int32_t> mapping(n1, kDeleted);
  for (std::size_t u = 0; u < n1; ++u) {
    std::int64_t best = kForbidden;
    for (std::size_t w = 0; w < n2; ++w) {
      if (!taken[w] && m.at(u, w) < best) {
        best = m.at(u, w);
        mapping[u] = static_cast<std::int32_t>(w);
      }
    }
    if (best > m.at(u, n2 + u)) mapping[u] = kDeleted;
    if (mapping[u] != kDeleted) taken[mapping[u]] = 1;
  }
  return mapping;
}

/// Greedy GED estimate: the cost of the edit path induced by the greedy
/// assignment. It is an upper bound on the GED.
inline std::int64_t greedy_assignment_estimate(const Graph& g1, const Graph& g2) {
  return edit_path_cost(g1, g2, greedy_assignment(g1, g2));
}

}  // namespace gbda
