#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gbda;

TEST(Branch, ReferencePairBranchDistanceIsThree) {
  const auto a = compute_branches(gbda::testing::pair_g1());
  const auto b = compute_branches(gbda::testing::pair_g2());
  EXPECT_EQ(branch_intersection_size(a, b), 1u);
  EXPECT_EQ(gbd(a, b), 3u);
  EXPECT_EQ(extended_vertex_count(a, b), 4u);
}

TEST(Branch, BranchesAreSortedAndIsomorphismIgnoresEdgeOrder) {
  const Graph g("g", {"A", "A"}, {{0, 1, "z"}});
  const Graph h("h", {"A", "B", "C"}, {{0, 2, "b"}, {0, 1, "a"}});
  const auto idx = compute_branches(h);
  EXPECT_TRUE(std::is_sorted(idx.branches.begin(), idx.branches.end()));
  const Branch x{"A", {"a", "b"}};
  EXPECT_TRUE(branch_isomorphic(idx.branches.front(), x));
  EXPECT_EQ(gbd(compute_branches(g), compute_branches(g)), 0u);
}

// Brute-force multiset intersection: greedy matching of isomorphic branches.
static std::size_t naive_intersection(const Graph& g1, const Graph& g2) {
  std::vector<Branch> rest;
  for (VertexId v = 0; v < g2.vertex_count(); ++v) rest.push_back(branch_of(g2, v));
  std::size_t common = 0;
  for (VertexId u = 0; u < g1.vertex_count(); ++u) {
    const auto b = branch_of(g1, u);
    auto it = std::find_if(rest.begin(), rest.end(), [&](const Branch& c) { return branch_isomorphic(b, c); });
    if (it != rest.end()) ++common, rest.erase(it);
  }
  return common;
}

TEST(Branch, PropertiesOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto g1 = gbda::testing::random_graph(rng, 1, 9, 3, 2);
    const auto g2 = gbda::testing::random_graph(rng, 1, 9, 3, 2);
    const auto a = compute_branches(g1), b = compute_branches(g2);
    EXPECT_EQ(branch_intersection_size(a, b), naive_intersection(g1, g2));
    EXPECT_EQ(gbd(a, b), gbd(b, a));
    EXPECT_EQ(gbd(a, a), 0u);
    EXPECT_GE(gbd(a, b), std::max(a.vertex_count, b.vertex_count) - std::min(a.vertex_count, b.vertex_count));
    EXPECT_DOUBLE_EQ(vgbd(a, b, 1.0), static_cast<double>(gbd(a, b)));
  }
}

TEST(Branch, ExtensionPreservesDistance) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto g1 = gbda::testing::random_graph(rng, 1, 7, 3, 3);
    const auto g2 = gbda::testing::random_graph(rng, 1, 7, 3, 3);
    const auto n = extended_vertex_count(g1, g2);
    const auto e1 = materialize_extended(g1, n - g1.vertex_count());
    const auto e2 = materialize_extended(g2, n - g2.vertex_count());
    EXPECT_EQ(e1.edge_count(), n * (n - 1) / 2);
    EXPECT_EQ(gbd(compute_branches(e1), compute_branches(e2)), gbd(compute_branches(g1), compute_branches(g2)));
  }
}

TEST(Branch, IndexJsonRoundTrip) {
  const auto idx = compute_branches(gbda::testing::pair_g2());
  EXPECT_EQ(index_from_json(index_to_json(idx)), idx);
  auto j = index_to_json(idx);
  j["vertex_count"] = 7;
  EXPECT_THROW(index_from_json(j), DataError);
}
