#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

using namespace gbda;
using gbda::testing::data_path;

TEST(Graph, RejectsSelfLoopsDuplicatesAndBadEndpoints) {
  EXPECT_THROW(Graph("x", {"A"}, {{0, 0, "e"}}), DataError);
  EXPECT_THROW(Graph("x", {"A", "B"}, {{0, 1, "e"}, {1, 0, "f"}}), DataError);
  EXPECT_THROW(Graph("x", {"A", "B"}, {{0, 2, "e"}}), DataError);
  EXPECT_THROW(Graph("x", {kVirtualLabel}, {}), DataError);
  EXPECT_NO_THROW(Graph("x", {kVirtualLabel}, {}, /*extended=*/true));
}

TEST(Graph, AdjacencyAndDegree) {
  const auto g = gbda::testing::pair_g2();
  EXPECT_EQ(g.degree(0), 2u);
  EXPECT_EQ(g.degree(1), 1u);
  EXPECT_TRUE(g.adjacent(3, 0));
  EXPECT_FALSE(g.adjacent(1, 2));
  EXPECT_EQ(g.edges()[g.find_edge(3, 1)].label, "y");
}

TEST(Graph, JsonRoundTrip) {
  const auto g = gbda::testing::pair_g1();
  std::stringstream ss;
  std::vector<Graph> v{g};
  write_corpus(ss, v);
  const auto back = read_corpus(ss);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], g);
}

TEST(Graph, CorpusErrorsCarryLineNumbers) {
  std::stringstream ss("{\"id\":\"a\",\"vertices\":[\"A\"],\"edges\":[]}\n\n{\"id\":\"b\",\"vertices\":[\"A\"]}\n");
  try {
    read_corpus(ss);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::stringstream bad_json("{not json\n");
  EXPECT_THROW(read_corpus(bad_json), DataError);
  std::stringstream bad_edge("{\"id\":\"a\",\"vertices\":[\"A\",\"B\"],\"edges\":[[0,1]]}\n");
  EXPECT_THROW(read_corpus(bad_edge), DataError);
}

TEST(Graph, GraphReferences) {
  EXPECT_EQ(split_graph_ref("dir/a#b.jsonl#g7").second, "g7");
  EXPECT_EQ(split_graph_ref("dir/a#b.jsonl#g7").first, "dir/a#b.jsonl");
  EXPECT_THROW(split_graph_ref("nohash"), DataError);
  EXPECT_THROW(split_graph_ref("path#"), DataError);
  const auto g = load_graph_ref(data_path("pair.jsonl") + "#g2");
  EXPECT_EQ(g, gbda::testing::pair_g2());
  EXPECT_THROW(load_graph_ref(data_path("pair.jsonl") + "#missing"), DataError);
  EXPECT_THROW(read_corpus(data_path("does-not-exist.jsonl")), DataError);
}

TEST(Graph, AlphabetIgnoresVirtualLabels) {
  std::vector<Graph> corpus{gbda::testing::pair_g1(), gbda::testing::pair_g2(),
                            materialize_extended(gbda::testing::pair_g1(), 2)};
  const auto a = LabelAlphabet::of(corpus);
  EXPECT_EQ(a.vertex_labels, (std::set<Label>{"A", "B", "C"}));
  EXPECT_EQ(a.edge_labels, (std::set<Label>{"x", "y", "z"}));
}
