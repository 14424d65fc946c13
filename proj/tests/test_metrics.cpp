#include <gtest/gtest.h>

#include <sstream>

#include "gbda/bench.hpp"
#include "gbda/metrics.hpp"
#include "gbda/syngen.hpp"

using namespace gbda;

TEST(Metrics, CountsAndRates) {
  const auto r = evaluate({"a", "b", "c", "x"}, {"a", "b", "c", "d", "e", "f"});
  EXPECT_EQ(r.tp, 3u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 3u);
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 0.6);
}

TEST(Metrics, EmptySetConventions) {
  const auto both = evaluate({}, {});
  EXPECT_DOUBLE_EQ(both.precision, 1.0);
  EXPECT_DOUBLE_EQ(both.recall, 1.0);
  EXPECT_DOUBLE_EQ(both.f1, 1.0);
  const auto missed = evaluate({}, {"a"});
  EXPECT_DOUBLE_EQ(missed.precision, 0.0);
  EXPECT_DOUBLE_EQ(missed.recall, 0.0);
  EXPECT_DOUBLE_EQ(missed.f1, 0.0);
  const auto spurious = evaluate({"a"}, {});
  EXPECT_DOUBLE_EQ(spurious.precision, 0.0);
  EXPECT_DOUBLE_EQ(spurious.recall, 1.0);
}

TEST(Metrics, MicroAverage) {
  auto a = evaluate({"a"}, {"a"});
  a.latencies = {0.1};
  auto b = evaluate({"x", "y", "z"}, {"w"});
  b.latencies = {0.3};
  const auto m = merge_reports({a, b});
  EXPECT_EQ(m.tp, 1u);
  EXPECT_EQ(m.fp, 3u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_DOUBLE_EQ(m.precision, 0.25);
  EXPECT_DOUBLE_EQ(m.recall, 0.5);
  EXPECT_DOUBLE_EQ(mean_latency(m), 0.2);
  const auto j = report_to_json(m);
  EXPECT_EQ(j["queries"], 2);
  EXPECT_DOUBLE_EQ(j["f1"].get<double>(), m.f1);
}

TEST(Metrics, TableHasOneAlignedRowPerReport) {
  const auto t = report_table({{"gbda@0.5", evaluate({"a"}, {"a"})}, {"greedy", evaluate({}, {"a"})}});
  std::size_t lines = 0, width = 0;
  std::istringstream in(t);
  for (std::string line; std::getline(in, line); ++lines) {
    if (width == 0) width = line.size();
    EXPECT_EQ(line.size(), width);
  }
  EXPECT_EQ(lines, 3u);
  EXPECT_NE(t.find("gbda@0.5"), std::string::npos);
}

TEST(Metrics, StridedQueries) {
  EXPECT_EQ(strided_queries(10, 3), (std::vector<std::size_t>{0, 3, 6}));
  EXPECT_EQ(strided_queries(2, 5), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(strided_queries(0, 5).empty());
}

TEST(Bench, SmallRunScoresEveryMethod) {
  GenSpec spec;
  spec.seed = 4;
  const auto corpus = generate_corpus(spec, 6).graphs;
  BenchOptions opt;
  opt.queries = 5;
  opt.n_pairs = 1000;
  const auto r = run_bench(corpus, opt);
  ASSERT_EQ(r.rows.size(), opt.gammas.size() + 2);
  EXPECT_EQ(r.rows.back().first, "lsap");
  EXPECT_EQ(r.rows[r.rows.size() - 2].first, "greedy");
  EXPECT_EQ(r.undecided, 0u);
  // Greedy never underestimates, so everything it keeps is a true hit.
  EXPECT_EQ(r.greedy.fp, 0u);
  // lsap never overestimates, so it keeps every true hit.
  EXPECT_EQ(r.rows.back().second.fn, 0u);
  for (const auto& [name, rep] : r.rows) {
    EXPECT_EQ(rep.latencies.size(), opt.queries) << name;
    EXPECT_GE(rep.f1, 0.0);
    EXPECT_LE(rep.f1, 1.0);
  }
  bool found = false;
  for (double g : opt.gammas) found |= g == r.best_gamma;
  EXPECT_TRUE(found);
}
