#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace gbda;

namespace {

std::vector<double> mixture_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution pick(0.3);
  std::normal_distribution<double> a(2.0, 0.5), b(10.0, 1.0);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(pick(rng) ? a(rng) : b(rng));
  return out;
}

std::string temp_file(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

PriorStore small_store() {
  PriorStore s;
  s.gmm.components = {{0.25, 1.5, 0.75}, {0.75, 6.0, 2.0}};
  s.alphabet.vertex_labels = {"A", "B", "C"};
  s.alphabet.edge_labels = {"x", "y", "z"};
  s.ged_table = build_ged_prior(3, 6, s.alphabet);
  s.n_pairs = 42;
  return s;
}

}  // namespace

TEST(Gmm, RecoversSeparatedMixture) {
  const auto samples = mixture_samples(20000, 1);
  const auto fit = fit_gmm_trace(samples, {2, 200, 1e-9, 7});
  auto comps = fit.model.components;
  std::sort(comps.begin(), comps.end(), [](auto& x, auto& y) { return x.mean < y.mean; });
  EXPECT_NEAR(comps[0].weight, 0.3, 0.02);
  EXPECT_NEAR(comps[0].mean, 2.0, 0.05);
  EXPECT_NEAR(comps[0].stddev, 0.5, 0.05);
  EXPECT_NEAR(comps[1].mean, 10.0, 0.05);
  EXPECT_NEAR(comps[1].stddev, 1.0, 0.05);
}

TEST(Gmm, LogLikelihoodNeverDecreases) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto samples = mixture_samples(3000, seed);
    const auto fit = fit_gmm_trace(samples, {3, 100, 1e-12, seed});
    ASSERT_GE(fit.log_likelihood.size(), 2u);
    for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
      EXPECT_GE(fit.log_likelihood[i], fit.log_likelihood[i - 1] - 1e-9) << i;
    }
  }
}

TEST(Gmm, DegenerateSamplesHitTheSigmaFloor) {
  const std::vector<double> same(500, 4.0);
  const auto m = fit_gmm(same, {2, 50, 1e-6, 0});
  double total = 0;
  for (const auto& c : m.components) {
    total += c.weight;
    if (c.weight > 0) {
      EXPECT_DOUBLE_EQ(c.mean, 4.0);
      EXPECT_DOUBLE_EQ(c.stddev, kSigmaFloor);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_NEAR(gbd_prior_prob(m, 4.0), 1.0, 1e-12);
  EXPECT_NEAR(gbd_prior_prob(m, 5.0), 0.0, 1e-12);
}

TEST(Gmm, DeterministicAndValidated) {
  const auto samples = mixture_samples(1000, 4);
  EXPECT_EQ(fit_gmm(samples, {3, 100, 1e-6, 9}), fit_gmm(samples, {3, 100, 1e-6, 9}));
  EXPECT_THROW(fit_gmm(samples, {0, 100, 1e-6, 9}), std::invalid_argument);
  EXPECT_THROW(fit_gmm(std::vector<double>{1.0}, {2, 100, 1e-6, 9}), std::invalid_argument);
  EXPECT_THROW(fit_gmm(std::vector<double>{1.0, NAN}, {1, 100, 1e-6, 9}), std::invalid_argument);
}

TEST(Gmm, IntegerMassesSumToOne) {
  GmmModel m{{{0.4, 3.2, 1.1}, {0.6, 12.0, 2.5}}};
  double total = 0;
  for (int phi = -20; phi <= 40; ++phi) {
    const double p = gbd_prior_prob(m, phi);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Priors, SampledPairsAreDistinctGraphs) {
  std::vector<BranchIndex> corpus;
  for (int i = 0; i < 5; ++i) {
    corpus.push_back(compute_branches(Graph("g" + std::to_string(i), std::vector<Label>(i + 1, "A"), {})));
  }
  const auto s = sample_gbd_pairs(corpus, 2000, 3);
  ASSERT_EQ(s.size(), 2000u);
  // Graphs differ only in size, so GBD = size difference, never 0.
  for (double x : s) {
    EXPECT_GE(x, 1.0);
    EXPECT_LE(x, 4.0);
  }
  EXPECT_EQ(s, sample_gbd_pairs(corpus, 2000, 3));
  EXPECT_THROW(sample_gbd_pairs(std::span(corpus).first(1), 10, 0), std::invalid_argument);
}

TEST(Priors, JeffreysTableMatchesFiniteDifferenceOracle) {
  LabelAlphabet a;
  a.vertex_labels = {"A", "B", "C"};
  a.edge_labels = {"x", "y", "z"};
  const auto t = build_ged_prior(3, 5, a);
  EXPECT_DOUBLE_EQ(t.norm_c, 1.0 / (4 * 5));
  for (std::int64_t v = 2; v <= 5; ++v) {
    const long double d = ModelParams::make(v, 3, 3).d_types.convert_to<long double>();
    for (std::int64_t tau = 0; tau <= 3; ++tau) {
      long double acc = 0;
      for (std::int64_t phi = 0; phi <= 2 * tau; ++phi) {
        const long double l = oracle::lambda1_continuous(v, tau, phi, d, tau);
        if (l <= 1e-300L) continue;
        const long double z = oracle::z_finite_difference(v, tau, phi, d);
        acc += l * z * z;
      }
      const double expect = t.norm_c * static_cast<double>(std::sqrt(acc));
      EXPECT_NEAR(t.at(tau, v), expect, 1e-4 * expect) << v << " " << tau;
    }
  }
}

TEST(Priors, TableIsThreadInvariantAndBounded) {
  LabelAlphabet a;
  a.vertex_labels = {"A", "B"};
  a.edge_labels = {"x"};
  const auto one = build_ged_prior(4, 30, a, 1);
  const auto three = build_ged_prior(4, 30, a, 3);
  EXPECT_EQ(one, three);
  for (const auto& row : one.values) {
    for (double x : row) EXPECT_GE(x, 0.0);
  }
  EXPECT_THROW(one.at(5, 1), DataError);
  EXPECT_THROW(one.at(0, 31), DataError);
  EXPECT_THROW(build_ged_prior(-1, 3, a), std::invalid_argument);

  LabelAlphabet unary;
  unary.vertex_labels = {"A"};
  const auto flat = build_ged_prior(2, 4, unary);
  for (const auto& row : flat.values) {
    for (double x : row) EXPECT_EQ(x, 0.0);
  }
}

TEST(Priors, FileRoundTrip) {
  const auto s = small_store();
  const auto path = temp_file("priors_roundtrip.json");
  save_priors(s, path);
  EXPECT_EQ(load_priors(path), s);
}

TEST(Priors, FileErrors) {
  auto j = priors_to_json(small_store());
  j["version"] = 99;
  EXPECT_THROW(priors_from_json(j), VersionError);
  j = priors_to_json(small_store());
  j["ged_table"]["values"].erase(0);
  EXPECT_THROW(priors_from_json(j), SchemaError);
  j = priors_to_json(small_store());
  j.erase("gmm");
  EXPECT_THROW(priors_from_json(j), SchemaError);
  EXPECT_THROW(load_priors(temp_file("no_such_priors.json")), DataError);
  const auto garbage = temp_file("garbage_priors.json");
  std::ofstream(garbage) << "{\"version\": 1,";
  EXPECT_THROW(load_priors(garbage), SchemaError);
}

TEST(Priors, PrecomputeCoversCorpusSizes) {
  GenSpec spec;
  spec.seed = 3;
  const auto corpus = generate_corpus(spec, 6).graphs;
  std::vector<BranchIndex> idx;
  for (const auto& g : corpus) idx.push_back(compute_branches(g));
  PrecomputeOptions opt;
  opt.tau_hat = 2;
  opt.n_pairs = 500;
  const auto s = precompute_priors(corpus, idx, opt);
  EXPECT_EQ(s.ged_table.n_max, 8);
  EXPECT_EQ(s.ged_table.tau_hat, 2);
  EXPECT_EQ(s.gmm.k(), 3u);
  EXPECT_EQ(s.alphabet, LabelAlphabet::of(corpus));
  EXPECT_EQ(s, precompute_priors(corpus, idx, opt));
}

TEST(Gmm, SingleComponentMatchesSampleMoments) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd(5.0, 2.0);
  std::vector<double> s(100000);
  for (auto& x : s) x = nd(rng);
  double mean = 0, var = 0;
  for (double x : s) mean += x;
  mean /= static_cast<double>(s.size());
  for (double x : s) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(s.size()));
  const auto m = fit_gmm(s, {1, 100, 1e-9, 0});
  ASSERT_EQ(m.k(), 1u);
  EXPECT_NEAR(m.components[0].mean, mean, 0.05);
  EXPECT_NEAR(m.components[0].stddev, sd, 0.05);
  EXPECT_DOUBLE_EQ(m.components[0].weight, 1.0);
}

TEST(Gmm, StandardNormalUnitInterval) {
  const GmmModel m{{{1.0, 0.0, 1.0}}};
  EXPECT_NEAR(gbd_prior_prob(m, 0), 0.38292, 1e-4);
  EXPECT_NEAR(gbd_prior_prob(m, 0), std::erf(0.5 / std::sqrt(2.0)), 1e-15);
}
