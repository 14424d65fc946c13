#include <gtest/gtest.h>

#include <boost/math/special_functions/digamma.hpp>

#include "gbda/combinatorics.hpp"

using namespace gbda;

TEST(Combinatorics, BinomialMatchesPascal) {
  std::vector<std::vector<BigInt>> row{{1}};
  for (int n = 1; n <= 80; ++n) {
    std::vector<BigInt> next(n + 1, 1);
    for (int k = 1; k < n; ++k) next[k] = row[n - 1][k - 1] + row[n - 1][k];
    row.push_back(next);
  }
  for (int n = 0; n <= 80; ++n) {
    for (int k = 0; k <= n; ++k) ASSERT_EQ(binom(n, k), row[n][k]) << n << " " << k;
  }
  EXPECT_EQ(binom(5, -1), 0);
  EXPECT_EQ(binom(5, 6), 0);
  EXPECT_EQ(binom(-1, 0), 0);
  EXPECT_EQ(binom(100, 50).str(), "100891344545564193334812497256");
}

TEST(Combinatorics, HypergeometricSumsToOneAndMatchesCounting) {
  for (int M = 0; M <= 12; ++M) {
    for (int K = 0; K <= M; ++K) {
      for (int N = 0; N <= M; ++N) {
        BigRational total = 0;
        for (int x = -1; x <= N + 1; ++x) total += hypergeom_pmf_exact(x, M, K, N);
        ASSERT_EQ(total, 1) << M << " " << K << " " << N;
      }
    }
  }
  // Drawing 3 of {1,1,1,1,0,0,0}: P[2 ones] = C(4,2)C(3,1)/C(7,3) = 18/35.
  EXPECT_EQ(hypergeom_pmf_exact(2, 7, 4, 3), BigRational(18, 35));
  EXPECT_EQ(hypergeom_pmf_exact(0, 5, 2, 6), 0);
}

TEST(Combinatorics, LogSpaceAgreesWithExact) {
  for (std::int64_t M : {10, 50, 300, 5000}) {
    for (std::int64_t K : {1L, M / 7 + 1, M / 2}) {
      for (std::int64_t N : {1L, 5L, M / 3}) {
        for (std::int64_t x = 0; x <= std::min(K, N); ++x) {
          const double exact = hypergeom_pmf(x, M, K, N);
          const double approx = static_cast<double>(hypergeom_pmf_log_space(x, M, K, N));
          if (exact < 1e-300) continue;
          ASSERT_NEAR(approx / exact, 1.0, 1e-12) << M << " " << K << " " << N << " " << x;
        }
      }
    }
  }
  EXPECT_EQ(log_binom(3, 4), -INFINITY);
  EXPECT_NEAR(static_cast<double>(log_binom(1000, 500)), 689.4672615678512, 1e-9);
}

TEST(Combinatorics, HarmonicNumbers) {
  EXPECT_EQ(harmonic_exact(4), BigRational(25, 12));
  EXPECT_EQ(harmonic(0), 0.0);
  for (std::int64_t n = 1; n <= 40; ++n) {
    EXPECT_NEAR(harmonic(n), harmonic_exact(n).convert_to<double>(), 1e-15);
  }
  // The asymptotic branch must join the direct sum without a seam.
  long double direct = 0;
  for (std::int64_t i = 1; i <= 1000; ++i) {
    direct += 1.0L / static_cast<long double>(i);
    if (i >= 250) EXPECT_NEAR(static_cast<double>(harmonic_ld(i)), static_cast<double>(direct), 1e-15) << i;
  }
  EXPECT_THROW(harmonic(-1), std::domain_error);
}

TEST(Combinatorics, DigammaAtIntegers) {
  for (std::int64_t n = 1; n <= 600; n += 7) {
    EXPECT_NEAR(digamma_int(n), boost::math::digamma(static_cast<double>(n)), 1e-13) << n;
  }
  EXPECT_THROW(digamma_int(0), std::domain_error);
}
