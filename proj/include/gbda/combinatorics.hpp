#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <gmp.h>

#include <boost/multiprecision/gmp.hpp>

namespace gbda {

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;

inline constexpr double kEulerGamma = 0.5772156649015329;

/// C(n, k); zero when k < 0 or k > n.
inline BigInt binom(std::int64_t n, std::int64_t k) {
  if (n < 0 || k < 0 || k > n) return 0;
  BigInt out;
  mpz_bin_uiui(out.backend().data(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

/// Exact hypergeometric pmf C(K,x)·C(M-K,N-x)/C(M,N); zero outside the
/// support and whenever C(M,N) vanishes.
inline BigRational hypergeom_pmf_exact(std::int64_t x, std::int64_t M, std::int64_t K,
                                       std::int64_t N) {
  if (x < 0 || x > K || N - x < 0 || N - x > M - K) return 0;
  BigInt den = binom(M, N);
  if (den == 0) return 0;
  return BigRational(binom(K, x) * binom(M - K, N - x), den);
}

inline double hypergeom_pmf(std::int64_t x, std::int64_t M, std::int64_t K, std::int64_t N) {
  return hypergeom_pmf_exact(x, M, K, N).convert_to<double>();
}

/// log C(n, k) for 0 <= k <= n. The product form keeps full precision when the
/// smaller of k and n-k is short, which is the regime the model lives in.
inline long double log_binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -INFINITY;
  const std::int64_t s = std::min(k, n - k);
  if (s <= 64) {
    long double acc = 0;
    for (std::int64_t i = 0; i < s; ++i) {
      acc += std::log(static_cast<long double>(n - i)) - std::log(static_cast<long double>(i + 1));
    }
    return acc;
  }
  return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
         std::lgamma(static_cast<long double>(n - k) + 1);
}

/// Floating-point hypergeometric pmf evaluated in log space.
inline long double hypergeom_pmf_log_space(std::int64_t x, std::int64_t M, std::int64_t K,
                                           std::int64_t N) {
  if (x < 0 || x > K || N - x < 0 || N - x > M - K || N > M) return 0;
  return std::exp(log_binom(K, x) + log_binom(M - K, N - x) - log_binom(M, N));
}

/// H(n) = sum_{i=1..n} 1/i, H(0) = 0.
inline long double harmonic_ld(std::int64_t n) {
  if (n < 0) throw std::domain_error("harmonic: negative argument");
  if (n < 256) {
    long double h = 0;
    for (std::int64_t i = n; i >= 1; --i) h += 1.0L / static_cast<long double>(i);
    return h;
  }
  // Asymptotic expansion; truncation error < 1e-20 for n >= 256.
  const long double x = static_cast<long double>(n);
  const long double inv2 = 1.0L / (x * x);
  return std::log(x) + static_cast<long double>(kEulerGamma) + 0.5L / x -
         inv2 * (1.0L / 12 - inv2 * (1.0L / 120 - inv2 * (1.0L / 252)));
}

inline double harmonic(std::int64_t n) { return static_cast<double>(harmonic_ld(n)); }

/// Exact H(n) as a rational; only for small n.
inline BigRational harmonic_exact(std::int64_t n) {
  BigRational h = 0;
  for (std::int64_t i = 1; i <= n; ++i) h += BigRational(1, i);
  return h;
}

/// ψ(n) = H(n-1) - γ for positive integers n.
inline double digamma_int(std::int64_t n) {
  if (n < 1) throw std::domain_error("digamma_int: argument must be a positive integer");
  return static_cast<double>(harmonic_ld(n - 1) - static_cast<long double>(kEulerGamma));
}

}  // namespace gbda
