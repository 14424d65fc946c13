#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "gbda/model.hpp"

namespace gbda {

/// Parameters for one Omega evaluation. Only the fields the chosen Omega
/// reads need to be set: Omega1 (x, tau), Omega2 (m, x, tau), Omega3 (r, phi,
/// d_types), Omega4 (x, r, m).
struct OmegaPoint {
  std::int64_t v = 0;
  std::int64_t tau = 0;
  std::int64_t x = 0;
  std::int64_t m = 0;
  std::int64_t r = 0;
  std::int64_t phi = 0;
  std::uint64_t d_types = 2;
};

struct McEstimate {
  double estimate = 0;
  double std_error = 0;
};

namespace detail {

/// Moves a uniform k-subset of `pool` to its front (partial Fisher-Yates).
template <class T>
void sample_prefix(std::vector<T>& pool, std::size_t k, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
}

}  // namespace detail

/// Monte Carlo estimate of Omega `which` by simulating its sampling process:
///   1: tau distinct relabel targets among v vertices and C(v,2) edges; hit == x vertices
///   2: tau - x distinct edges of K_v; they cover exactly m vertices
///   3: r ball pairs coloured uniformly from D colours; exactly phi pairs differ
///   4: independent uniform x- and m-subsets of v vertices; union has size r
inline McEstimate mc_omega(int which, const OmegaPoint& q, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("mc_omega: trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::size_t hits = 0;
  const std::int64_t E = q.v * (q.v - 1) / 2;
  switch (which) {
    case 1: {
      if (q.tau < 0 || q.tau > q.v + E) throw std::invalid_argument("mc_omega: tau out of range");
      std::vector<std::int64_t> pool(static_cast<std::size_t>(q.v + E));
      std::iota(pool.begin(), pool.end(), 0);
      for (std::size_t t = 0; t < trials; ++t) {
        detail::sample_prefix(pool, static_cast<std::size_t>(q.tau), rng);
        std::int64_t vertices = 0;
        for (std::int64_t i = 0; i < q.tau; ++i) vertices += pool[i] < q.v;
        hits += vertices == q.x;
      }
      break;
    }
    case 2: {
      const std::int64_t y = q.tau - q.x;
      if (y < 0 || y > E) throw std::invalid_argument("mc_omega: edge count out of range");
      std::vector<std::pair<std::int64_t, std::int64_t>> pool;
      for (std::int64_t a = 0; a < q.v; ++a) {
        for (std::int64_t b = a + 1; b < q.v; ++b) pool.emplace_back(a, b);
      }
      std::vector<char> covered(static_cast<std::size_t>(q.v));
      for (std::size_t t = 0; t < trials; ++t) {
        detail::sample_prefix(pool, static_cast<std::size_t>(y), rng);
        std::fill(covered.begin(), covered.end(), 0);
        std::int64_t count = 0;
        for (std::int64_t i = 0; i < y; ++i) {
          for (auto e : {pool[i].first, pool[i].second}) {
            if (!covered[e]) covered[e] = 1, ++count;
          }
        }
        hits += count == q.m;
      }
      break;
    }
    case 3: {
      if (q.d_types < 1) throw std::invalid_argument("mc_omega: D must be >= 1");
      std::uniform_int_distribution<std::uint64_t> colour(0, q.d_types - 1);
      for (std::size_t t = 0; t < trials; ++t) {
        std::int64_t differ = 0;
        for (std::int64_t i = 0; i < q.r; ++i) differ += colour(rng) != colour(rng);
        hits += differ == q.phi;
      }
      break;
    }
    case 4: {
      if (q.x > q.v || q.m > q.v) throw std::invalid_argument("mc_omega: subset larger than v");
      std::vector<std::int64_t> a(static_cast<std::size_t>(q.v)), b(static_cast<std::size_t>(q.v));
      std::iota(a.begin(), a.end(), 0);
      std::iota(b.begin(), b.end(), 0);
      std::vector<char> in(static_cast<std::size_t>(q.v));
      for (std::size_t t = 0; t < trials; ++t) {
        detail::sample_prefix(a, static_cast<std::size_t>(q.x), rng);
        detail::sample_prefix(b, static_cast<std::size_t>(q.m), rng);
        std::fill(in.begin(), in.end(), 0);
        std::int64_t size = 0;
        for (std::int64_t i = 0; i < q.x; ++i) in[a[i]] = 1, ++size;
        for (std::int64_t i = 0; i < q.m; ++i) size += !in[b[i]];
        hits += size == q.r;
      }
      break;
    }
    default:
      throw std::invalid_argument("mc_omega: which must be 1..4");
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1 - p) / static_cast<double>(trials))};
}

/// Closed-form counterpart of mc_omega for the same point.
inline double closed_form_omega(int which, const OmegaPoint& q) {
  // Omega3 depends on v only through D; any v >= 1 will do for the params.
  const auto p = ModelParams::make(std::max<std::int64_t>(q.v, 1), 2, 1).with_branch_types(BigInt(q.d_types));
  switch (which) {
    case 1: return omega1(q.x, q.tau, p);
    case 2: return omega2(q.m, q.x, q.tau, p);
    case 3: return omega3(q.r, q.phi, p);
    case 4: return omega4(q.x, q.r, q.m, p);
    default: throw std::invalid_argument("closed_form_omega: which must be 1..4");
  }
}

/// Seeded random points with every Omega's free variable inside its support:
/// v in [2, v_max], tau <= tau_max, D drawn from `d_choices`.
inline std::vector<OmegaPoint> random_omega_points(std::size_t count, std::uint64_t seed, std::int64_t v_max = 8,
                                                   std::int64_t tau_max = 4,
                                                   std::vector<std::uint64_t> d_choices = {4, 60}) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
  std::vector<OmegaPoint> out;
  while (out.size() < count) {
    OmegaPoint q;
    q.v = uniform(2, v_max);
    const std::int64_t E = q.v * (q.v - 1) / 2;
    q.tau = uniform(0, std::min(tau_max, q.v + E));
    q.x = uniform(std::max<std::int64_t>(0, q.tau - E), std::min(q.tau, q.v));
    q.m = uniform(0, std::min(q.v, 2 * (q.tau - q.x)));
    q.r = uniform(std::max(q.x, q.m), std::min(q.x + q.m, q.v));
    q.phi = uniform(0, q.r);
    q.d_types = d_choices[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(d_choices.size()) - 1))];
    out.push_back(q);
  }
  return out;
}

}  // namespace gbda
