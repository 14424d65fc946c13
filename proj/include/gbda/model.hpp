#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "gbda/combinatorics.hpp"
#include "gbda/graph.hpp"

// Likelihood of a branch distance given an edit distance, Pr[GBD = phi | GED = tau],
// on extended graphs with v vertices. Edits are modelled as tau relabel
// operations on the complete graph K_v:
//
//   Lambda1(tau, phi) = sum_x Omega1(x, tau)
//                         sum_m Omega2(m, x, tau)
//                           sum_r Omega3(r, phi) * Omega4(x, r, m)
//
// x counts relabelled vertices, m vertices covered by the tau - x relabelled
// edges, r vertices touched by either. Omega3 models the touched branches as
// r uniformly coloured ball pairs over D branch types.

namespace gbda {

/// Largest extended vertex count evaluated with exact rationals.
inline constexpr std::int64_t kExactVertexLimit = 200;

/// Λ1 values at or below this are treated as zero when dividing by them.
inline constexpr double kLambdaFloor = 1e-300;

enum class Arithmetic { automatic, exact, log_space };

struct ModelParams {
  std::int64_t v = 0;
  std::int64_t vertex_label_count = 0;
  std::int64_t edge_label_count = 0;
  /// Number of branch types D = |L_V| · C(v + |L_E| - 1, |L_E|).
  BigInt d_types = 0;
  Arithmetic arithmetic = Arithmetic::automatic;

  static BigInt branch_types(std::int64_t v, std::int64_t vertex_labels, std::int64_t edge_labels) {
    return BigInt(vertex_labels) * binom(v + edge_labels - 1, edge_labels);
  }

  static ModelParams make(std::int64_t v, std::int64_t vertex_labels, std::int64_t edge_labels) {
    if (v < 1) throw std::invalid_argument("ModelParams: v must be >= 1");
    if (vertex_labels < 1 || edge_labels < 0) {
      throw std::invalid_argument("ModelParams: label alphabet sizes out of range");
    }
    ModelParams p{v, vertex_labels, edge_labels, branch_types(v, vertex_labels, edge_labels)};
    p.check();
    return p;
  }

  static ModelParams of(std::int64_t v, const LabelAlphabet& alphabet) {
    return make(v, static_cast<std::int64_t>(alphabet.vertex_labels.size()),
                static_cast<std::int64_t>(alphabet.edge_labels.size()));
  }

  /// Same v with D replaced, for sensitivity studies of the branch-type count.
  ModelParams with_branch_types(BigInt d) const {
    ModelParams p = *this;
    p.d_types = std::move(d);
    p.check();
    return p;
  }

  ModelParams with_arithmetic(Arithmetic a) const {
    ModelParams p = *this;
    p.arithmetic = a;
    return p;
  }

  std::int64_t edges() const { return v * (v - 1) / 2; }
  /// Relabel targets in K_v: v vertices plus C(v, 2) edges.
  std::int64_t slots() const { return v + edges(); }

  bool exact() const {
    switch (arithmetic) {
      case Arithmetic::exact: return true;
      case Arithmetic::log_space: return false;
      case Arithmetic::automatic: break;
    }
    return v <= kExactVertexLimit;
  }

 private:
  void check() const {
    if (d_types < 2) throw std::invalid_argument("ModelParams: branch-type count D must be >= 2");
  }
};

namespace detail {

/// Σ_t (-1)^{m-t} C(m,t) C(C(t,2), y): edge sets of size y covering exactly a
/// fixed m-vertex set.
inline BigInt exact_cover_count(std::int64_t m, std::int64_t y) {
  BigInt k = 0;
  for (std::int64_t t = 0; t <= m; ++t) {
    BigInt term = binom(m, t) * binom(t * (t - 1) / 2, y);
    if ((m - t) % 2) k -= term; else k += term;
  }
  return k;
}

/// d/dy C(T, y) at integer y under the Gamma-function extension of the
/// binomial. For T < y the binomial sits on a zero of 1/Γ(T - y + 1) and the
/// derivative is -(-1)^j j! T! / y! with j = y - T - 1.
inline BigRational binom_derivative(std::int64_t T, std::int64_t y) {
  if (T >= y) return BigRational(binom(T, y)) * (harmonic_exact(T - y) - harmonic_exact(y));
  const std::int64_t j = y - T - 1;
  BigInt num, tf, yf;
  mpz_fac_ui(num.backend().data(), static_cast<unsigned long>(j));
  mpz_fac_ui(tf.backend().data(), static_cast<unsigned long>(T));
  mpz_fac_ui(yf.backend().data(), static_cast<unsigned long>(y));
  BigRational d(num * tf, yf);
  return (j % 2) ? d : BigRational(-d);
}

/// Σ_t (-1)^{m-t} C(m,t) d/dy C(C(t,2), y).
inline BigRational cover_count_derivative(std::int64_t m, std::int64_t y) {
  BigRational s = 0;
  for (std::int64_t t = 0; t <= m; ++t) {
    BigRational term = BigRational(binom(m, t)) * binom_derivative(t * (t - 1) / 2, y);
    if ((m - t) % 2) s -= term; else s += term;
  }
  return s;
}

/// Cover counts and their derivatives depend only on (m, y), not on v, so
/// they are memoized process-wide.
struct CoverCache {
  struct Entry {
    BigInt count;
    long double count_ld;
    long double slope;
  };
  static const Entry& get(std::int64_t m, std::int64_t y) {
    static std::mutex mu;
    static std::map<std::pair<std::int64_t, std::int64_t>, Entry> memo;
    std::lock_guard lock(mu);
    auto it = memo.find({m, y});
    if (it == memo.end()) {
      BigInt k = exact_cover_count(m, y);
      const long double k_ld = k.convert_to<long double>();
      it = memo.emplace(std::pair{m, y},
                        Entry{std::move(k), k_ld,
                              cover_count_derivative(m, y).convert_to<long double>()})
               .first;
    }
    return it->second;
  }
};

// Kernels evaluate each Omega in one arithmetic. ExactKernel keeps rationals
// end to end; LogSpaceKernel works in long double with binomial ratios taken
// in log space. The alternating cover-count sums stay exact in both.

struct ExactKernel {
  using value_type = BigRational;

  static value_type omega1(const ModelParams& p, std::int64_t x, std::int64_t tau) {
    return hypergeom_pmf_exact(x, p.slots(), p.v, tau);
  }
  static value_type omega2(const ModelParams& p, std::int64_t m, std::int64_t y) {
    if (m < 0 || m > p.v || y < 0) return 0;
    BigInt den = binom(p.edges(), y);
    if (den == 0) return 0;
    return BigRational(binom(p.v, m) * CoverCache::get(m, y).count, den);
  }
  /// C(v, m) / C(E, y), the factor multiplying the cover count in Omega2.
  static long double omega2_scale(const ModelParams& p, std::int64_t m, std::int64_t y) {
    BigInt den = binom(p.edges(), y);
    if (den == 0) return 0;
    return BigRational(binom(p.v, m), den).convert_to<long double>();
  }
  static value_type omega3(const ModelParams& p, std::int64_t r, std::int64_t phi) {
    if (phi < 0 || r < 0 || phi > r) return 0;
    BigInt num = binom(r, phi) * pow(BigInt(p.d_types - 1), static_cast<unsigned>(phi));
    BigInt den = pow(p.d_types, static_cast<unsigned>(r));
    return BigRational(num, den);
  }
  static value_type omega4(const ModelParams& p, std::int64_t x, std::int64_t r, std::int64_t m) {
    return hypergeom_pmf_exact(x + m - r, p.v, m, x);
  }
  static long double to_ld(const value_type& q) { return q.convert_to<long double>(); }
  static bool is_zero(const value_type& q) { return q == 0; }
};

struct LogSpaceKernel {
  using value_type = long double;

  static value_type omega1(const ModelParams& p, std::int64_t x, std::int64_t tau) {
    return hypergeom_pmf_log_space(x, p.slots(), p.v, tau);
  }
  static long double omega2_scale(const ModelParams& p, std::int64_t m, std::int64_t y) {
    if (m < 0 || m > p.v || y < 0 || y > p.edges()) return 0;
    return std::exp(log_binom(p.v, m) - log_binom(p.edges(), y));
  }
  static value_type omega2(const ModelParams& p, std::int64_t m, std::int64_t y) {
    const long double scale = omega2_scale(p, m, y);
    if (scale == 0) return 0;
    return scale * CoverCache::get(m, y).count_ld;
  }
  static value_type omega3(const ModelParams& p, std::int64_t r, std::int64_t phi) {
    if (phi < 0 || r < 0 || phi > r) return 0;
    const long double d = p.d_types.convert_to<long double>();
    return std::exp(log_binom(r, phi) + static_cast<long double>(phi) * std::log1p(-1.0L / d) -
                    static_cast<long double>(r - phi) * std::log(d));
  }
  static value_type omega4(const ModelParams& p, std::int64_t x, std::int64_t r, std::int64_t m) {
    return hypergeom_pmf_log_space(x + m - r, p.v, m, x);
  }
  static long double to_ld(value_type q) { return q; }
  static bool is_zero(value_type q) { return q == 0; }
};

/// Vertices touched (r) by x relabelled vertices and m covered vertices: the
/// support of Omega4.
struct TouchedRange {
  std::int64_t lo, hi;
};
inline TouchedRange touched_range(std::int64_t v, std::int64_t x, std::int64_t m) {
  return {std::max(x, m), std::min(x + m, v)};
}

/// Upper end of the covered-vertex count for y relabelled edges.
inline std::int64_t max_covered(const ModelParams& p, std::int64_t y) { return std::min(p.v, 2 * y); }

/// Cached Omega tables for one (params, tau_hat). Omega1 is kept per (tau, x),
/// Omega2 per (y, m) and the ball-pair weights per (phi, x, m); none of the
/// latter two depend on tau, so every tau <= tau_hat reuses them.
template <class K>
class LikelihoodTable {
 public:
  using value_type = typename K::value_type;

  LikelihoodTable(const ModelParams& p, std::int64_t tau_hat) : p_(p), tau_hat_(tau_hat) {
    if (tau_hat < 0) throw std::invalid_argument("tau_hat must be >= 0");
    const auto n = static_cast<std::size_t>(tau_hat + 1);
    omega1_.assign(n, std::vector<value_type>(n, value_type(0)));
    omega2_.resize(n);
    for (std::int64_t tau = 0; tau <= tau_hat; ++tau) {
      for (std::int64_t x = 0; x <= std::min(tau, p.v); ++x) omega1_[tau][x] = K::omega1(p, x, tau);
    }
    for (std::int64_t y = 0; y <= tau_hat; ++y) {
      omega2_[y].resize(static_cast<std::size_t>(max_covered(p, y) + 1));
      for (std::int64_t m = 0; m <= max_covered(p, y); ++m) omega2_[y][m] = K::omega2(p, m, y);
    }
  }

  const ModelParams& params() const { return p_; }
  std::int64_t tau_hat() const { return tau_hat_; }

  /// Λ1(tau, phi) for every tau in [0, tau_hat].
  std::vector<value_type> column(std::int64_t phi) {
    std::vector<value_type> out(static_cast<std::size_t>(tau_hat_ + 1), value_type(0));
    if (phi < 0) return out;
    const auto& w = weights(phi);
    for (std::int64_t tau = 0; tau <= tau_hat_; ++tau) {
      if (phi > std::min(3 * tau, p_.v)) continue;
      value_type total = 0;
      for (std::int64_t x = 0; x <= std::min(tau, p_.v); ++x) {
        const auto& a = omega1_[tau][x];
        if (K::is_zero(a)) continue;
        const std::int64_t y = tau - x;
        value_type inner = 0;
        for (std::int64_t m = 0; m <= max_covered(p_, y); ++m) {
          const auto& b = omega2_[y][m];
          if (K::is_zero(b)) continue;
          inner += b * w[x][m];
        }
        total += a * inner;
      }
      out[tau] = total;
    }
    return out;
  }

  /// d/dtau log Λ1 at (tau, phi); nullopt when Λ1 <= kLambdaFloor.
  std::optional<double> z(std::int64_t tau, std::int64_t phi) {
    if (tau < 0 || tau > tau_hat_ || phi < 0) return std::nullopt;
    const auto& w = weights(phi);
    ensure_derivatives();
    long double lambda = 0, slope = 0;
    const std::int64_t E = p_.edges();
    const std::int64_t M = p_.slots();
    if (tau > M) return std::nullopt;
    const long double h_tau = harmonic_ld(tau) - harmonic_ld(M - tau);
    for (std::int64_t x = 0; x <= std::min(tau, p_.v); ++x) {
      const std::int64_t y = tau - x;
      // No y-edge subsets exist: Omega1 is zero and Omega2 undefined.
      if (y > E) continue;
      const long double o1 = K::to_ld(omega1_[tau][x]);
      // d/dy log C(E, y) = H(E - y) - H(y); Omega1 carries it with a plus sign
      // in its numerator, Omega2 with a minus sign in its denominator.
      const long double dlog_edges = h_free_[y] - harmonic_ld(y);
      const long double d1 = o1 * (dlog_edges + h_tau);
      for (std::int64_t m = 0; m <= max_covered(p_, y); ++m) {
        const long double o2 = K::to_ld(omega2_[y][m]);
        const long double d2 = omega2_scale_[y][m] * cover_slope_[y][m] - o2 * dlog_edges;
        const long double wm = K::to_ld(w[x][m]);
        lambda += o1 * o2 * wm;
        slope += (o1 * d2 + d1 * o2) * wm;
      }
    }
    if (!(lambda > kLambdaFloor)) return std::nullopt;
    return static_cast<double>(slope / lambda);
  }

 private:
  using Grid = std::vector<std::vector<value_type>>;

  // W[x][m] = sum_r Omega3(r, phi) Omega4(x, r, m). Omega4 does not depend on
  // phi and is tabulated once; Omega3 is tabulated per phi column.
  const Grid& weights(std::int64_t phi) {
    if (static_cast<std::size_t>(phi) >= weights_.size()) weights_.resize(phi + 1);
    auto& slot = weights_[phi];
    if (slot) return *slot;
    ensure_union_table();
    const std::int64_t r_max = std::min(2 * tau_hat_, p_.v);
    Grid w(static_cast<std::size_t>(tau_hat_ + 1));
    if constexpr (std::is_same_v<K, ExactKernel>) {
      // Integer accumulation over the common denominator C(v, x) · D^{hi}.
      const BigInt lift = pow(BigInt(p_.d_types - 1), static_cast<unsigned>(phi));
      for (std::int64_t x = 0; x <= std::min(tau_hat_, p_.v); ++x) {
        w[x].assign(union_[x].size(), value_type(0));
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(union_[x].size()); ++m) {
          const auto [lo, hi] = touched_range(p_.v, x, m);
          BigInt acc = 0;
          for (std::int64_t r = std::max(lo, phi); r <= hi; ++r) {
            acc += binom(r, phi) * d_pow_[hi - r] * union_[x][m][r - lo];
          }
          if (acc != 0) w[x][m] = BigRational(acc * lift, binom(p_.v, x) * d_pow_[hi]);
        }
      }
    } else {
      std::vector<value_type> o3(static_cast<std::size_t>(r_max + 1), value_type(0));
      for (std::int64_t r = phi; r <= r_max; ++r) o3[r] = K::omega3(p_, r, phi);
      for (std::int64_t x = 0; x <= std::min(tau_hat_, p_.v); ++x) {
        w[x].assign(union_[x].size(), value_type(0));
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(union_[x].size()); ++m) {
          const auto [lo, hi] = touched_range(p_.v, x, m);
          value_type acc = 0;
          for (std::int64_t r = std::max(lo, phi); r <= hi; ++r) acc += o3[r] * union_[x][m][r - lo];
          w[x][m] = acc;
        }
      }
    }
    slot = std::move(w);
    return *slot;
  }

  // union_[x][m][r - lo]: Omega4(x, r, m) over its support. The exact kernel
  // stores the integer numerators C(m, t) C(v - m, x - t) instead.
  void ensure_union_table() {
    if (!union_.empty()) return;
    union_.resize(static_cast<std::size_t>(std::min(tau_hat_, p_.v) + 1));
    for (std::int64_t x = 0; x <= std::min(tau_hat_, p_.v); ++x) {
      const std::int64_t m_max = max_covered(p_, tau_hat_ - x);
      union_[x].resize(static_cast<std::size_t>(m_max + 1));
      for (std::int64_t m = 0; m <= m_max; ++m) {
        const auto [lo, hi] = touched_range(p_.v, x, m);
        for (std::int64_t r = lo; r <= hi; ++r) {
          if constexpr (std::is_same_v<K, ExactKernel>) {
            const std::int64_t t = x + m - r;
            union_[x][m].push_back(binom(m, t) * binom(p_.v - m, x - t));
          } else {
            union_[x][m].push_back(K::omega4(p_, x, r, m));
          }
        }
      }
    }
    if constexpr (std::is_same_v<K, ExactKernel>) {
      d_pow_.assign(1, BigInt(1));
      for (std::int64_t k = 1; k <= 2 * tau_hat_; ++k) d_pow_.push_back(d_pow_.back() * p_.d_types);
    }
  }

  void ensure_derivatives() {
    if (!cover_slope_.empty()) return;
    const auto n = static_cast<std::size_t>(tau_hat_ + 1);
    cover_slope_.resize(n);
    omega2_scale_.resize(n);
    for (std::int64_t y = 0; y <= tau_hat_; ++y) {
      h_free_.push_back(y <= p_.edges() ? harmonic_ld(p_.edges() - y) : 0.0L);
      for (std::int64_t m = 0; m <= max_covered(p_, y); ++m) {
        cover_slope_[y].push_back(CoverCache::get(m, y).slope);
        omega2_scale_[y].push_back(K::omega2_scale(p_, m, y));
      }
    }
  }

  ModelParams p_;
  std::int64_t tau_hat_;
  Grid omega1_;
  Grid omega2_;
  std::vector<std::optional<Grid>> weights_;
  using UnionEntry = std::conditional_t<std::is_same_v<K, ExactKernel>, BigInt, value_type>;
  std::vector<std::vector<std::vector<UnionEntry>>> union_;
  std::vector<BigInt> d_pow_;
  std::vector<long double> h_free_;  // H(E - y)
  std::vector<std::vector<long double>> cover_slope_;
  std::vector<std::vector<long double>> omega2_scale_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Public surface: probabilities as doubles. Each call dispatches on
// ModelParams::exact().

/// Pr[x of the tau relabels hit vertices].
inline double omega1(std::int64_t x, std::int64_t tau, const ModelParams& p) {
  if (p.exact()) return detail::ExactKernel::omega1(p, x, tau).convert_to<double>();
  return static_cast<double>(detail::LogSpaceKernel::omega1(p, x, tau));
}

/// Pr[tau - x uniformly chosen edges of K_v cover exactly m vertices].
inline double omega2(std::int64_t m, std::int64_t x, std::int64_t tau, const ModelParams& p) {
  if (p.exact()) return detail::ExactKernel::omega2(p, m, tau - x).convert_to<double>();
  return static_cast<double>(detail::LogSpaceKernel::omega2(p, m, tau - x));
}

/// Pr[phi of r ball pairs differ in colour] with D colours.
inline double omega3(std::int64_t r, std::int64_t phi, const ModelParams& p) {
  if (p.exact()) return detail::ExactKernel::omega3(p, r, phi).convert_to<double>();
  return static_cast<double>(detail::LogSpaceKernel::omega3(p, r, phi));
}

/// Pr[x relabelled and m covered vertices touch exactly r vertices].
inline double omega4(std::int64_t x, std::int64_t r, std::int64_t m, const ModelParams& p) {
  if (p.exact()) return detail::ExactKernel::omega4(p, x, r, m).convert_to<double>();
  return static_cast<double>(detail::LogSpaceKernel::omega4(p, x, r, m));
}

/// Pr[GBD = phi | GED = tau].
inline double lambda1(std::int64_t tau, std::int64_t phi, const ModelParams& p) {
  if (tau < 0 || phi < 0) return 0;
  if (p.exact()) {
    return detail::LikelihoodTable<detail::ExactKernel>(p, tau).column(phi)[tau].convert_to<double>();
  }
  return static_cast<double>(detail::LikelihoodTable<detail::LogSpaceKernel>(p, tau).column(phi)[tau]);
}

/// Λ1(tau, phi) for tau = 0..tau_hat, sharing the Omega2 and Omega3·Omega4
/// partial sums across all tau.
inline std::vector<double> lambda1_batch(std::int64_t tau_hat, std::int64_t phi, const ModelParams& p) {
  std::vector<double> out;
  if (p.exact()) {
    detail::LikelihoodTable<detail::ExactKernel> table(p, tau_hat);
    for (const auto& q : table.column(phi)) out.push_back(q.convert_to<double>());
  } else {
    detail::LikelihoodTable<detail::LogSpaceKernel> table(p, tau_hat);
    for (auto q : table.column(phi)) out.push_back(static_cast<double>(q));
  }
  return out;
}

/// The score function d/dtau log Pr[GBD = phi | GED = tau]. Throws
/// std::domain_error where Λ1 is (numerically) zero.
inline double z_function(std::int64_t tau, std::int64_t phi, const ModelParams& p) {
  std::optional<double> z;
  if (p.exact()) {
    detail::LikelihoodTable<detail::ExactKernel> table(p, std::max<std::int64_t>(tau, 0));
    z = table.z(tau, phi);
  } else {
    detail::LikelihoodTable<detail::LogSpaceKernel> table(p, std::max<std::int64_t>(tau, 0));
    z = table.z(tau, phi);
  }
  if (!z) throw std::domain_error("z_function: Lambda1 vanishes at this (tau, phi)");
  return *z;
}

}  // namespace gbda
