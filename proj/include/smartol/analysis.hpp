#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "smartol/core.hpp"
#include "smartol/numeric.hpp"
#include "smartol/policies.hpp"
#include "smartol/sequences.hpp"

namespace smartol {

// Number of indices 0 <= j <= t with S_j = 0 for the walk S_j = 2*sum(y_i) - j.
// The origin j = 0 always counts, so the result is >= 1.
inline std::int64_t line_crossings(std::span<const std::uint8_t> bits) {
  std::int64_t walk = 0, count = 1;
  for (auto b : bits) {
    walk += b ? 1 : -1;
    if (walk == 0) ++count;
  }
  return count;
}

inline std::int64_t line_crossings(const BinarySequence& seq) {
  return line_crossings(std::span<const std::uint8_t>(seq.bits));
}

// p_{n,k} = P[c(eps^n) = k+1] = 2^{-(n-k)} C(n-k, n/2) for even n. Note the
// index offset: the crossing counter includes the origin, while k here does
// not, hence the k+1 on the left.
inline double pnk_exact(std::int64_t n, std::int64_t k) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("pnk_exact: n must be even and >= 2");
  if (k < 0) throw std::invalid_argument("pnk_exact: k must be >= 0");
  if (k > n / 2) return 0.0;  // C(n-k, n/2) vanishes past n/2
  return std::exp(static_cast<double>(k - n) * std::numbers::ln2 +
                  log_binom(n - k, n / 2));
}

// Exact distribution of crossing counts of a fair +-1 walk of even length n;
// p[k] = P[c = k+1] for k = 0..n/2.
struct CrossingDistribution {
  std::int64_t n = 0;
  std::vector<double> p;

  static CrossingDistribution exact(std::int64_t n) {
    CrossingDistribution out;
    out.n = n;
    out.p.resize(static_cast<std::size_t>(n / 2) + 1);
    for (std::int64_t k = 0; k <= n / 2; ++k) out.p[k] = pnk_exact(n, k);
    return out;
  }

  double total() const {
    KahanSum s;
    for (double v : p) s.add(v);
    return s.value();
  }
};

// Histogram of c(eps^n) - 1 over `samples` fair sequences; hist[k] counts
// walks with k crossings beyond the origin.
inline std::vector<std::int64_t> crossing_histogram(std::size_t n, std::size_t samples,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> hist(n / 2 + 2, 0);
  for (std::size_t s = 0; s < samples; ++s) {
    std::int64_t walk = 0, count = 0;
    for (std::size_t t = 0; t < n; ++t) {
      walk += (rng() & 1) ? 1 : -1;
      if (walk == 0) ++count;
    }
    ++hist[static_cast<std::size_t>(count)];
  }
  return hist;
}

struct PnkBracketReport {
  std::int64_t n = 0;
  double c = 0.0;
  double lower = 0.0, upper = 0.0;        // admissible bracket
  double min_ratio = 0.0, max_ratio = 0.0;  // observed extremes
  std::int64_t k_max = 0;
  bool within() const { return min_ratio >= lower && max_ratio <= upper; }
};

// Checks p_{n,k} / (sqrt(2/(n pi)) e^{-k^2/2n}) against the Stirling-based
// bracket e^{-16C^3/sqrt n} .. sqrt((1-C/sqrt n)/(1-2C/sqrt n)) e^{16C^3/sqrt n}
// for all k <= C sqrt(n). Requires even n >= 32 C^2.
inline PnkBracketReport pnk_bound_check(std::int64_t n, double c) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("pnk_bound_check: n must be even and >= 2");
  if (static_cast<double>(n) < 32.0 * c * c)
    throw std::invalid_argument("pnk_bound_check: need n >= 32 C^2");
  PnkBracketReport rep;
  rep.n = n;
  rep.c = c;
  double sqrt_n = std::sqrt(static_cast<double>(n));
  double slack = std::exp(16.0 * c * c * c / sqrt_n);
  rep.lower = 1.0 / slack;
  rep.upper = std::sqrt((1.0 - c / sqrt_n) / (1.0 - 2.0 * c / sqrt_n)) * slack;
  rep.k_max = static_cast<std::int64_t>(std::floor(c * sqrt_n));
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k <= rep.k_max; ++k) {
    double gauss = std::sqrt(2.0 / (static_cast<double>(n) * std::numbers::pi)) *
                   std::exp(-static_cast<double>(k) * static_cast<double>(k) /
                            (2.0 * static_cast<double>(n)));
    double ratio = pnk_exact(n, k) / gauss;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  return rep;
}

// 2 f_{n+1} / E[min{c(eps^n), 2 f_{n+1}}] for even n: the finite-n lower
// bound on the competitive ratio. The sum is truncated where the min
// saturates; the tail mass enters exactly through 1 - partial CDF.
inline double finite_n_ratio(std::int64_t n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("finite_n_ratio: n must be even and >= 2");
  double two_f = 2.0 * rademacher_fn(n + 1);
  KahanSum head, cdf;
  for (std::int64_t k = 0; static_cast<double>(k) + 1.0 < two_f && k <= n / 2; ++k) {
    double p = pnk_exact(n, k);
    head.add(static_cast<double>(k + 1) * p);
    cdf.add(p);
  }
  double expectation = head.value() + two_f * (1.0 - cdf.value());
  return two_f / expectation;
}

struct LowerBoundReport {
  double gamma_limit = 0.0;    // (1 - e^{-1/pi} + 2 Q(sqrt(2/pi)))^{-1}
  double exp_component = 0.0;  // e^{-1/pi}
  double q_component = 0.0;    // Q(sqrt(2/pi))
  std::vector<std::pair<std::int64_t, double>> finite_n_ratios;
};

// The limiting competitive-ratio lower bound, with Q computed through the
// complementary error function (no rational approximations), plus exact
// finite-n ratios for any requested horizons.
inline LowerBoundReport lower_bound_constant(std::span<const std::int64_t> ns = {}) {
  LowerBoundReport rep;
  rep.exp_component = std::exp(-1.0 / std::numbers::pi);
  rep.q_component = normal_q(std::sqrt(2.0 / std::numbers::pi));
  rep.gamma_limit = 1.0 / (1.0 - rep.exp_component + 2.0 * rep.q_component);
  for (std::int64_t n : ns) rep.finite_n_ratios.emplace_back(n, finite_n_ratio(n));
  return rep;
}

// Runs FTL and returns the largest gap, over all prefixes t, between the
// directly accounted regret sum_i <a_i, l_i> - min_j L_{t,j} and the
// leader-change trace sum_i (L_i(a*_{i-1}) - L_i(a*_i)).
inline double verify_ftl_identity(const LossMatrix& losses) {
  FtlPolicy ftl(losses.experts());
  CumulativeLoss totals(losses.experts());
  double played = 0.0, trace = 0.0, worst = 0.0;
  for (std::size_t t = 0; t < losses.rounds(); ++t) {
    ActionDistribution a = ftl.act();
    played += expected_round_loss(a, losses.row(t));
    ftl.observe(losses.row(t));
    auto prev_argmin = totals.argmin_set();
    totals.observe(losses.row(t));
    trace += leader_change_increment(totals, prev_argmin);
    worst = std::max(worst, std::abs((played - totals.min_value()) - trace));
  }
  return worst;
}

}  // namespace smartol
