#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace smartol {

// Compensated (Kahan) accumulator for long probability sums.
class KahanSum {
 public:
  void add(double x) {
    double y = x - carry_;
    double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double log_binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// PMF of Binomial(r, 1/2). Anchored at the mode via log-gamma, then spread
// outward by the C(r,j+1)/C(r,j) ratio; far tails underflow to zero.
inline std::vector<double> binomial_half_pmf(std::int64_t r) {
  if (r < 0) throw std::invalid_argument("binomial_half_pmf: r must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(r) + 1, 0.0);
  std::int64_t mode = r / 2;
  pmf[mode] = std::exp(log_binom(r, mode) - static_cast<double>(r) * std::numbers::ln2);
  for (std::int64_t j = mode; j < r; ++j)
    pmf[j + 1] = pmf[j] * static_cast<double>(r - j) / static_cast<double>(j + 1);
  for (std::int64_t j = mode; j > 0; --j)
    pmf[j - 1] = pmf[j] * static_cast<double>(j) / static_cast<double>(r - j + 1);
  return pmf;
}

// Gaussian upper tail Q(x) = P[N(0,1) > x].
inline double normal_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Uniform double in [0,1) from the top 53 bits of a 64-bit word. Fixed
// mapping so identical seeds reproduce identical streams on any platform.
inline double canonical_u01(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

}  // namespace smartol
