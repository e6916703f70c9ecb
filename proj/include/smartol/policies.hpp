#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "smartol/core.hpp"
#include "smartol/numeric.hpp"

namespace smartol {

// Follow The Leader: uniform over the current argmin of L_{t-1}. At t = 1
// every expert ties at zero, so the first action is uniform over all m.
class FtlPolicy : public Policy {
 public:
  explicit FtlPolicy(std::size_t m) : totals_(m) {}

  ActionDistribution act() override {
    return ActionDistribution::uniform_over(totals_.argmin_set(), totals_.experts());
  }

  void observe(std::span<const double> loss_row) override { totals_.observe(loss_row); }

  const CumulativeLoss& totals() const { return totals_; }

 private:
  CumulativeLoss totals_;
};

inline ActionDistribution ftl_action(const CumulativeLoss& totals) {
  return ActionDistribution::uniform_over(totals.argmin_set(), totals.experts());
}

// Exponential weights over cumulative losses: w_j proportional to
// exp(-eta_t * L_{t-1,j}). Either a fixed rate, or the anytime small-loss
// schedule eta_t = ln(1 + sqrt(2 ln m / guess)) where the guess starts at
// ln m and doubles whenever the best cumulative loss outgrows it.
class HedgePolicy : public Policy {
 public:
  HedgePolicy(std::size_t m, double eta)
      : totals_(m), small_loss_(false), eta_(eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("HedgePolicy: eta must be > 0");
  }

  static HedgePolicy small_loss(std::size_t m) { return HedgePolicy(m); }

  // Worst-case tuning for a known horizon: eta = sqrt(8 ln m / n), giving
  // regret at most sqrt(n ln m / 2) on any sequence.
  static HedgePolicy worst_case(std::size_t m, std::size_t horizon) {
    if (horizon < 1) throw std::invalid_argument("HedgePolicy: horizon must be >= 1");
    return HedgePolicy(m, std::sqrt(8.0 * std::log(static_cast<double>(m)) /
                                    static_cast<double>(horizon)));
  }

  double learning_rate() const {
    if (!small_loss_) return eta_;
    return std::log(1.0 + std::sqrt(2.0 * std::log(static_cast<double>(totals_.experts())) /
                                    guess_));
  }

  ActionDistribution act() override {
    double eta = learning_rate();
    const auto& L = totals_.totals();
    double mn = totals_.min_value();
    std::vector<double> w(L.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < L.size(); ++j) {
      w[j] = std::exp(-eta * (L[j] - mn));
      sum += w[j];
    }
    for (double& x : w) x /= sum;
    return ActionDistribution(std::move(w));
  }

  void observe(std::span<const double> loss_row) override {
    totals_.observe(loss_row);
    if (small_loss_)
      while (totals_.min_value() > guess_) guess_ *= 2.0;
  }

 private:
  explicit HedgePolicy(std::size_t m)
      : totals_(m), small_loss_(true), guess_(std::log(static_cast<double>(m))) {}

  CumulativeLoss totals_;
  bool small_loss_;
  double eta_ = 0.0;
  double guess_ = 0.0;
};

// Exact minimax binary predictor for a known horizon n, realizing total loss
// min{#1s, #0s} + f_n on every sequence. The prediction is the exact
// binomial expectation over the unseen fair bits,
//   a_t = (1 + E[m(s+B)] - E[m(s+1+B)]) / 2,  B ~ Binomial(n-t, 1/2),
// with m(k) = min{k, n-k}; no Monte Carlo anywhere. Each round rebuilds the
// binomial PMF in O(n), so a full run costs O(n^2); horizons are capped at
// 20000 to keep that tractable.
class CoverPolicy : public Policy {
 public:
  static constexpr std::size_t kMaxHorizon = 20000;

  explicit CoverPolicy(std::size_t horizon) : n_(horizon) {
    if (horizon < 1) throw std::invalid_argument("CoverPolicy: horizon must be >= 1");
    if (horizon > kMaxHorizon)
      throw std::invalid_argument("CoverPolicy: exact predictor capped at n <= 20000");
  }

  // phi_t(y^{t-1} 0) - phi_t(y^{t-1} 1): the gap between the conditional
  // expected losses after appending a 0 vs a 1. Stability of the loss
  // profile is exactly |gap| <= 1.
  double phi_gap() const {
    if (t_ > n_) throw std::out_of_range("CoverPolicy: past end of horizon");
    std::int64_t rest = static_cast<std::int64_t>(n_ - t_);
    auto pmf = binomial_half_pmf(rest);
    KahanSum if_zero, if_one;
    for (std::int64_t j = 0; j <= rest; ++j) {
      if_zero.add(pmf[j] * minority(ones_ + j));
      if_one.add(pmf[j] * minority(ones_ + 1 + j));
    }
    return if_zero.value() - if_one.value();
  }

  // Probability placed on bit 1 for the upcoming round.
  double prediction() const {
    double a = 0.5 * (1.0 + phi_gap());
    return std::min(1.0, std::max(0.0, a));
  }

  ActionDistribution act() override {
    double a = prediction();
    return ActionDistribution({1.0 - a, a});
  }

  void observe(std::span<const double> loss_row) override {
    if (loss_row.size() != 2 ||
        (loss_row[0] != 0.0 && loss_row[0] != 1.0) ||
        loss_row[1] != 1.0 - loss_row[0])
      throw std::invalid_argument("CoverPolicy: expects binary rows (y, 1-y)");
    ones_ += static_cast<std::int64_t>(loss_row[0]);
    ++t_;
  }

  std::size_t horizon() const { return n_; }
  std::size_t round() const { return t_; }

 private:
  double minority(std::int64_t k) const {
    return static_cast<double>(std::min(k, static_cast<std::int64_t>(n_) - k));
  }

  std::size_t n_;
  std::size_t t_ = 1;
  std::int64_t ones_ = 0;
};

inline double cover_action(const CoverPolicy& state) { return state.prediction(); }

// f_n = E|sum of n fair signs| / 2, evaluated through the exact binomial sum
// 2^{-n-1} sum_k |2k - n| C(n,k) in log space. This is the minimax regret of
// binary prediction at horizon n; f_n ~ sqrt(n / 2 pi).
inline double rademacher_fn(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("rademacher_fn: n must be >= 1");
  KahanSum sum;
  for (std::int64_t k = 0; k <= n; ++k) {
    std::int64_t dev = std::llabs(2 * k - n);
    if (dev == 0) continue;
    sum.add(static_cast<double>(dev) *
            std::exp(log_binom(n, k) - static_cast<double>(n) * std::numbers::ln2));
  }
  return 0.5 * sum.value();
}

}  // namespace smartol
