#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "smartol/core.hpp"
#include "smartol/numeric.hpp"
#include "smartol/policies.hpp"

namespace smartol {

// Anytime FTL regret Sigma_t: adapted (a function of the observed prefix
// only), nondecreasing, and equal to Reg(FTL, l^t) after t rounds.
class RegretTrace {
 public:
  RegretTrace() : values_{0.0} {}

  void push(double increment) { values_.push_back(values_.back() + increment); }

  double current() const { return values_.back(); }
  double at(std::size_t t) const { return values_.at(t); }
  std::size_t rounds() const { return values_.size() - 1; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;  // values_[t] = Sigma_t, values_[0] = 0
};

// Observes a loss row and returns the trace increment
// L_t(a*_{t-1}) - L_t(a*_t), i.e. the new cumulative loss averaged over the
// previous argmin set minus the new minimum.
inline double trace_update(RegretTrace& trace, CumulativeLoss& totals,
                           std::span<const double> loss_row) {
  auto prev_argmin = totals.argmin_set();
  totals.observe(loss_row);
  double inc = leader_change_increment(totals, prev_argmin);
  trace.push(inc);
  return inc;
}

// Inverse-CDF draw for the randomized switching threshold:
// theta = g_n ln(1 + (e-1) U), so that P[theta <= x] = (e^{x/g_n}-1)/(e-1).
inline double sample_threshold(double g_n, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("sample_threshold: U outside [0,1]");
  if (!(g_n >= 0.0)) throw std::invalid_argument("sample_threshold: g(n) must be >= 0");
  return g_n * std::log(1.0 + (std::numbers::e - 1.0) * u);
}

struct SmartConfig {
  enum class Threshold { kDeterministic, kRandomized };

  Threshold mode = Threshold::kDeterministic;
  // Worst-case regret bound of alg_wc as a nondecreasing, nonnegative
  // function of the horizon.
  std::function<double(std::size_t)> worst_case_bound;
  // Fresh reference policy for a remaining horizon and expert count.
  std::function<std::unique_ptr<Policy>(std::size_t horizon, std::size_t m)> make_alg_wc;
  std::uint64_t seed = 0;
};

// Play FTL while the anytime regret trace stays at or below the threshold;
// on the first violation, hand the remaining rounds to a freshly constructed
// alg_wc that sees only the losses from the switch onward. At most one
// switch ever happens. The trace keeps updating afterwards (the small-loss
// variant shares this machinery) but no longer affects play.
class SmartPolicy : public Policy {
 public:
  SmartPolicy(std::size_t n, std::size_t m, const SmartConfig& cfg)
      : n_(n), totals_(m), make_wc_(cfg.make_alg_wc) {
    double g_n = cfg.worst_case_bound(n);
    if (!(g_n >= 0.0)) throw std::invalid_argument("SmartPolicy: g(n) must be >= 0");
    if (cfg.mode == SmartConfig::Threshold::kDeterministic) {
      theta_ = g_n;
    } else {
      std::mt19937_64 rng(cfg.seed);
      theta_ = sample_threshold(g_n, canonical_u01(rng()));
    }
  }

  ActionDistribution act() override {
    std::size_t t = totals_.round() + 1;  // upcoming round
    if (!wc_ && t <= n_ && trace_.current() > theta_) {
      switch_time_ = t - 1;  // last round FTL played
      wc_ = make_wc_(n_ - *switch_time_, totals_.experts());
    }
    if (wc_) return wc_->act();
    return ActionDistribution::uniform_over(totals_.argmin_set(), totals_.experts());
  }

  void observe(std::span<const double> loss_row) override {
    trace_update(trace_, totals_, loss_row);
    if (wc_) wc_->observe(loss_row);
  }

  std::vector<std::size_t> switch_times() const override {
    if (switch_time_) return {*switch_time_};
    return {};
  }

  double threshold() const { return theta_; }
  const RegretTrace& trace() const { return trace_; }

 private:
  std::size_t n_;
  CumulativeLoss totals_;
  std::function<std::unique_ptr<Policy>(std::size_t, std::size_t)> make_wc_;
  double theta_ = 0.0;
  RegretTrace trace_;
  std::unique_ptr<Policy> wc_;
  std::optional<std::size_t> switch_time_;
};

inline RunRecord smart_run(const LossMatrix& losses, const SmartConfig& cfg) {
  SmartPolicy policy(losses.rounds(), losses.experts(), cfg);
  RunRecord rec = run_policy(policy, losses);
  rec.threshold = policy.threshold();
  return rec;
}

struct RandomizedSummary {
  double mean_regret = 0.0;
  double stddev_regret = 0.0;  // sample standard deviation
  double mean_threshold = 0.0;
  std::size_t draws = 0;
  std::size_t switched = 0;  // draws that actually switched
};

// Mean regret of randomized-threshold runs over many draws. The FTL prefix
// losses and the trace are fixed across draws, and a draw's regret depends
// on theta only through the switch round, so suffix costs are computed once
// per distinct switch round and reused.
inline RandomizedSummary smart_randomized_summary(const LossMatrix& losses,
                                                  const SmartConfig& cfg,
                                                  std::size_t draws) {
  const std::size_t n = losses.rounds(), m = losses.experts();
  double g_n = cfg.worst_case_bound(n);

  FtlPolicy ftl(m);
  CumulativeLoss totals(m);
  RegretTrace trace;
  std::vector<double> ftl_prefix_loss(n + 1, 0.0);  // sum of FTL round losses
  for (std::size_t t = 0; t < n; ++t) {
    ftl_prefix_loss[t + 1] =
        ftl_prefix_loss[t] + expected_round_loss(ftl.act(), losses.row(t));
    ftl.observe(losses.row(t));
    trace_update(trace, totals, losses.row(t));
  }
  double best = totals.min_value();

  std::map<std::size_t, double> suffix_cost;  // switch round -> alg_wc total loss
  auto wc_loss_from = [&](std::size_t t_sw) {
    auto it = suffix_cost.find(t_sw);
    if (it != suffix_cost.end()) return it->second;
    auto wc = cfg.make_alg_wc(n - t_sw, m);
    double total = 0.0;
    for (std::size_t t = t_sw; t < n; ++t) {
      total += expected_round_loss(wc->act(), losses.row(t));
      wc->observe(losses.row(t));
    }
    suffix_cost.emplace(t_sw, total);
    return total;
  };

  const auto& sigma = trace.values();
  std::mt19937_64 rng(cfg.seed);
  RandomizedSummary out;
  out.draws = draws;
  double mean = 0.0, m2 = 0.0, mean_theta = 0.0;
  for (std::size_t d = 1; d <= draws; ++d) {
    double theta = sample_threshold(g_n, canonical_u01(rng()));
    // First t in [1, n-1] with Sigma_t > theta; past n-1 there is no round
    // left to switch into.
    auto it = std::upper_bound(sigma.begin() + 1, sigma.begin() + n, theta);
    double regret;
    if (it == sigma.begin() + n) {
      regret = ftl_prefix_loss[n] - best;
    } else {
      std::size_t t_sw = static_cast<std::size_t>(it - sigma.begin());
      ++out.switched;
      regret = ftl_prefix_loss[t_sw] + wc_loss_from(t_sw) - best;
    }
    double delta = regret - mean;
    mean += delta / static_cast<double>(d);
    m2 += delta * (regret - mean);
    mean_theta += (theta - mean_theta) / static_cast<double>(d);
  }
  out.mean_regret = mean;
  out.stddev_regret = draws > 1 ? std::sqrt(m2 / static_cast<double>(draws - 1)) : 0.0;
  out.mean_threshold = mean_theta;
  return out;
}

}  // namespace smartol
