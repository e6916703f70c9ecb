#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "smartol/analysis.hpp"
#include "smartol/core.hpp"
#include "smartol/policies.hpp"
#include "smartol/sequences.hpp"
#include "smartol/small_loss.hpp"
#include "smartol/smart.hpp"

// Machine-checkable invariant suites behind the `verify` subcommand. Each
// check reports the measured slack against its limit so a failure localizes
// immediately.

namespace smartol {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double limit = 0.0;
  bool pass = false;
};

namespace detail {

inline CheckResult check_le(std::string name, double measured, double limit) {
  return {std::move(name), measured, limit, measured <= limit};
}

inline LossMatrix random_losses(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  LossMatrix out(n, m);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < m; ++j) out.set(t, j, canonical_u01(rng()));
  return out;
}

inline std::vector<BinarySequence> verify_corpus() {
  std::vector<BinarySequence> corpus;
  const std::size_t n = 1000;
  for (std::size_t c : {1u, 5u, 10u, 25u, 50u, 100u, 250u, 500u})
    corpus.push_back(gen_lead_change(n, c));
  std::uint64_t seed = 0;
  for (double p : {0.05, 0.1, 0.25, 0.4, 0.45, 0.5})
    for (int s = 0; s < 5; ++s) corpus.push_back(gen_bernoulli(n, p, seed++));
  return corpus;
}

}  // namespace detail

inline std::vector<CheckResult> verify_identity() {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(20240601);

  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::size_t m = std::vector<std::size_t>{2, 5, 10}[i % 3];
    worst = std::max(worst, verify_ftl_identity(detail::random_losses(200, m, rng)));
  }
  out.push_back(detail::check_le("identity.lemma1_experts_max_gap", worst, 1e-9));

  double worst_direct = 0.0, worst_crossing = 0.0, worst_inc = 0.0;
  for (int i = 0; i < 300; ++i) {
    auto seq = gen_bernoulli(500, 0.5, 9000 + i);
    auto losses = binary_to_losses(seq);
    FtlPolicy ftl(2);
    auto rec = run_policy(ftl, losses);
    CumulativeLoss totals(2);
    RegretTrace trace;
    for (std::size_t t = 0; t < losses.rounds(); ++t) {
      double inc = trace_update(trace, totals, losses.row(t));
      worst_inc = std::max(worst_inc, -inc);
    }
    std::span<const std::uint8_t> prefix(seq.bits.data(), seq.size() - 1);
    double half_crossings = 0.5 * static_cast<double>(line_crossings(prefix));
    worst_direct = std::max(worst_direct, std::abs(rec.regret - trace.current()));
    worst_crossing = std::max(worst_crossing, std::abs(rec.regret - half_crossings));
  }
  out.push_back(detail::check_le("identity.binary_trace_gap", worst_direct, 1e-9));
  out.push_back(detail::check_le("identity.binary_crossing_gap", worst_crossing, 1e-9));
  out.push_back(detail::check_le("identity.trace_negative_increment", worst_inc, 1e-12));
  return out;
}

inline std::vector<CheckResult> verify_cover() {
  std::vector<CheckResult> out;
  double balance_gap = 0.0, spread = 0.0, stability_excess = 0.0;
  for (std::size_t n = 1; n <= 14; ++n) {
    double f = rademacher_fn(static_cast<std::int64_t>(n));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::uint64_t word = 0; word < (1ull << n); ++word) {
      BinarySequence seq;
      seq.bits.resize(n);
      std::size_t ones = 0;
      for (std::size_t t = 0; t < n; ++t) {
        seq.bits[t] = (word >> t) & 1;
        ones += seq.bits[t];
      }
      CoverPolicy cover(n);
      double loss = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        double a = cover.prediction();
        loss += std::abs(a - static_cast<double>(seq.bits[t]));
        double row[2] = {static_cast<double>(seq.bits[t]),
                         1.0 - static_cast<double>(seq.bits[t])};
        cover.observe(std::span<const double>(row, 2));
      }
      double target = static_cast<double>(std::min(ones, n - ones)) + f;
      balance_gap = std::max(balance_gap, std::abs(loss - target));
      double reg = loss - static_cast<double>(std::min(ones, n - ones));
      lo = std::min(lo, reg);
      hi = std::max(hi, reg);
    }
    spread = std::max(spread, hi - lo);
    // Stability gap |phi_t(y^{t-1}0) - phi_t(y^{t-1}1)| depends on the
    // prefix only through (t, #ones); 2a_t - 1 recovers it.
    for (std::size_t t = 1; t <= n; ++t)
      for (std::size_t s = 0; s + 1 <= t; ++s) {
        CoverPolicy probe(n);
        for (std::size_t i = 0; i + 1 < t; ++i) {
          double bit = i < s ? 1.0 : 0.0;
          double row[2] = {bit, 1.0 - bit};
          probe.observe(std::span<const double>(row, 2));
        }
        stability_excess =
            std::max(stability_excess, std::abs(probe.phi_gap()) - 1.0);
      }
  }
  out.push_back(detail::check_le("cover.balance_gap", balance_gap, 1e-9));
  out.push_back(detail::check_le("cover.equalizer_spread", spread, 1e-9));
  out.push_back(detail::check_le("cover.stability_excess", stability_excess, 1e-12));
  return out;
}

inline std::vector<CheckResult> verify_crossings() {
  std::vector<CheckResult> out;

  double worst_norm = 0.0;
  for (std::int64_t n = 2; n <= 2000; n += 2)
    worst_norm = std::max(worst_norm,
                          std::abs(CrossingDistribution::exact(n).total() - 1.0));
  out.push_back(detail::check_le("crossings.pnk_normalization_gap", worst_norm, 1e-9));

  double small_gap = std::max({std::abs(pnk_exact(4, 0) - 6.0 / 16.0),
                               std::abs(pnk_exact(4, 1) - 6.0 / 16.0),
                               std::abs(pnk_exact(4, 2) - 4.0 / 16.0),
                               std::abs(pnk_exact(2, 0) - 0.5)});
  out.push_back(detail::check_le("crossings.pnk_small_n_gap", small_gap, 1e-14));

  for (std::int64_t n : {4096, 16384}) {
    auto rep = pnk_bound_check(n, 2.0);
    double excess = std::max(rep.lower - rep.min_ratio, rep.max_ratio - rep.upper);
    out.push_back(detail::check_le(
        "crossings.stirling_bracket_n" + std::to_string(n), excess, 0.0));
  }

  const std::size_t samples = 100000, n = 200;
  auto hist = crossing_histogram(n, samples, 271828);
  double worst_z = 0.0;
  for (std::int64_t k = 0; k <= 30; ++k) {
    double p = pnk_exact(n, k);
    double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    double emp = static_cast<double>(hist[k]) / static_cast<double>(samples);
    worst_z = std::max(worst_z, std::abs(emp - p) / sigma);
  }
  out.push_back(detail::check_le("crossings.empirical_worst_z", worst_z, 3.0));

  std::int64_t mismatches = 0;
  for (std::size_t n2 : {4u, 7u, 10u, 51u, 100u, 1001u})
    for (std::size_t c = 0; 2 * c < n2; c += (n2 > 50 ? 7 : 1)) {
      auto seq = gen_lead_change(n2, c);
      std::span<const std::uint8_t> prefix(seq.bits.data(), seq.size() - 1);
      if (line_crossings(prefix) != static_cast<std::int64_t>(c) + 1) ++mismatches;
    }
  out.push_back(detail::check_le("crossings.lead_change_mismatches",
                                 static_cast<double>(mismatches), 0.0));
  return out;
}

inline std::vector<CheckResult> verify_lowerbound() {
  std::vector<CheckResult> out;
  auto rep = lower_bound_constant();
  out.push_back(detail::check_le("lowerbound.gamma_vs_stated",
                                 std::abs(rep.gamma_limit - 1.4335), 5e-4));
  double identity = rep.gamma_limit *
                    (1.0 - rep.exp_component + 2.0 * rep.q_component);
  out.push_back(detail::check_le("lowerbound.definition_identity",
                                 std::abs(identity - 1.0), 1e-12));
  out.push_back(detail::check_le("lowerbound.ratio_n2_vs_hand",
                                 std::abs(finite_n_ratio(2) - 1.2), 1e-12));
  out.push_back(detail::check_le("lowerbound.ratio_n1e6_vs_gamma",
                                 std::abs(finite_n_ratio(1000000) - rep.gamma_limit),
                                 0.02));
  double min_ratio = std::numeric_limits<double>::infinity();
  for (std::int64_t n : {2, 10, 100, 1000, 10000})
    min_ratio = std::min(min_ratio, finite_n_ratio(n));
  out.push_back(detail::check_le("lowerbound.ratio_below_one", 1.0 - min_ratio, 0.0));
  return out;
}

inline std::vector<CheckResult> verify_smallloss() {
  std::vector<CheckResult> out;
  auto corpus = detail::verify_corpus();
  double hedge_excess = -std::numeric_limits<double>::infinity();
  double theorem_excess = -std::numeric_limits<double>::infinity();
  double sqrt_bound_excess = -std::numeric_limits<double>::infinity();
  double epoch_excess = -std::numeric_limits<double>::infinity();
  for (const auto& seq : corpus) {
    auto losses = binary_to_losses(seq);

    HedgePolicy hedge = HedgePolicy::small_loss(2);
    auto hrec = run_policy(hedge, losses);
    hedge_excess = std::max(
        hedge_excess,
        hrec.regret - small_loss_g(hrec.best_expert_loss, 2, kDefaultSmallLossKappa));

    FtlPolicy ftl(2);
    auto frec = run_policy(ftl, losses);
    auto rec = small_loss_smart_run(losses, {});
    double bound = small_loss_theorem_bound(frec.regret, rec.best_expert_loss, 2,
                                            kDefaultSmallLossKappa);
    theorem_excess = std::max(theorem_excess, rec.regret - bound);
    sqrt_bound_excess = std::max(
        sqrt_bound_excess,
        rec.regret - small_loss_sqrt_bound(frec.regret, rec.best_expert_loss, 2));
    double z_last = static_cast<double>(rec.epoch_starts.size()) - 1.0;
    epoch_excess =
        std::max(epoch_excess, z_last - max_epoch_index(rec.best_expert_loss, 2));
  }
  out.push_back(detail::check_le("smallloss.hedge_bound_excess", hedge_excess, 0.0));
  out.push_back(detail::check_le("smallloss.theorem_bound_excess", theorem_excess, 1e-9));
  out.push_back(
      detail::check_le("smallloss.sqrt_bound_excess", sqrt_bound_excess, 1e-9));
  out.push_back(detail::check_le("smallloss.epoch_count_excess", epoch_excess, 1e-9));
  return out;
}

inline std::vector<CheckResult> verify_suite(const std::string& suite) {
  if (suite == "identity") return verify_identity();
  if (suite == "cover") return verify_cover();
  if (suite == "crossings") return verify_crossings();
  if (suite == "lowerbound") return verify_lowerbound();
  if (suite == "smallloss") return verify_smallloss();
  if (suite == "all") {
    std::vector<CheckResult> out;
    for (const char* s : {"identity", "cover", "crossings", "lowerbound", "smallloss"}) {
      auto part = verify_suite(s);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw std::invalid_argument("unknown suite '" + suite +
                              "' (expected identity|cover|crossings|lowerbound|"
                              "smallloss|all)");
}

}  // namespace smartol
