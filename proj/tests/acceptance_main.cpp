// Acceptance suite: every criterion below runs at its stated tolerance and
// prints exactly one PASS/FAIL line. Exit code 0 iff all pass.
//
//   1  factor-2 bound of deterministic-threshold switching (Cover reference)
//   2  e/(e-1) bound of randomized thresholds, 10^4 draws per sequence
//   3  regret-identity oracle equivalence (direct run / trace / crossings)
//   4  exact minimax predictor: balance and stability over all short inputs
//   5  competitive-ratio lower-bound constant and finite-n ratios
//   6  crossing-distribution machinery (normalization, bracket, sampling)
//   7  epoch-doubling small-loss variant: explicit bound and epoch counts
//   8  single-switch and trace-adaptedness properties

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "smartol/analysis.hpp"
#include "smartol/core.hpp"
#include "smartol/policies.hpp"
#include "smartol/sequences.hpp"
#include "smartol/small_loss.hpp"
#include "smartol/smart.hpp"

using namespace smartol;

namespace {

struct Labeled {
  std::string label;
  double param = 0.0;  // p for bernoulli rows, c otherwise
  bool bernoulli = false;
  BinarySequence seq;
};

constexpr std::size_t kHorizon = 1000;

// 400 Bernoulli (p in {0.05,...,0.5} x 40 seeds) + 100 lead-change
// (c = 1..100) + alternating, all at n = 1000: 501 sequences.
std::vector<Labeled> corpus() {
  std::vector<Labeled> out;
  for (int pi = 1; pi <= 10; ++pi) {
    double p = 0.05 * pi;
    for (std::uint64_t seed = 0; seed < 40; ++seed)
      out.push_back({"bernoulli p=" + std::to_string(p) + " seed=" + std::to_string(seed),
                     p, true, gen_bernoulli(kHorizon, p, seed)});
  }
  for (std::size_t c = 1; c <= 100; ++c)
    out.push_back({"lead_change c=" + std::to_string(c), static_cast<double>(c), false,
                   gen_lead_change(kHorizon, c)});
  out.push_back({"alternating", static_cast<double>(kHorizon / 2), false,
                 gen_lead_change(kHorizon, kHorizon / 2)});
  return out;
}

SmartConfig cover_sqrt_config(std::uint64_t seed = 0,
                          SmartConfig::Threshold mode = SmartConfig::Threshold::kDeterministic) {
  SmartConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.worst_case_bound = [](std::size_t k) {
    return std::sqrt(static_cast<double>(k) / (2.0 * std::numbers::pi));
  };
  cfg.make_alg_wc = [](std::size_t horizon, std::size_t) {
    return std::make_unique<CoverPolicy>(horizon);
  };
  return cfg;
}

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("%s criterion %d (%s): %s [%.1fs]\n", pass ? "PASS" : "FAIL", index,
              name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --------------------------------------------------------------------------

void criterion1(const std::vector<Labeled>& corpus_seqs) {
  Timer timer;
  double theta = std::sqrt(static_cast<double>(kHorizon) / (2.0 * std::numbers::pi));
  double max_excess = -1e300;
  std::string worst;
  for (const auto& item : corpus_seqs) {
    auto losses = binary_to_losses(item.seq);
    FtlPolicy ftl(2);
    double ftl_regret = run_policy(ftl, losses).regret;
    auto rec = smart_run(losses, cover_sqrt_config());
    double excess = rec.regret - (2.0 * std::min(ftl_regret, theta) + 1.0);
    if (excess > max_excess) {
      max_excess = excess;
      worst = item.label;
    }
  }
  report(1, "deterministic threshold, factor 2", max_excess <= 1e-9,
         "max_excess=" + num(max_excess) + " runs=" +
             std::to_string(corpus_seqs.size()) + " worst=" + worst,
         timer.seconds());
}

void criterion2(const std::vector<Labeled>& corpus_seqs) {
  Timer timer;
  const std::size_t draws = 10000;
  double g_n = std::sqrt(static_cast<double>(kHorizon) / (2.0 * std::numbers::pi));
  // 20 sequences spread over the corpus families: one Bernoulli per p,
  // nine lead-change values, and the alternating input.
  std::vector<const Labeled*> picks;
  for (int pi = 1; pi <= 10; ++pi) picks.push_back(&corpus_seqs[(pi - 1) * 40]);
  for (int ci = 1; ci <= 9; ++ci) picks.push_back(&corpus_seqs[400 + 10 * ci - 1]);
  picks.push_back(&corpus_seqs[500]);

  double max_excess = -1e300;
  std::string worst;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto& item = *picks[i];
    auto losses = binary_to_losses(item.seq);
    FtlPolicy ftl(2);
    double ftl_regret = run_policy(ftl, losses).regret;
    auto cfg = cover_sqrt_config(9000 + i, SmartConfig::Threshold::kRandomized);
    auto summary = smart_randomized_summary(losses, cfg, draws);
    double sem = summary.stddev_regret / std::sqrt(static_cast<double>(draws));
    double bound = std::numbers::e / (std::numbers::e - 1.0) * std::min(ftl_regret, g_n) +
                   1.0 + 3.0 * sem;
    double excess = summary.mean_regret - bound;
    if (excess > max_excess) {
      max_excess = excess;
      worst = item.label;
    }
  }
  report(2, "randomized threshold, e/(e-1) in expectation", max_excess <= 0.0,
         "max_excess=" + num(max_excess) + " sequences=20 draws=10000 worst=" + worst,
         timer.seconds());
}

void criterion3() {
  Timer timer;
  double worst_binary = 0.0;
  for (int s = 0; s < 1000; ++s) {
    auto seq = gen_bernoulli(500, 0.5, 100000 + s);
    auto losses = binary_to_losses(seq);
    FtlPolicy ftl(2);
    auto rec = run_policy(ftl, losses);
    CumulativeLoss totals(2);
    RegretTrace trace;
    for (std::size_t t = 0; t < losses.rounds(); ++t)
      trace_update(trace, totals, losses.row(t));
    std::span<const std::uint8_t> prefix(seq.bits.data(), seq.size() - 1);
    double half_cross = 0.5 * static_cast<double>(line_crossings(prefix));
    worst_binary = std::max(worst_binary, std::abs(rec.regret - trace.current()));
    worst_binary = std::max(worst_binary, std::abs(rec.regret - half_cross));
  }

  std::mt19937_64 rng(424242);
  double worst_experts = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t m = std::vector<std::size_t>{2, 5, 10}[rep % 3];
    LossMatrix losses(200, m);
    for (std::size_t t = 0; t < 200; ++t)
      for (std::size_t j = 0; j < m; ++j) losses.set(t, j, canonical_u01(rng()));
    worst_experts = std::max(worst_experts, verify_ftl_identity(losses));
  }
  bool pass = worst_binary <= 1e-9 && worst_experts <= 1e-9;
  report(3, "regret identity, three routes", pass,
         "binary_max_gap=" + num(worst_binary) + " experts_max_gap=" + num(worst_experts),
         timer.seconds());
}

void criterion4() {
  Timer timer;
  double balance_gap = 0.0, stability_excess = -1.0;
  for (std::size_t n = 1; n <= 14; ++n) {
    double f = rademacher_fn(static_cast<std::int64_t>(n));
    for (std::uint64_t word = 0; word < (1ull << n); ++word) {
      CoverPolicy cover(n);
      double loss = 0.0;
      std::size_t ones = 0;
      for (std::size_t t = 0; t < n; ++t) {
        int bit = (word >> t) & 1;
        ones += bit;
        loss += std::abs(cover.prediction() - static_cast<double>(bit));
        double row[2] = {static_cast<double>(bit), 1.0 - static_cast<double>(bit)};
        cover.observe(std::span<const double>(row, 2));
      }
      balance_gap = std::max(
          balance_gap,
          std::abs(loss - (static_cast<double>(std::min(ones, n - ones)) + f)));
    }
    // The conditional-expectation gap depends on the prefix only through
    // (round, ones-count), so scanning states covers all prefixes.
    for (std::size_t t = 1; t <= n; ++t)
      for (std::size_t s = 0; s < t; ++s) {
        CoverPolicy probe(n);
        for (std::size_t i = 0; i + 1 < t; ++i) {
          double bit = i < s ? 1.0 : 0.0;
          double row[2] = {bit, 1.0 - bit};
          probe.observe(std::span<const double>(row, 2));
        }
        stability_excess = std::max(stability_excess, std::abs(probe.phi_gap()) - 1.0);
      }
  }
  bool pass = balance_gap <= 1e-9 && stability_excess <= 1e-12;
  report(4, "exact minimax predictor: balance and stability, n <= 14", pass,
         "balance_gap=" + num(balance_gap) + " stability_excess=" + num(stability_excess),
         timer.seconds());
}

void criterion5() {
  Timer timer;
  auto rep = lower_bound_constant();
  double ratio2 = finite_n_ratio(2);
  double ratio1e6 = finite_n_ratio(1000000);
  bool pass = std::abs(rep.gamma_limit - 1.4335) <= 5e-4 &&
              std::abs(ratio1e6 - rep.gamma_limit) <= 0.02 &&
              std::abs(ratio2 - 1.2) <= 1e-12;
  report(5, "lower-bound constant", pass,
         "gamma=" + num(rep.gamma_limit) + " ratio(2)=" + num(ratio2) +
             " ratio(1e6)=" + num(ratio1e6),
         timer.seconds());
}

void criterion6() {
  Timer timer;
  double worst_norm = 0.0;
  for (std::int64_t n = 2; n <= 2000; n += 2)
    worst_norm =
        std::max(worst_norm, std::abs(CrossingDistribution::exact(n).total() - 1.0));

  bool bracket_ok = pnk_bound_check(4096, 2.0).within() &&
                    pnk_bound_check(16384, 2.0).within();

  const std::size_t samples = 100000, n = 200;
  auto hist = crossing_histogram(n, samples, 271828);
  double worst_z = 0.0;
  for (std::int64_t k = 0; k <= 30; ++k) {
    double p = pnk_exact(n, k);
    double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    double emp = static_cast<double>(hist[k]) / static_cast<double>(samples);
    worst_z = std::max(worst_z, std::abs(emp - p) / sigma);
  }
  bool pass = worst_norm <= 1e-9 && bracket_ok && worst_z <= 3.0;
  report(6, "crossing distribution machinery", pass,
         "norm_gap=" + num(worst_norm) + " bracket_ok=" + std::to_string(bracket_ok) +
             " worst_z=" + num(worst_z),
         timer.seconds());
}

void criterion7(const std::vector<Labeled>& corpus_seqs) {
  Timer timer;
  std::vector<Labeled> inputs = corpus_seqs;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    inputs.push_back({"bernoulli p=0.1 extra seed=" + std::to_string(seed), 0.1, true,
                      gen_bernoulli(kHorizon, 0.1, 1000 + seed)});

  double max_bound_excess = -1e300, max_epoch_excess = -1e300;
  std::string worst;
  for (const auto& item : inputs) {
    auto losses = binary_to_losses(item.seq);
    FtlPolicy ftl(2);
    double ftl_regret = run_policy(ftl, losses).regret;
    auto rec = small_loss_smart_run(losses, {});
    double bound = small_loss_theorem_bound(ftl_regret, rec.best_expert_loss, 2,
                                            kDefaultSmallLossKappa);
    double excess = rec.regret - bound;
    if (excess > max_bound_excess) {
      max_bound_excess = excess;
      worst = item.label;
    }
    double z_last = static_cast<double>(rec.epoch_starts.size()) - 1.0;
    max_epoch_excess =
        std::max(max_epoch_excess, z_last - max_epoch_index(rec.best_expert_loss, 2));
  }

  // Qualitative check: on Bernoulli p <= 0.4 the switching policy tracks
  // FTL (mean regret within 2x + 1) while Reg(FTL) < g(n).
  double g_n = std::sqrt(static_cast<double>(kHorizon) / (2.0 * std::numbers::pi));
  bool tracks_ftl = true;
  for (int pi = 1; pi <= 8; ++pi) {
    double mean_smart = 0.0, mean_ftl = 0.0;
    for (int s = 0; s < 40; ++s) {
      const auto& item = corpus_seqs[(pi - 1) * 40 + s];
      auto losses = binary_to_losses(item.seq);
      FtlPolicy ftl(2);
      mean_ftl += run_policy(ftl, losses).regret;
      mean_smart += smart_run(losses, cover_sqrt_config()).regret;
    }
    mean_ftl /= 40.0;
    mean_smart /= 40.0;
    tracks_ftl = tracks_ftl && mean_ftl < g_n && mean_smart <= 2.0 * mean_ftl + 1.0;
  }

  bool pass = max_bound_excess <= 1e-9 && max_epoch_excess <= 1e-9 && tracks_ftl;
  report(7, "small-loss epoch doubling", pass,
         "max_bound_excess=" + num(max_bound_excess) + " max_epoch_excess=" +
             num(max_epoch_excess) + " tracks_ftl=" + std::to_string(tracks_ftl) +
             " worst=" + worst,
         timer.seconds());
}

void criterion8() {
  Timer timer;
  std::mt19937_64 rng(515151);
  bool single_switch = true, adapted = true;
  for (int rep = 0; rep < 200; ++rep) {
    std::size_t n = 50 + static_cast<std::size_t>(rng() % 250);
    LossMatrix losses = [&] {
      if (rep % 2 == 0) return binary_to_losses(gen_bernoulli(n, 0.5, rng()));
      std::size_t m = 2 + rng() % 4;
      LossMatrix out(n, m);
      for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < m; ++j) out.set(t, j, canonical_u01(rng()));
      return out;
    }();

    SmartConfig cfg;
    cfg.mode = rep % 3 == 0 ? SmartConfig::Threshold::kDeterministic
                            : SmartConfig::Threshold::kRandomized;
    cfg.seed = rng();
    cfg.worst_case_bound = [](std::size_t k) {
      return 0.25 * std::sqrt(static_cast<double>(k));
    };
    cfg.make_alg_wc = [](std::size_t horizon, std::size_t experts) {
      return std::make_unique<HedgePolicy>(HedgePolicy::worst_case(experts, horizon));
    };
    auto rec = smart_run(losses, cfg);
    single_switch = single_switch && rec.switch_times.size() <= 1;

    CumulativeLoss totals(losses.experts());
    RegretTrace full;
    for (std::size_t t = 0; t < n; ++t) trace_update(full, totals, losses.row(t));
    for (std::size_t cut = 1; cut <= n; ++cut) {
      CumulativeLoss part_totals(losses.experts());
      RegretTrace part;
      for (std::size_t t = 0; t < cut; ++t)
        trace_update(part, part_totals, losses.row(t));
      for (std::size_t t = 0; t <= cut; ++t)
        adapted = adapted && part.at(t) == full.at(t);
      if (!adapted) break;
    }
  }
  bool pass = single_switch && adapted;
  report(8, "single switch and adaptedness", pass,
         "single_switch=" + std::to_string(single_switch) +
             " adapted=" + std::to_string(adapted) + " instances=200",
         timer.seconds());
}

}  // namespace

int main() {
  Timer total;
  auto seqs = corpus();
  criterion1(seqs);
  criterion2(seqs);
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7(seqs);
  criterion8();
  std::printf("%s: %d/8 criteria passed [%.1fs total]\n",
              g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              8 - g_failures, total.seconds());
  return g_failures == 0 ? 0 : 1;
}
