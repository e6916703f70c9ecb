#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "smartol/policies.hpp"
#include "smartol/sequences.hpp"
#include "smartol/small_loss.hpp"

using namespace smartol;

TEST_CASE("small-loss bound values and algebra") {
  REQUIRE(small_loss_g(0.0, 2, 1.0) == Catch::Approx(std::numbers::ln2).margin(1e-12));
  REQUIRE(small_loss_g(8.0, 2, 1.0) ==
          Catch::Approx(2.0 * std::sqrt(16.0 * std::numbers::ln2) + std::numbers::ln2)
              .margin(1e-12));
  REQUIRE(small_loss_g(8.0, 2, 1.0) == Catch::Approx(7.3535).margin(1e-3));

  // Doubling L* scales the root term by sqrt(2).
  for (double lstar : {0.5, 3.0, 40.0}) {
    double lm = std::numbers::ln2;
    double root = small_loss_g(lstar, 2, 1.0) - lm;
    double root2 = small_loss_g(2.0 * lstar, 2, 1.0) - lm;
    REQUIRE(root2 == Catch::Approx(std::numbers::sqrt2 * root).margin(1e-12));
  }

  for (double lstar : {0.0, 1.0, 7.0, 7.5})
    REQUIRE(small_loss_g(lstar + 0.5, 3, 2.0) > small_loss_g(lstar, 3, 2.0));

  REQUIRE_THROWS_AS(small_loss_g(-1.0, 2, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(small_loss_g(1.0, 1, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(small_loss_g(1.0, 2, 0.0), std::invalid_argument);
}

TEST_CASE("all-ones input stays in a single epoch with FTL regret") {
  auto losses = binary_to_losses(gen_lead_change(800, 0));
  auto rec = small_loss_smart_run(losses, {});
  REQUIRE(rec.epoch_starts == std::vector<std::size_t>{1});
  REQUIRE(rec.switch_times.empty());
  REQUIRE(rec.regret == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("only one epoch exists whenever the best loss stays below log m") {
  for (std::size_t c : {0u, 1u}) {
    auto losses = binary_to_losses(gen_lead_change(600, c));
    auto rec = small_loss_smart_run(losses, {});
    if (rec.best_expert_loss <= std::numbers::ln2)
      REQUIRE(rec.epoch_starts.size() == 1);
  }
}

TEST_CASE("theorem-style bound and epoch count on Bernoulli and adversarial runs") {
  std::vector<BinarySequence> corpus;
  for (int s = 0; s < 10; ++s) corpus.push_back(gen_bernoulli(1000, 0.1, 300 + s));
  for (int s = 0; s < 5; ++s) corpus.push_back(gen_bernoulli(1000, 0.45, 400 + s));
  corpus.push_back(gen_lead_change(1000, 500));  // alternating
  corpus.push_back(gen_lead_change(1000, 100));
  for (const auto& seq : corpus) {
    auto losses = binary_to_losses(seq);
    FtlPolicy ftl(2);
    double ftl_regret = run_policy(ftl, losses).regret;
    auto rec = small_loss_smart_run(losses, {});
    double bound = small_loss_theorem_bound(ftl_regret, rec.best_expert_loss, 2,
                                            kDefaultSmallLossKappa);
    REQUIRE(rec.regret <= bound + 1e-9);
    REQUIRE(rec.regret <=
            small_loss_sqrt_bound(ftl_regret, rec.best_expert_loss, 2) + 1e-9);
    double z_last = static_cast<double>(rec.epoch_starts.size()) - 1.0;
    REQUIRE(z_last <= max_epoch_index(rec.best_expert_loss, 2) + 1e-9);
    REQUIRE(rec.switch_times.size() <= rec.epoch_starts.size());
  }
}

TEST_CASE("epoch segments decompose the regret as trace + reference + 1") {
  auto losses = binary_to_losses(gen_lead_change(1000, 500));
  auto rec = small_loss_smart_run(losses, {});
  REQUIRE(rec.epoch_starts.size() >= 2);  // alternating forces several epochs

  const std::size_t n = losses.rounds();
  // Windowed trace increments of the full-history leader.
  std::vector<double> inc(n + 1, 0.0);
  CumulativeLoss totals(2);
  RegretTrace trace;
  for (std::size_t t = 0; t < n; ++t) inc[t + 1] = trace_update(trace, totals, losses.row(t));

  double rhs = 0.0;
  for (std::size_t z = 0; z < rec.epoch_starts.size(); ++z) {
    std::size_t t_z = rec.epoch_starts[z];
    std::size_t t_next = z + 1 < rec.epoch_starts.size() ? rec.epoch_starts[z + 1] : n + 1;
    std::size_t tau = z < rec.switch_times.size() ? rec.switch_times[z] : t_next - 1;
    double window = 0.0;
    for (std::size_t t = t_z; t + 1 <= tau; ++t) window += inc[t];
    rhs += window + 1.0;
    if (tau + 1 <= t_next - 1) {
      HedgePolicy fresh = HedgePolicy::small_loss(2);
      rhs += run_policy(fresh, losses.slice(tau, t_next - 1)).regret;
    }
  }
  REQUIRE(rec.regret <= rhs + 1e-9);
}

TEST_CASE("epoch-doubling switcher tracks FTL on easy inputs") {
  for (double p : {0.05, 0.2, 0.35}) {
    double mean_smart = 0.0, mean_ftl = 0.0;
    for (int s = 0; s < 5; ++s) {
      auto losses = binary_to_losses(gen_bernoulli(1000, p, 500 + s));
      mean_smart += small_loss_smart_run(losses, {}).regret;
      FtlPolicy ftl(2);
      mean_ftl += run_policy(ftl, losses).regret;
    }
    mean_smart /= 5.0;
    mean_ftl /= 5.0;
    REQUIRE(mean_smart <= 2.0 * mean_ftl + 1.0);
  }
}
