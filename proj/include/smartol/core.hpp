#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace smartol {

inline constexpr double kSimplexTol = 1e-12;

// Losses for n rounds over m experts, every entry in [0,1]. Binary
// sequences embed as m = 2 with rows (y_t, 1 - y_t).
class LossMatrix {
 public:
  LossMatrix(std::size_t n, std::size_t m) : n_(n), m_(m), entries_(n * m, 0.0) {
    if (n_ < 1) throw std::invalid_argument("LossMatrix: need at least one round");
    if (m_ < 2) throw std::invalid_argument("LossMatrix: need at least two experts");
  }

  static LossMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("LossMatrix: need at least one round");
    LossMatrix out(rows.size(), rows.front().size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].size() != out.m_)
        throw std::invalid_argument("LossMatrix: row " + std::to_string(t + 1) +
                                    " has wrong width");
      for (std::size_t j = 0; j < out.m_; ++j) out.set(t, j, rows[t][j]);
    }
    return out;
  }

  std::size_t rounds() const { return n_; }
  std::size_t experts() const { return m_; }

  std::span<const double> row(std::size_t t) const {
    return {entries_.data() + t * m_, m_};
  }

  void set(std::size_t t, std::size_t j, double v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("LossMatrix: entry out of [0,1] at round " +
                                  std::to_string(t + 1));
    entries_[t * m_ + j] = v;
  }

  // Rounds [begin, end), 0-based.
  LossMatrix slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > n_) throw std::out_of_range("LossMatrix::slice");
    LossMatrix out(end - begin, m_);
    std::copy(entries_.begin() + begin * m_, entries_.begin() + end * m_,
              out.entries_.begin());
    return out;
  }

  LossMatrix prefix(std::size_t t) const { return slice(0, t); }

 private:
  std::size_t n_, m_;
  std::vector<double> entries_;
};

// A point on the m-simplex: the (possibly mixed) action played in a round.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> weights) : w_(std::move(weights)) {
    double sum = 0.0;
    for (double w : w_) {
      if (!(w >= 0.0 && w <= 1.0))
        throw std::invalid_argument("ActionDistribution: weight outside [0,1]");
      sum += w;
    }
    if (std::abs(sum - 1.0) > kSimplexTol)
      throw std::invalid_argument("ActionDistribution: weights sum to " +
                                  std::to_string(sum));
  }

  static ActionDistribution uniform(std::size_t m) {
    return ActionDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }

  static ActionDistribution uniform_over(const std::vector<std::size_t>& support,
                                         std::size_t m) {
    if (support.empty()) throw std::invalid_argument("ActionDistribution: empty support");
    std::vector<double> w(m, 0.0);
    double p = 1.0 / static_cast<double>(support.size());
    for (std::size_t j : support) w.at(j) = p;
    return ActionDistribution(std::move(w));
  }

  const std::vector<double>& weights() const { return w_; }
  double operator[](std::size_t j) const { return w_[j]; }
  std::size_t size() const { return w_.size(); }

 private:
  std::vector<double> w_;
};

// Per-expert running totals L_t, accumulated strictly in round order so that
// ties on symmetric inputs stay bit-reproducible across policies.
class CumulativeLoss {
 public:
  explicit CumulativeLoss(std::size_t m) : totals_(m, 0.0) {
    if (m < 2) throw std::invalid_argument("CumulativeLoss: need at least two experts");
  }

  void observe(std::span<const double> loss_row) {
    if (loss_row.size() != totals_.size())
      throw std::invalid_argument("CumulativeLoss: row width mismatch");
    for (std::size_t j = 0; j < totals_.size(); ++j) totals_[j] += loss_row[j];
    ++round_;
  }

  std::size_t round() const { return round_; }
  std::size_t experts() const { return totals_.size(); }
  const std::vector<double>& totals() const { return totals_; }

  double min_value() const { return *std::min_element(totals_.begin(), totals_.end()); }

  // Exact float equality; see hindsight_optimum.
  std::vector<std::size_t> argmin_set() const {
    double mv = min_value();
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < totals_.size(); ++j)
      if (totals_[j] == mv) out.push_back(j);
    return out;
  }

 private:
  std::vector<double> totals_;
  std::size_t round_ = 0;
};

// All indices attaining min_j L_j, plus the minimum. Ties are detected by
// exact equality of the accumulated floats; on half-integer binary sums this
// is lossless, which the lead-change identities rely on.
inline std::pair<std::vector<std::size_t>, double> hindsight_optimum(
    const CumulativeLoss& L) {
  return {L.argmin_set(), L.min_value()};
}

inline double expected_round_loss(const ActionDistribution& a,
                                  std::span<const double> loss_row) {
  if (a.size() != loss_row.size())
    throw std::invalid_argument("expected_round_loss: dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < loss_row.size(); ++j) s += a[j] * loss_row[j];
  return s;
}

// L_t averaged over a previous argmin set, minus min_j L_t[j]. This is the
// per-round growth of the anytime FTL regret; nonnegative up to rounding.
inline double leader_change_increment(const CumulativeLoss& L,
                                      const std::vector<std::size_t>& prev_argmin) {
  double s = 0.0;
  for (std::size_t j : prev_argmin) s += L.totals()[j];
  return s / static_cast<double>(prev_argmin.size()) - L.min_value();
}

// Stateful online policy: act() gives the action for the upcoming round,
// observe() then reveals that round's loss row. Single-owner; independent
// instances may run in parallel.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionDistribution act() = 0;
  virtual void observe(std::span<const double> loss_row) = 0;

  // Last round a switching policy played its lead policy before handing over
  // (1-based); empty for single-phase policies.
  virtual std::vector<std::size_t> switch_times() const { return {}; }
  // First round of each epoch for epoch-based policies; empty otherwise.
  virtual std::vector<std::size_t> epoch_starts() const { return {}; }
};

struct RunRecord {
  std::vector<ActionDistribution> actions;
  std::vector<double> round_losses;  // expected loss of the played action
  double total_loss = 0.0;
  double best_expert_loss = 0.0;
  double regret = 0.0;
  std::vector<std::size_t> switch_times;  // empty if the policy never switched
  std::vector<std::size_t> epoch_starts;
  double threshold = std::numeric_limits<double>::quiet_NaN();
};

// Drives the protocol: query the action before revealing row t, account the
// expected loss, then reveal the row. Regret is against the best fixed
// expert of the full matrix.
inline RunRecord run_policy(Policy& policy, const LossMatrix& losses) {
  const std::size_t n = losses.rounds(), m = losses.experts();
  RunRecord rec;
  rec.actions.reserve(n);
  rec.round_losses.reserve(n);
  CumulativeLoss totals(m);
  for (std::size_t t = 0; t < n; ++t) {
    ActionDistribution a = policy.act();
    if (a.size() != m)
      throw std::runtime_error("run_policy: invalid action at round " +
                               std::to_string(t + 1) + " (dimension " +
                               std::to_string(a.size()) + ", expected " +
                               std::to_string(m) + ")");
    double el = expected_round_loss(a, losses.row(t));
    rec.total_loss += el;
    rec.round_losses.push_back(el);
    rec.actions.push_back(std::move(a));
    policy.observe(losses.row(t));
    totals.observe(losses.row(t));
  }
  rec.best_expert_loss = totals.min_value();
  // Note the regret of a switching policy can be genuinely negative: no
  // fixed expert needs to be good when the leader changes mid-run.
  rec.regret = rec.total_loss - rec.best_expert_loss;
  rec.switch_times = policy.switch_times();
  rec.epoch_starts = policy.epoch_starts();
  return rec;
}

}  // namespace smartol
