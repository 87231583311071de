// Copyright 2026 The repbandit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repbandit/algorithms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "repbandit/estimator.hpp"
#include "repbandit/polytope.hpp"

namespace repbandit {

AlgorithmKind parse_algorithm_kind(std::string_view name) {
  if (name == "debora") return AlgorithmKind::kDebora;
  if (name == "debora-s") return AlgorithmKind::kDeboraS;
  if (name == "debora-h") return AlgorithmKind::kDeboraH;
  if (name == "ucb1") return AlgorithmKind::kUcb1;
  throw ValidationError("unknown algorithm \"" + std::string(name) + "\" (expected debora, debora-s, debora-h, ucb1)");
}

std::string_view algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kDebora: return "debora";
    case AlgorithmKind::kDeboraS: return "debora-s";
    case AlgorithmKind::kDeboraH: return "debora-h";
    case AlgorithmKind::kUcb1: return "ucb1";
  }
  return "?";
}

bool is_epoch_based(AlgorithmKind kind) { return kind != AlgorithmKind::kUcb1; }

void ReplicabilityTarget::validate() const {
  if (!(delta > 0.0 && 2.0 * delta < rho && rho < 1.0)) {
    throw ValidationError("delta and rho must satisfy 0 < 2*delta < rho < 1 (got delta=" + std::to_string(delta) +
                          ", rho=" + std::to_string(rho) + ")");
  }
}

std::uint64_t ceil_log2(std::uint64_t horizon) {
  if (horizon == 0) throw std::invalid_argument("ceil_log2: horizon must be positive");
  return static_cast<std::uint64_t>(std::bit_width(horizon - 1));
}

std::uint64_t epoch_bound(std::size_t num_arms, std::uint64_t horizon) {
  return static_cast<std::uint64_t>(num_arms) * ceil_log2(horizon);
}

EstimatorSplit estimator_split(AlgorithmKind kind, const ReplicabilityTarget& target, std::size_t num_arms,
                               std::size_t num_constraints, std::uint64_t horizon) {
  target.validate();
  const double k = static_cast<double>(num_arms);
  const double l = static_cast<double>(std::max<std::uint64_t>(ceil_log2(horizon), 1));
  double divisor = 2.0 * k * l;
  if (kind == AlgorithmKind::kDeboraS || kind == AlgorithmKind::kDeboraH) {
    divisor = 2.0 * static_cast<double>(num_constraints + 1) * k * k * l;
  }
  return {target.delta / divisor, target.rho / divisor};
}

double mixing_coefficient(const std::vector<double>& pessimistic_cost, const std::vector<double>& thresholds,
                          const std::vector<double>& margins) {
  double sigma = 0.0;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(pessimistic_cost[i] > thresholds[i])) continue;
    const double excess = std::min(pessimistic_cost[i], 1.0) - thresholds[i];
    sigma = std::max(sigma, excess / (excess + margins[i]));
  }
  return sigma;
}

namespace {

// State shared by the three epoch-based learners: pull counters, in-order
// running sums of observed signals, the current estimates and the epoch log.
class EpochLearner : public BanditAlgorithm {
 public:
  EpochLearner(AlgorithmKind kind, const InstanceSpec& spec, const AlgorithmSettings& settings)
      : kind_(kind),
        num_arms_(spec.num_arms),
        num_constraints_(kind == AlgorithmKind::kDebora ? 0 : spec.num_constraints),
        thresholds_(kind == AlgorithmKind::kDebora ? std::vector<double>{} : spec.thresholds),
        xi_(settings.xi_seed),
        split_(estimator_split(kind, settings.target, spec.num_arms, num_constraints_, settings.horizon)),
        counts_(num_arms_, 0),
        counts_at_start_(num_arms_, 0),
        reward_sums_(num_arms_, 0.0),
        cost_sums_(num_constraints_, std::vector<double>(num_arms_, 0.0)),
        r_hat_(num_arms_, 0.5),
        g_hat_(num_constraints_, std::vector<double>(num_arms_, 0.5)),
        zeta_(num_arms_, 0.0) {
    refresh_widths();
  }

  Decision decide(std::uint64_t round) override {
    if (round != next_round_) throw std::logic_error("decide: rounds must be consecutive starting at 1");
    if (awaiting_observation_) throw std::logic_error("decide: missing observe() for previous round");
    if (epoch_should_close()) open_epoch(round);
    ++next_round_;
    awaiting_observation_ = true;
    const Strategy& x = current_strategy();
    std::size_t arm = x.pure_arm();
    // Pure strategies need no draw; mixed ones consume the round's ξ substream.
    if (arm == x.size()) {
      UniformStream stream = xi_.derive_stream(
          {StreamPurpose::kActionSample, StreamLabel::kNone, StreamLabel::kNone, StreamLabel::kNone, round});
      arm = sample_categorical(stream, x.probabilities());
    }
    return {epoch_, arm};
  }

  void observe(std::size_t arm, const Feedback& feedback) override {
    if (!awaiting_observation_) throw std::logic_error("observe: no pending decision");
    awaiting_observation_ = false;
    ++counts_.at(arm);
    reward_sums_[arm] += feedback.reward;
    for (std::size_t i = 0; i < num_constraints_; ++i) cost_sums_[i][arm] += feedback.costs.at(i);
  }

  const Strategy& current_strategy() const override { return records_.back().strategy; }
  const std::vector<EpochRecord>& epochs() const override { return records_; }
  AlgorithmKind kind() const override { return kind_; }

 protected:
  virtual bool epoch_should_close() const {
    for (std::size_t a = 0; a < num_arms_; ++a) {
      if (counts_[a] >= std::max<std::uint64_t>(2 * counts_at_start_[a], 1)) return true;
    }
    return false;
  }

  // Recomputes estimates for the new epoch and selects its strategy.
  virtual void select(EpochRecord& record) = 0;

  void open_first_epoch() {
    EpochRecord record;
    record.index = 0;
    record.start_round = 1;
    record.counts_at_start = counts_at_start_;
    select(record);
    snapshot(record);
    records_.push_back(std::move(record));
  }

  void open_epoch(std::uint64_t round) {
    ++epoch_;
    counts_at_start_ = counts_;
    refresh_widths();
    EpochRecord record;
    record.index = epoch_;
    record.start_round = round;
    record.counts_at_start = counts_at_start_;
    select(record);
    snapshot(record);
    records_.push_back(std::move(record));
  }

  // Replicable estimate of one signal of one arm at the current epoch, with
  // an offset drawn from its own (epoch, arm, signal) ξ substream.
  double estimate(std::size_t arm, double sum, std::uint64_t constraint) const {
    const StreamLabel label{StreamPurpose::kGridOffset, epoch_, arm, constraint, StreamLabel::kNone};
    const double u = xi_.derive_stream(label).next_uniform();
    const auto params =
        RepMeanParams::for_sample_count(counts_[arm], split_.delta_prime, split_.rho_prime, u);
    return rep_mean_from_sum(sum, counts_[arm], params);
  }

  void estimate_reward(std::size_t arm) { r_hat_[arm] = estimate(arm, reward_sums_[arm], StreamLabel::kNone); }

  void estimate_costs(std::size_t arm) {
    for (std::size_t i = 0; i < num_constraints_; ++i) g_hat_[i][arm] = estimate(arm, cost_sums_[i][arm], i);
  }

  std::vector<double> optimistic_reward() const {
    std::vector<double> out(num_arms_);
    for (std::size_t a = 0; a < num_arms_; ++a) out[a] = r_hat_[a] + zeta_[a];
    return out;
  }

  // Strategy maximizing the optimistic reward over the optimistic safe set.
  // Falls back to the least-violating strategy if that set is empty.
  Strategy optimistic_strategy(bool& fallback) const {
    Matrix rows(num_constraints_, std::vector<double>(num_arms_));
    for (std::size_t i = 0; i < num_constraints_; ++i) {
      for (std::size_t a = 0; a < num_arms_; ++a) rows[i][a] = g_hat_[i][a] - zeta_[a];
    }
    SimplexPolytopeLP lp{optimistic_reward(), rows, thresholds_};
    if (auto best = solve(lp)) {
      fallback = false;
      return best->x;
    }
    fallback = true;
    return max_margin(rows, thresholds_, num_arms_).x;
  }

  AlgorithmKind kind_;
  std::size_t num_arms_;
  std::size_t num_constraints_;
  std::vector<double> thresholds_;
  RandomSource xi_;
  EstimatorSplit split_;

  std::uint64_t epoch_ = 0;
  std::uint64_t next_round_ = 1;
  bool awaiting_observation_ = false;
  std::vector<std::uint64_t> counts_;
  std::vector<std::uint64_t> counts_at_start_;
  std::vector<double> reward_sums_;
  Matrix cost_sums_;
  std::vector<double> r_hat_;
  Matrix g_hat_;
  std::vector<double> zeta_;
  std::vector<EpochRecord> records_;

 private:
  void refresh_widths() {
    for (std::size_t a = 0; a < num_arms_; ++a) {
      zeta_[a] = confidence_width(counts_at_start_[a], split_.delta_prime, split_.rho_prime);
    }
  }

  void snapshot(EpochRecord& record) const {
    record.r_hat = r_hat_;
    record.g_hat = g_hat_;
    record.zeta = zeta_;
  }
};

// Unconstrained: one arm per epoch; the epoch ends when that arm doubles.
class Debora final : public EpochLearner {
 public:
  Debora(const InstanceSpec& spec, const AlgorithmSettings& settings)
      : EpochLearner(AlgorithmKind::kDebora, spec, settings) {
    open_first_epoch();
  }

 private:
  bool epoch_should_close() const override {
    return counts_[arm_] >= std::max<std::uint64_t>(2 * counts_at_start_[arm_], 1);
  }

  void select(EpochRecord& record) override {
    if (record.index > 0) estimate_reward(arm_);
    std::size_t best = 0;
    for (std::size_t a = 1; a < num_arms_; ++a) {
      if (r_hat_[a] + zeta_[a] > r_hat_[best] + zeta_[best]) best = a;
    }
    arm_ = best;
    record.strategy = Strategy::unit(num_arms_, arm_);
    record.x_tilde = record.strategy;
  }

  std::size_t arm_ = 0;
};

// Soft and hard constrained variants. The hard one mixes the optimistic
// strategy with the strictly safe strategy x_diamond.
class ConstrainedDebora final : public EpochLearner {
 public:
  ConstrainedDebora(AlgorithmKind kind, const InstanceSpec& spec, const OracleSolution& oracle,
                    const AlgorithmSettings& settings)
      : EpochLearner(kind, spec, settings), x_diamond_(oracle.x_diamond) {
    if (kind == AlgorithmKind::kDeboraH) {
      require_slater(oracle);
      margins_ = oracle.margins(spec);
    }
    open_first_epoch();
  }

 private:
  bool hard() const { return kind_ == AlgorithmKind::kDeboraH; }

  void select(EpochRecord& record) override {
    if (record.index > 0) {
      for (std::size_t a = 0; a < num_arms_; ++a) {
        if (counts_[a] == 0) continue;
        estimate_reward(a);
        estimate_costs(a);
      }
    }
    bool fallback = false;
    Strategy x_tilde = optimistic_strategy(fallback);
    record.fallback = fallback;
    if (!hard()) {
      record.strategy = x_tilde;
      record.x_tilde = std::move(x_tilde);
      return;
    }

    double sigma = 0.0;
    if (record.index == 0) {
      for (std::size_t i = 0; i < num_constraints_; ++i) {
        const double excess = 1.0 - thresholds_[i];
        sigma = std::max(sigma, excess / (excess + margins_[i]));
      }
    } else {
      std::vector<double> pessimistic(num_constraints_);
      for (std::size_t i = 0; i < num_constraints_; ++i) {
        double p = 0.0;
        for (std::size_t a = 0; a < num_arms_; ++a) p += (g_hat_[i][a] + zeta_[a]) * x_tilde[a];
        pessimistic[i] = p;
      }
      sigma = mixing_coefficient(pessimistic, thresholds_, margins_);
    }
    record.sigma = sigma;
    record.strategy = Strategy::mix(sigma, x_diamond_, x_tilde);
    record.x_tilde = std::move(x_tilde);
  }

  Strategy x_diamond_;
  std::vector<double> margins_;
};

// UCB1 with round-robin initialization; not replicable.
class Ucb1 final : public BanditAlgorithm {
 public:
  explicit Ucb1(const InstanceSpec& spec)
      : num_arms_(spec.num_arms), counts_(num_arms_, 0), sums_(num_arms_, 0.0),
        strategy_(Strategy::unit(num_arms_, 0)) {}

  Decision decide(std::uint64_t round) override {
    if (round != next_round_++) throw std::logic_error("decide: rounds must be consecutive starting at 1");
    std::size_t arm = 0;
    if (round <= num_arms_) {
      arm = static_cast<std::size_t>(round - 1);
    } else {
      const double log_t = std::log(static_cast<double>(round));
      double best = -1.0;
      for (std::size_t a = 0; a < num_arms_; ++a) {
        const double n = static_cast<double>(counts_[a]);
        const double index = sums_[a] / n + std::sqrt(2.0 * log_t / n);
        if (index > best) {
          best = index;
          arm = a;
        }
      }
    }
    strategy_ = Strategy::unit(num_arms_, arm);
    return {round - 1, arm};
  }

  void observe(std::size_t arm, const Feedback& feedback) override {
    ++counts_.at(arm);
    sums_[arm] += feedback.reward;
  }

  const Strategy& current_strategy() const override { return strategy_; }
  const std::vector<EpochRecord>& epochs() const override { return no_epochs_; }
  AlgorithmKind kind() const override { return AlgorithmKind::kUcb1; }

 private:
  std::size_t num_arms_;
  std::uint64_t next_round_ = 1;
  std::vector<std::uint64_t> counts_;
  std::vector<double> sums_;
  Strategy strategy_;
  std::vector<EpochRecord> no_epochs_;
};

}  // namespace

std::unique_ptr<BanditAlgorithm> make_algorithm(AlgorithmKind kind, const InstanceSpec& spec,
                                                const OracleSolution& oracle, const AlgorithmSettings& settings) {
  if (settings.horizon < 1) throw ValidationError("horizon must be at least 1");
  switch (kind) {
    case AlgorithmKind::kDebora:
      return std::make_unique<Debora>(spec, settings);
    case AlgorithmKind::kDeboraS:
    case AlgorithmKind::kDeboraH:
      return std::make_unique<ConstrainedDebora>(kind, spec, oracle, settings);
    case AlgorithmKind::kUcb1:
      return std::make_unique<Ucb1>(spec);
  }
  throw std::logic_error("make_algorithm: unhandled kind");
}

}  // namespace repbandit
