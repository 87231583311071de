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

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "repbandit/algorithms.hpp"
#include "repbandit/environment.hpp"
#include "repbandit/strategy.hpp"

namespace repbandit {

/// Tolerance for per-round safety and optimistic-set containment checks.
inline constexpr double kMonitorTolerance = 1e-9;

struct RoundRecord {
  std::uint64_t t = 0;
  std::uint64_t epoch = 0;
  std::size_t strategy_index = 0;  // into TrialLog::strategies
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> costs;
  double inst_regret = 0.0;
  std::vector<double> inst_violation;
  bool clean = true;  // estimates of this round's epoch lie within their widths
};

/// Ground-truth checks evaluated on one epoch snapshot.
struct EpochMonitor {
  bool clean = true;
  /// x* satisfies (g_hat_i - zeta)^T x* <= alpha_i + tol; true when m = 0.
  bool contains_x_star = true;
};

struct TrialSummary {
  double regret = 0.0;     // R_T
  double violation = 0.0;  // V_T = max_i sum_t [g_i^T x_t - alpha_i]^+
  std::vector<double> violation_per_constraint;
  std::uint64_t last_epoch = 0;  // H
  std::uint64_t epoch_bound = 0;
  std::uint64_t fallbacks = 0;
  bool any_unsafe_round = false;
  bool clean_event = true;
  bool optimistic_set_ok = true;
  bool doubling_ok = true;
  bool sigma_ok = true;
  double max_sigma = 0.0;

  bool epoch_bound_ok() const { return last_epoch <= epoch_bound; }
};

struct TrialLog {
  AlgorithmKind algorithm = AlgorithmKind::kDebora;
  std::uint64_t xi_seed = 0;
  std::uint64_t env_seed = 0;
  std::vector<Strategy> strategies;
  std::vector<RoundRecord> rounds;
  std::vector<EpochRecord> epochs;
  std::vector<EpochMonitor> monitors;
  TrialSummary summary;

  const Strategy& strategy_at(std::uint64_t t) const { return strategies[rounds.at(t - 1).strategy_index]; }
};

struct TrialSeeds {
  std::uint64_t xi = 0;
  std::uint64_t env = 0;
};

/// Seeds of trial `index` of a batch run from one master seed.
TrialSeeds trial_seeds(std::uint64_t master_seed, std::uint64_t index);

/// Seeds of a replicability pair: one shared xi seed, two environment seeds.
struct PairSeeds {
  std::uint64_t xi = 0;
  std::uint64_t env_a = 0;
  std::uint64_t env_b = 0;
};
PairSeeds pair_seeds(std::uint64_t master_seed, std::uint64_t pair);

/// Plays spec.horizon rounds. Deterministic in (spec, kind, target, seeds).
TrialLog run_trial(const InstanceSpec& spec, const OracleSolution& oracle, AlgorithmKind kind,
                   const ReplicabilityTarget& target, std::uint64_t xi_seed, std::uint64_t env_seed);
TrialLog run_trial(const InstanceSpec& spec, AlgorithmKind kind, const ReplicabilityTarget& target,
                   std::uint64_t xi_seed, std::uint64_t env_seed);

/// Runs `trials` independent trials with seeds from trial_seeds(). Results
/// are in trial order regardless of `threads`.
std::vector<TrialLog> run_batch(const InstanceSpec& spec, const OracleSolution& oracle, AlgorithmKind kind,
                                const ReplicabilityTarget& target, std::uint64_t trials, std::uint64_t master_seed,
                                unsigned threads = 0);

struct PairOutcome {
  std::uint64_t pair = 0;
  PairSeeds seeds;
  bool strategies_match = true;
  bool actions_match = true;
  std::uint64_t first_divergence = 0;  // first round whose strategies differ, 0 if none
  TrialSummary first;
  TrialSummary second;
};

struct ReplicabilityReport {
  AlgorithmKind algorithm = AlgorithmKind::kDebora;
  std::uint64_t pairs = 0;
  std::uint64_t mismatches = 0;
  double rate = 0.0;
  std::uint64_t action_mismatches = 0;
  double action_rate = 0.0;
  double rho_target = 0.0;
  double delta = 0.0;
  /// sqrt(rho (1 - rho) / pairs).
  double binomial_sigma = 0.0;
  /// rho + 3 * binomial_sigma.
  double threshold = 0.0;
  std::vector<PairOutcome> outcomes;

  bool within_target() const { return rate <= threshold; }
};

/// For each pair: fixed xi, two independent environments, compare the full
/// strategy sequences round by round with exact equality.
ReplicabilityReport run_replicability_experiment(const InstanceSpec& spec, const OracleSolution& oracle,
                                                 AlgorithmKind kind, const ReplicabilityTarget& target,
                                                 std::uint64_t n_pairs, std::uint64_t master_seed,
                                                 unsigned threads = 0);

/// Applies fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency) and returns results in index order.
template <typename T>
std::vector<T> parallel_map(std::uint64_t n, unsigned threads, const std::function<T(std::uint64_t)>& fn);

}  // namespace repbandit

#include "repbandit/parallel_map.inl"
