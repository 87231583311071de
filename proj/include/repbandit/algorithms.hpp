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
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "repbandit/environment.hpp"
#include "repbandit/random.hpp"
#include "repbandit/strategy.hpp"

namespace repbandit {

enum class AlgorithmKind { kDebora, kDeboraS, kDeboraH, kUcb1 };

/// Accepts debora | debora-s | debora-h | ucb1; throws ValidationError otherwise.
AlgorithmKind parse_algorithm_kind(std::string_view name);
std::string_view algorithm_name(AlgorithmKind kind);
bool is_epoch_based(AlgorithmKind kind);

/// Target replicability rho and failure probability delta, 0 < 2*delta < rho < 1.
struct ReplicabilityTarget {
  double delta = 0.05;
  double rho = 0.2;
  /// Throws ValidationError.
  void validate() const;
};

/// ceil(log2(T)) for T >= 1 (0 when T = 1).
std::uint64_t ceil_log2(std::uint64_t horizon);

/// Upper bound K * ceil(log2 T) on the last epoch index of every epoch-based run.
std::uint64_t epoch_bound(std::size_t num_arms, std::uint64_t horizon);

/// Per-estimator (delta', rho'). Unconstrained: divide by 2 K L. Constrained:
/// divide by 2 (m+1) K^2 L. L = max(ceil(log2 T), 1).
struct EstimatorSplit {
  double delta_prime = 0.0;
  double rho_prime = 0.0;
};
EstimatorSplit estimator_split(AlgorithmKind kind, const ReplicabilityTarget& target, std::size_t num_arms,
                               std::size_t num_constraints, std::uint64_t horizon);

/// Mixing weight on the strictly safe strategy for one epoch. `pessimistic_cost`
/// holds (g_hat_i + zeta)^T x_tilde, `margins` holds alpha_i - g_i^T x_diamond.
/// Returns 0 when no constraint is at risk.
double mixing_coefficient(const std::vector<double>& pessimistic_cost, const std::vector<double>& thresholds,
                          const std::vector<double>& margins);

/// Snapshot taken when an epoch opens.
struct EpochRecord {
  std::uint64_t index = 0;        // h
  std::uint64_t start_round = 1;  // t_h
  std::vector<std::uint64_t> counts_at_start;
  std::vector<double> r_hat;
  Matrix g_hat;  // m x K
  std::vector<double> zeta;
  Strategy x_tilde;   // optimistic strategy before mixing (hard variant)
  Strategy strategy;  // strategy played throughout the epoch
  double sigma = 0.0;
  bool fallback = false;
};

struct Decision {
  std::uint64_t epoch = 0;
  std::size_t arm = 0;
};

/// Step-driven bandit learner. Call decide(t) then observe(...) for
/// t = 1, 2, ..., T in order.
class BanditAlgorithm {
 public:
  virtual ~BanditAlgorithm() = default;

  virtual Decision decide(std::uint64_t round) = 0;
  virtual void observe(std::size_t arm, const Feedback& feedback) = 0;

  /// Strategy for the round last passed to decide().
  virtual const Strategy& current_strategy() const = 0;
  /// Epoch snapshots; empty for algorithms without epochs.
  virtual const std::vector<EpochRecord>& epochs() const = 0;
  virtual AlgorithmKind kind() const = 0;
};

/// Settings shared by every algorithm instance.
struct AlgorithmSettings {
  ReplicabilityTarget target;
  std::uint64_t horizon = 1;
  std::uint64_t xi_seed = 0;
};

/// Builds an algorithm for the instance. debora-h requires Slater
/// (throws ValidationError otherwise) and receives x_diamond from `oracle`.
std::unique_ptr<BanditAlgorithm> make_algorithm(AlgorithmKind kind, const InstanceSpec& spec,
                                                const OracleSolution& oracle, const AlgorithmSettings& settings);

}  // namespace repbandit
