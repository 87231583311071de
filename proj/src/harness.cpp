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

#include "repbandit/harness.hpp"

#include <algorithm>
#include <cmath>

namespace repbandit {
namespace {

// Role codes stored in the arm field of seed-derivation labels.
constexpr std::uint64_t kTrialXi = 0;
constexpr std::uint64_t kTrialEnv = 1;
constexpr std::uint64_t kPairXi = 2;
constexpr std::uint64_t kPairEnv = 3;

std::uint64_t child_seed(std::uint64_t master, std::uint64_t role, std::uint64_t index, std::uint64_t run) {
  return RandomSource(master).derive_seed(
      {StreamPurpose::kSeedDerivation, StreamLabel::kNone, role, run, index});
}

EpochMonitor check_epoch(const InstanceSpec& spec, const OracleSolution& oracle, AlgorithmKind kind,
                         const EpochRecord& record) {
  EpochMonitor mon;
  const bool constrained = kind == AlgorithmKind::kDeboraS || kind == AlgorithmKind::kDeboraH;
  for (std::size_t a = 0; a < spec.num_arms; ++a) {
    if (record.counts_at_start[a] == 0) continue;
    if (std::abs(record.r_hat[a] - spec.reward_means[a]) > record.zeta[a]) mon.clean = false;
    if (!constrained) continue;
    for (std::size_t i = 0; i < spec.num_constraints; ++i) {
      if (std::abs(record.g_hat[i][a] - spec.cost_means[i][a]) > record.zeta[a]) mon.clean = false;
    }
  }
  if (constrained) {
    for (std::size_t i = 0; i < spec.num_constraints; ++i) {
      double lower = 0.0;
      for (std::size_t a = 0; a < spec.num_arms; ++a) {
        lower += (record.g_hat[i][a] - record.zeta[a]) * oracle.x_star[a];
      }
      if (lower > spec.thresholds[i] + kMonitorTolerance) mon.contains_x_star = false;
    }
  }
  return mon;
}

}  // namespace

TrialSeeds trial_seeds(std::uint64_t master_seed, std::uint64_t index) {
  return {child_seed(master_seed, kTrialXi, index, 0), child_seed(master_seed, kTrialEnv, index, 0)};
}

PairSeeds pair_seeds(std::uint64_t master_seed, std::uint64_t pair) {
  return {child_seed(master_seed, kPairXi, pair, 0), child_seed(master_seed, kPairEnv, pair, 0),
          child_seed(master_seed, kPairEnv, pair, 1)};
}

TrialLog run_trial(const InstanceSpec& spec, const OracleSolution& oracle, AlgorithmKind kind,
                   const ReplicabilityTarget& target, std::uint64_t xi_seed, std::uint64_t env_seed) {
  AlgorithmSettings settings{target, spec.horizon, xi_seed};
  auto algo = make_algorithm(kind, spec, oracle, settings);
  const RandomSource env(env_seed);
  const std::size_t k = spec.num_arms;
  const std::size_t m = spec.num_constraints;

  TrialLog log;
  log.algorithm = kind;
  log.xi_seed = xi_seed;
  log.env_seed = env_seed;
  log.rounds.reserve(spec.horizon);
  TrialSummary& sum = log.summary;
  sum.violation_per_constraint.assign(m, 0.0);

  std::vector<std::uint64_t> counts(k, 0);
  std::uint64_t last_epoch = 0;
  for (std::uint64_t t = 1; t <= spec.horizon; ++t) {
    const Decision decision = algo->decide(t);
    const Strategy& x = algo->current_strategy();
    if (log.strategies.empty() || decision.epoch != last_epoch) log.strategies.push_back(x);
    last_epoch = decision.epoch;

    if (is_epoch_based(kind)) {
      const EpochRecord& rec = algo->epochs().back();
      for (std::size_t a = 0; a < k; ++a) {
        const std::uint64_t start = rec.counts_at_start[a];
        if (counts[a] < start || counts[a] > std::max<std::uint64_t>(2 * start, 1)) sum.doubling_ok = false;
      }
    }

    RoundRecord rr;
    rr.t = t;
    rr.epoch = decision.epoch;
    rr.strategy_index = log.strategies.size() - 1;
    rr.action = decision.arm;
    Feedback fb = sample_feedback(spec, decision.arm, env, t);
    rr.reward = fb.reward;
    rr.costs = fb.costs;
    rr.inst_regret = instant_regret(spec, oracle, x);
    rr.inst_violation = instant_violation(spec, x);
    sum.regret += rr.inst_regret;
    for (std::size_t i = 0; i < m; ++i) {
      sum.violation_per_constraint[i] += rr.inst_violation[i];
      if (expected_cost(spec, i, x) > spec.thresholds[i] + kMonitorTolerance) sum.any_unsafe_round = true;
    }
    algo->observe(decision.arm, fb);
    ++counts[decision.arm];
    log.rounds.push_back(std::move(rr));
  }
  for (double v : sum.violation_per_constraint) sum.violation = std::max(sum.violation, v);

  log.epochs = algo->epochs();
  if (is_epoch_based(kind)) {
    sum.last_epoch = log.epochs.back().index;
    sum.epoch_bound = epoch_bound(k, spec.horizon);
    const double sigma_cap = 1.0 / (1.0 + oracle.lambda_min);
    for (const EpochRecord& rec : log.epochs) {
      EpochMonitor mon = check_epoch(spec, oracle, kind, rec);
      sum.clean_event = sum.clean_event && mon.clean;
      sum.optimistic_set_ok = sum.optimistic_set_ok && mon.contains_x_star;
      if (rec.fallback) ++sum.fallbacks;
      sum.max_sigma = std::max(sum.max_sigma, rec.sigma);
      if (kind == AlgorithmKind::kDeboraH && !(rec.sigma >= 0.0 && rec.sigma <= sigma_cap)) sum.sigma_ok = false;
      log.monitors.push_back(mon);
    }
    for (RoundRecord& rr : log.rounds) rr.clean = log.monitors[rr.epoch].clean;
  }
  return log;
}

TrialLog run_trial(const InstanceSpec& spec, AlgorithmKind kind, const ReplicabilityTarget& target,
                   std::uint64_t xi_seed, std::uint64_t env_seed) {
  return run_trial(spec, solve_oracle(spec), kind, target, xi_seed, env_seed);
}

std::vector<TrialLog> run_batch(const InstanceSpec& spec, const OracleSolution& oracle, AlgorithmKind kind,
                                const ReplicabilityTarget& target, std::uint64_t trials, std::uint64_t master_seed,
                                unsigned threads) {
  std::function<TrialLog(std::uint64_t)> fn = [&](std::uint64_t i) {
    const TrialSeeds seeds = trial_seeds(master_seed, i);
    return run_trial(spec, oracle, kind, target, seeds.xi, seeds.env);
  };
  return parallel_map(trials, threads, fn);
}

ReplicabilityReport run_replicability_experiment(const InstanceSpec& spec, const OracleSolution& oracle,
                                                 AlgorithmKind kind, const ReplicabilityTarget& target,
                                                 std::uint64_t n_pairs, std::uint64_t master_seed, unsigned threads) {
  if (n_pairs < 1) throw ValidationError("replicability experiment needs at least one pair");
  std::function<PairOutcome(std::uint64_t)> fn = [&](std::uint64_t p) {
    PairOutcome out;
    out.pair = p;
    out.seeds = pair_seeds(master_seed, p);
    const TrialLog a = run_trial(spec, oracle, kind, target, out.seeds.xi, out.seeds.env_a);
    const TrialLog b = run_trial(spec, oracle, kind, target, out.seeds.xi, out.seeds.env_b);
    for (std::uint64_t t = 1; t <= spec.horizon; ++t) {
      if (out.strategies_match && !(a.strategy_at(t) == b.strategy_at(t))) {
        out.strategies_match = false;
        out.first_divergence = t;
      }
      if (a.rounds[t - 1].action != b.rounds[t - 1].action) out.actions_match = false;
    }
    out.first = a.summary;
    out.second = b.summary;
    return out;
  };

  ReplicabilityReport report;
  report.algorithm = kind;
  report.pairs = n_pairs;
  report.rho_target = target.rho;
  report.delta = target.delta;
  report.outcomes = parallel_map(n_pairs, threads, fn);
  for (const PairOutcome& o : report.outcomes) {
    if (!o.strategies_match) ++report.mismatches;
    if (!o.actions_match) ++report.action_mismatches;
  }
  const double n = static_cast<double>(n_pairs);
  report.rate = static_cast<double>(report.mismatches) / n;
  report.action_rate = static_cast<double>(report.action_mismatches) / n;
  report.binomial_sigma = std::sqrt(target.rho * (1.0 - target.rho) / n);
  report.threshold = target.rho + 3.0 * report.binomial_sigma;
  return report;
}

}  // namespace repbandit
