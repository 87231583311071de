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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "repbandit/polytope.hpp"
#include "repbandit/random.hpp"
#include "repbandit/strategy.hpp"

namespace repbandit {

/// Raised for malformed instances or configurations (CLI exit code 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DistributionFamily { kBernoulli };

/// Ground truth of a stochastic constrained bandit.
struct InstanceSpec {
  std::size_t num_arms = 0;
  std::size_t num_constraints = 0;
  std::vector<double> reward_means;
  Matrix cost_means;  // num_constraints rows of num_arms entries
  std::vector<double> thresholds;
  std::uint64_t horizon = 1;
  DistributionFamily family = DistributionFamily::kBernoulli;
  std::string name;

  /// Shape and range checks plus non-emptiness of the safe set. Throws
  /// ValidationError.
  void validate() const;
};

/// Parses the JSON instance format. Diagnostics carry `source:line:`.
InstanceSpec parse_instance(std::string_view json_text, const std::string& source = "<instance>");
InstanceSpec load_instance(const std::filesystem::path& path);
std::string instance_to_json(const InstanceSpec& spec);

struct OracleSolution {
  Strategy x_star;
  double opt_value = 0.0;
  /// Max-min margin strategy; equals x_star when there are no constraints.
  Strategy x_diamond;
  /// Costs g_i^T x_diamond.
  std::vector<double> lambda;
  /// min_i (alpha_i - lambda_i); +inf without constraints.
  double lambda_min = 0.0;
  /// max_a r(a) - r(a).
  std::vector<double> gaps;

  /// Per-constraint slack alpha_i - lambda_i of the strictly safe strategy.
  std::vector<double> margins(const InstanceSpec& spec) const;
};

/// Throws ValidationError if the safe set is empty.
OracleSolution solve_oracle(const InstanceSpec& spec);

/// Throws ValidationError unless lambda_min > 0.
void require_slater(const OracleSolution& oracle);

struct Feedback {
  double reward = 0.0;
  std::vector<double> costs;
};

/// One Bernoulli draw per signal, each from its own (round, arm, signal)
/// substream of the environment source.
Feedback sample_feedback(const InstanceSpec& spec, std::size_t arm, const RandomSource& env,
                         std::uint64_t round);

/// r^T x* - r^T x.
double instant_regret(const InstanceSpec& spec, const OracleSolution& oracle, const Strategy& x);

/// max{0, g_i^T x - alpha_i} for each constraint.
std::vector<double> instant_violation(const InstanceSpec& spec, const Strategy& x);

/// Constraint i's expected cost g_i^T x.
double expected_cost(const InstanceSpec& spec, std::size_t constraint, const Strategy& x);

}  // namespace repbandit
