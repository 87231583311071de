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
#include <string>
#include <vector>

#include "repbandit/harness.hpp"

namespace repbandit {

/// Describes the experiment in exported summaries.
struct RunMetadata {
  std::string instance_name;
  AlgorithmKind algorithm = AlgorithmKind::kDebora;
  ReplicabilityTarget target;
  std::uint64_t horizon = 0;
  std::uint64_t seed = 0;
};

struct Aggregate {
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct BatchStatistics {
  std::uint64_t trials = 0;
  Aggregate regret;
  Aggregate violation;
  Aggregate epochs;
  double safety_failure_rate = 0.0;
  double clean_event_failure_rate = 0.0;
  std::uint64_t fallbacks = 0;
  bool all_epoch_bounds_hold = true;
};

Aggregate aggregate(std::vector<double> values);
BatchStatistics summarize(const std::vector<TrialSummary>& trials);
BatchStatistics summarize(const std::vector<TrialLog>& logs);

/// Mean over trials of the cumulative regret and violation after each round.
struct RegretCurve {
  std::vector<double> mean_regret;
  std::vector<double> mean_violation;
};
RegretCurve regret_curve(const std::vector<TrialLog>& logs);

/// Writes rounds.csv, epochs.csv, regret_curve.csv and summary.json into
/// out_dir (created if missing). When `report` is given, pairs.csv is written
/// too and the summary carries the replicability rate. Throws
/// std::runtime_error naming the path on I/O failure.
void aggregate_and_export(const std::vector<TrialLog>& logs, const ReplicabilityReport* report,
                          const RunMetadata& meta, const std::filesystem::path& out_dir);

/// Writes replicability.json and pairs.csv into out_dir.
void export_replicability(const ReplicabilityReport& report, const RunMetadata& meta,
                          const std::filesystem::path& out_dir);

}  // namespace repbandit
