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

#include "repbandit/export.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "repbandit/format.hpp"

namespace repbandit {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class OutputFile {
 public:
  explicit OutputFile(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  ~OutputFile() = default;

  std::ofstream& stream() { return out_; }

  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string join(const std::vector<double>& values, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back(sep);
    out += format_double(values[i]);
  }
  return out;
}

json aggregate_json(const Aggregate& a) { return json{{"mean", a.mean}, {"median", a.median}, {"max", a.max}}; }

json metadata_json(const RunMetadata& meta) {
  return json{{"instance", meta.instance_name},
              {"algorithm", std::string(algorithm_name(meta.algorithm))},
              {"delta", meta.target.delta},
              {"rho", meta.target.rho},
              {"horizon", meta.horizon},
              {"seed", meta.seed}};
}

json replicability_json(const ReplicabilityReport& r) {
  return json{{"pairs", r.pairs},
              {"mismatches", r.mismatches},
              {"rate", r.rate},
              {"action_mismatches", r.action_mismatches},
              {"action_rate", r.action_rate},
              {"rho_target", r.rho_target},
              {"binomial_sigma", r.binomial_sigma},
              {"threshold", r.threshold},
              {"within_target", r.within_target()}};
}

void write_pairs(const ReplicabilityReport& report, const fs::path& path) {
  OutputFile file(path);
  auto& out = file.stream();
  out << "pair,xi_seed,env_seed_a,env_seed_b,strategies_match,actions_match,first_divergence,"
         "regret_a,regret_b,violation_a,violation_b,epochs_a,epochs_b\n";
  for (const PairOutcome& o : report.outcomes) {
    out << o.pair << ',' << o.seeds.xi << ',' << o.seeds.env_a << ',' << o.seeds.env_b << ','
        << (o.strategies_match ? 1 : 0) << ',' << (o.actions_match ? 1 : 0) << ',' << o.first_divergence << ','
        << format_double(o.first.regret) << ',' << format_double(o.second.regret) << ','
        << format_double(o.first.violation) << ',' << format_double(o.second.violation) << ','
        << o.first.last_epoch << ',' << o.second.last_epoch << '\n';
  }
  file.close();
}

}  // namespace

Aggregate aggregate(std::vector<double> values) {
  Aggregate a;
  if (values.empty()) return a;
  double total = 0.0;
  for (double v : values) total += v;
  a.mean = total / static_cast<double>(values.size());
  a.max = *std::max_element(values.begin(), values.end());
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  a.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return a;
}

BatchStatistics summarize(const std::vector<TrialSummary>& trials) {
  BatchStatistics s;
  s.trials = trials.size();
  if (trials.empty()) return s;
  std::vector<double> regret, violation, epochs;
  std::uint64_t unsafe = 0, dirty = 0;
  for (const TrialSummary& t : trials) {
    regret.push_back(t.regret);
    violation.push_back(t.violation);
    epochs.push_back(static_cast<double>(t.last_epoch));
    unsafe += t.any_unsafe_round ? 1 : 0;
    dirty += t.clean_event ? 0 : 1;
    s.fallbacks += t.fallbacks;
    s.all_epoch_bounds_hold = s.all_epoch_bounds_hold && t.epoch_bound_ok();
  }
  s.regret = aggregate(std::move(regret));
  s.violation = aggregate(std::move(violation));
  s.epochs = aggregate(std::move(epochs));
  const double n = static_cast<double>(trials.size());
  s.safety_failure_rate = static_cast<double>(unsafe) / n;
  s.clean_event_failure_rate = static_cast<double>(dirty) / n;
  return s;
}

BatchStatistics summarize(const std::vector<TrialLog>& logs) {
  std::vector<TrialSummary> summaries;
  summaries.reserve(logs.size());
  for (const TrialLog& log : logs) summaries.push_back(log.summary);
  return summarize(summaries);
}

RegretCurve regret_curve(const std::vector<TrialLog>& logs) {
  RegretCurve curve;
  if (logs.empty()) return curve;
  const std::size_t horizon = logs.front().rounds.size();
  curve.mean_regret.assign(horizon, 0.0);
  curve.mean_violation.assign(horizon, 0.0);
  for (const TrialLog& log : logs) {
    if (log.rounds.size() != horizon) throw std::invalid_argument("regret_curve: trials differ in horizon");
    double regret = 0.0;
    std::vector<double> per_constraint(log.summary.violation_per_constraint.size(), 0.0);
    for (std::size_t t = 0; t < horizon; ++t) {
      const RoundRecord& rr = log.rounds[t];
      regret += rr.inst_regret;
      double violation = 0.0;
      for (std::size_t i = 0; i < per_constraint.size(); ++i) {
        per_constraint[i] += rr.inst_violation[i];
        violation = std::max(violation, per_constraint[i]);
      }
      curve.mean_regret[t] += regret;
      curve.mean_violation[t] += violation;
    }
  }
  const double n = static_cast<double>(logs.size());
  for (std::size_t t = 0; t < horizon; ++t) {
    curve.mean_regret[t] /= n;
    curve.mean_violation[t] /= n;
  }
  return curve;
}

void aggregate_and_export(const std::vector<TrialLog>& logs, const ReplicabilityReport* report,
                          const RunMetadata& meta, const fs::path& out_dir) {
  if (logs.empty()) throw std::invalid_argument("aggregate_and_export: no trial logs");
  ensure_directory(out_dir);
  const std::size_t m = logs.front().summary.violation_per_constraint.size();

  {
    OutputFile file(out_dir / "rounds.csv");
    auto& out = file.stream();
    out << "trial,t,epoch,action,x_t,reward";
    for (std::size_t i = 1; i <= m; ++i) out << ",cost_" << i;
    out << ",inst_regret";
    for (std::size_t i = 1; i <= m; ++i) out << ",inst_violation_" << i;
    out << '\n';
    for (std::size_t trial = 0; trial < logs.size(); ++trial) {
      const TrialLog& log = logs[trial];
      for (const RoundRecord& rr : log.rounds) {
        out << trial << ',' << rr.t << ',' << rr.epoch << ',' << rr.action << ','
            << log.strategies[rr.strategy_index].serialize() << ',' << format_double(rr.reward);
        for (double c : rr.costs) out << ',' << format_double(c);
        out << ',' << format_double(rr.inst_regret);
        for (double v : rr.inst_violation) out << ',' << format_double(v);
        out << '\n';
      }
    }
    file.close();
  }

  {
    OutputFile file(out_dir / "epochs.csv");
    auto& out = file.stream();
    out << "trial,epoch,start_round,strategy,x_tilde,sigma,fallback,clean,x_star_in_optimistic_set,r_hat,zeta,g_hat\n";
    for (std::size_t trial = 0; trial < logs.size(); ++trial) {
      const TrialLog& log = logs[trial];
      for (std::size_t h = 0; h < log.epochs.size(); ++h) {
        const EpochRecord& rec = log.epochs[h];
        std::string g_hat;
        for (std::size_t i = 0; i < rec.g_hat.size(); ++i) {
          if (i > 0) g_hat.push_back('|');
          g_hat += join(rec.g_hat[i]);
        }
        out << trial << ',' << rec.index << ',' << rec.start_round << ',' << rec.strategy.serialize() << ','
            << rec.x_tilde.serialize() << ',' << format_double(rec.sigma) << ',' << (rec.fallback ? 1 : 0) << ','
            << (log.monitors[h].clean ? 1 : 0) << ',' << (log.monitors[h].contains_x_star ? 1 : 0) << ','
            << join(rec.r_hat) << ',' << join(rec.zeta) << ',' << g_hat << '\n';
      }
    }
    file.close();
  }

  {
    const RegretCurve curve = regret_curve(logs);
    OutputFile file(out_dir / "regret_curve.csv");
    auto& out = file.stream();
    out << "t,mean_cumulative_regret,mean_cumulative_violation\n";
    for (std::size_t t = 0; t < curve.mean_regret.size(); ++t) {
      out << (t + 1) << ',' << format_double(curve.mean_regret[t]) << ','
          << format_double(curve.mean_violation[t]) << '\n';
    }
    file.close();
  }

  if (report != nullptr) write_pairs(*report, out_dir / "pairs.csv");

  const BatchStatistics stats = summarize(logs);
  json summary = metadata_json(meta);
  summary["trials"] = stats.trials;
  summary["regret"] = aggregate_json(stats.regret);
  summary["violation"] = aggregate_json(stats.violation);
  summary["epochs"] = aggregate_json(stats.epochs);
  summary["epoch_bound"] = logs.front().summary.epoch_bound;
  summary["all_epoch_bounds_hold"] = stats.all_epoch_bounds_hold;
  summary["safety_failure_rate"] = stats.safety_failure_rate;
  summary["clean_event_failure_rate"] = stats.clean_event_failure_rate;
  summary["fallbacks"] = stats.fallbacks;
  summary["replicability"] = report != nullptr ? replicability_json(*report) : json(nullptr);
  json per_trial = json::array();
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const TrialSummary& s = logs[i].summary;
    per_trial.push_back(json{{"trial", i},
                             {"xi_seed", logs[i].xi_seed},
                             {"env_seed", logs[i].env_seed},
                             {"regret", s.regret},
                             {"violation", s.violation},
                             {"epochs", s.last_epoch},
                             {"any_unsafe_round", s.any_unsafe_round},
                             {"clean_event", s.clean_event},
                             {"fallbacks", s.fallbacks}});
  }
  summary["per_trial"] = std::move(per_trial);

  OutputFile file(out_dir / "summary.json");
  file.stream() << summary.dump(2) << '\n';
  file.close();
}

void export_replicability(const ReplicabilityReport& report, const RunMetadata& meta, const fs::path& out_dir) {
  ensure_directory(out_dir);
  write_pairs(report, out_dir / "pairs.csv");

  std::vector<TrialSummary> firsts;
  for (const PairOutcome& o : report.outcomes) {
    firsts.push_back(o.first);
    firsts.push_back(o.second);
  }
  const BatchStatistics stats = summarize(firsts);
  json doc = metadata_json(meta);
  doc["replicability"] = replicability_json(report);
  doc["runs"] = stats.trials;
  doc["regret"] = aggregate_json(stats.regret);
  doc["violation"] = aggregate_json(stats.violation);
  doc["epochs"] = aggregate_json(stats.epochs);
  doc["safety_failure_rate"] = stats.safety_failure_rate;
  doc["clean_event_failure_rate"] = stats.clean_event_failure_rate;
  doc["all_epoch_bounds_hold"] = stats.all_epoch_bounds_hold;

  OutputFile file(out_dir / "replicability.json");
  file.stream() << doc.dump(2) << '\n';
  file.close();
}

}  // namespace repbandit
