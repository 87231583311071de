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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "repbandit/cli.hpp"
#include "repbandit/environment.hpp"
#include "repbandit/estimator.hpp"
#include "repbandit/format.hpp"
#include "repbandit/harness.hpp"
#include "repbandit/polytope.hpp"
#include "repbandit/random.hpp"

#ifndef REPBANDIT_INSTANCE_DIR
#define REPBANDIT_INSTANCE_DIR "instances"
#endif

namespace rb = repbandit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  fs::path instances;
  unsigned threads = 0;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

double three_sigma_threshold(double p, double n) { return p + 3.0 * std::sqrt(p * (1.0 - p) / n); }

rb::InstanceSpec load(const Context& ctx, const std::string& name, std::uint64_t horizon = 0) {
  rb::InstanceSpec spec = rb::load_instance(ctx.instances / name);
  if (horizon > 0) spec.horizon = horizon;
  return spec;
}

// Uniform draws for building random test instances.
class Draws {
 public:
  explicit Draws(std::uint64_t seed, std::uint64_t tag)
      : stream_(rb::RandomSource(seed).derive_stream({rb::StreamPurpose::kTest, tag, rb::StreamLabel::kNone,
                                                      rb::StreamLabel::kNone, rb::StreamLabel::kNone})) {}
  double uniform() { return stream_.next_uniform(); }
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  rb::UniformStream stream_;
};

// Random instance whose safe set contains a point with margin >= 0.05.
rb::InstanceSpec random_instance(Draws& d, std::size_t k, std::size_t m, std::uint64_t horizon) {
  for (;;) {
    rb::InstanceSpec spec;
    spec.num_arms = k;
    spec.num_constraints = m;
    spec.horizon = horizon;
    std::vector<double> point(k);
    double total = 0.0;
    for (double& v : point) total += (v = d.uniform() + 0.01);
    for (double& v : point) v /= total;
    for (std::size_t a = 0; a < k; ++a) spec.reward_means.push_back(d.uniform());
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(k);
      double cost = 0.0;
      for (std::size_t a = 0; a < k; ++a) cost += (row[a] = d.uniform()) * point[a];
      spec.cost_means.push_back(std::move(row));
      spec.thresholds.push_back(std::min(1.0, cost + 0.05 + 0.3 * d.uniform()));
    }
    try {
      spec.validate();
      if (m == 0 || rb::solve_oracle(spec).lambda_min > 0.0) return spec;
    } catch (const rb::ValidationError&) {
    }
  }
}

// ---------------------------------------------------------------------------

Outcome replicability_gate(const Context& ctx) {
  const rb::ReplicabilityTarget target{0.05, 0.2};
  const std::uint64_t pairs = 200;
  Outcome out{true, ""};
  struct Case {
    rb::AlgorithmKind kind;
    const char* instance;
  };
  for (const Case& c : {Case{rb::AlgorithmKind::kDebora, "unconstrained_k5.json"},
                        Case{rb::AlgorithmKind::kDeboraS, "reference_k5_m2.json"},
                        Case{rb::AlgorithmKind::kDeboraH, "reference_k5_m2.json"}}) {
    const rb::InstanceSpec spec = load(ctx, c.instance);
    const auto r = rb::run_replicability_experiment(spec, rb::solve_oracle(spec), c.kind, target, pairs, 1001,
                                                    ctx.threads);
    out.pass = out.pass && r.within_target();
    out.detail += std::string(rb::algorithm_name(c.kind)) + " " + std::to_string(r.mismatches) + "/200 (rate " +
                  fmt(r.rate) + ", actions " + fmt(r.action_rate) + "); ";
  }
  // Non-replicable baseline for contrast; not gated.
  const rb::InstanceSpec spec = load(ctx, "reference_k5_m2.json");
  const auto ucb = rb::run_replicability_experiment(spec, rb::solve_oracle(spec), rb::AlgorithmKind::kUcb1, target,
                                                    pairs, 1001, ctx.threads);
  out.detail += "ucb1 rate " + fmt(ucb.rate) + "; threshold " + fmt(three_sigma_threshold(0.2, pairs));
  return out;
}

Outcome epoch_bound(const Context&) {
  Draws d(2002, 0);
  const rb::AlgorithmKind kinds[] = {rb::AlgorithmKind::kDebora, rb::AlgorithmKind::kDeboraS,
                                     rb::AlgorithmKind::kDeboraH};
  int ok = 0, runs = 0;
  std::uint64_t tightest = 0;
  for (int run = 0; run < 1000; ++run) {
    const std::size_t k = 1 + d.below(6);
    const std::size_t m = d.below(4);
    const std::uint64_t horizon = 1 + static_cast<std::uint64_t>(std::exp(d.uniform() * std::log(20000.0)));
    const rb::InstanceSpec spec = random_instance(d, k, m, horizon);
    const rb::AlgorithmKind kind = kinds[run % 3];
    const double delta = 0.01 + 0.1 * d.uniform();
    const rb::ReplicabilityTarget target{delta, 2.0 * delta + 0.05 + 0.5 * d.uniform()};
    const rb::TrialLog log = rb::run_trial(spec, kind, target, d.below(1ULL << 53), d.below(1ULL << 53));
    ++runs;
    const bool good = log.summary.epoch_bound_ok() && log.summary.doubling_ok;
    ok += good ? 1 : 0;
    if (log.summary.epoch_bound > 0) {
      tightest = std::max(tightest, log.summary.last_epoch * 100 / log.summary.epoch_bound);
    }
  }
  return {ok == runs, std::to_string(ok) + "/" + std::to_string(runs) +
                          " runs within K*ceil(log2 T) with doubling epochs; max H/bound " +
                          std::to_string(tightest) + "%"};
}

Outcome rep_mean_guarantees(const Context&) {
  const double eps = 0.1, dp = 0.05, rp = 0.2, mean = 0.37;
  const std::uint64_t n = rb::samples_for_tolerance(eps, dp, rp);
  const int reps = 2000;
  const rb::RandomSource xi(3003), env(3004);
  int inaccurate = 0, mismatched = 0;
  std::vector<double> samples(n);
  auto draw = [&](int rep, std::uint64_t run) {
    rb::UniformStream s = env.derive_stream(
        {rb::StreamPurpose::kEnvReward, static_cast<std::uint64_t>(rep), 0, run, rb::StreamLabel::kNone});
    for (double& v : samples) v = s.next_uniform() < mean ? 1.0 : 0.0;
  };
  for (int rep = 0; rep < reps; ++rep) {
    const double u = xi.derive_stream({rb::StreamPurpose::kGridOffset, static_cast<std::uint64_t>(rep), 0,
                                       rb::StreamLabel::kNone, rb::StreamLabel::kNone})
                         .next_uniform();
    const rb::RepMeanParams params = rb::RepMeanParams::make(dp, rp, eps, u);
    draw(rep, 0);
    const double a = rb::rep_mean(samples, params);
    draw(rep, 1);
    const double b = rb::rep_mean(samples, params);
    if (std::abs(a - mean) > eps) ++inaccurate;
    if (a != b) ++mismatched;
  }
  const double acc_rate = inaccurate / double(reps), mis_rate = mismatched / double(reps);
  const double acc_gate = three_sigma_threshold(dp, reps), mis_gate = three_sigma_threshold(rp, reps);
  return {acc_rate <= acc_gate && mis_rate <= mis_gate,
          "n=" + std::to_string(n) + ", accuracy failures " + fmt(acc_rate) + " (gate " + fmt(acc_gate) +
              "), mismatches " + fmt(mis_rate) + " (gate " + fmt(mis_gate) + ")"};
}

Outcome lp_equivalence(const Context&) {
  Draws d(4004, 0);
  int ok = 0;
  double worst = 0.0;
  for (int c = 0; c < 500; ++c) {
    const std::size_t k = 1 + d.below(4);
    const std::size_t m = d.below(4);
    rb::SimplexPolytopeLP lp;
    std::vector<double> point(k);
    double total = 0.0;
    for (double& v : point) total += (v = d.uniform() + 1e-3);
    for (double& v : point) v /= total;
    for (std::size_t a = 0; a < k; ++a) lp.objective.push_back(2.0 * d.uniform() - 1.0);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(k);
      double cost = 0.0;
      for (std::size_t a = 0; a < k; ++a) cost += (row[a] = 2.0 * d.uniform() - 1.0) * point[a];
      lp.constraint_matrix.push_back(std::move(row));
      lp.bounds.push_back(cost + (d.uniform() < 0.2 ? 0.0 : 0.5 * d.uniform()));
    }
    const auto fast = rb::solve(lp);
    const auto slow = rb::brute_force_optimum(lp);
    if (!fast || !slow) continue;
    const double gap = std::abs(fast->value - slow->value);
    worst = std::max(worst, gap);
    if (gap <= 1e-9 && lp.max_violation(fast->x) <= 1e-9) ++ok;
  }
  return {ok == 500, std::to_string(ok) + "/500 match; max objective gap " + fmt(worst)};
}

// Shared debora-h runs for the safety, sigma and containment criteria.
struct HardRuns {
  rb::InstanceSpec spec;
  rb::OracleSolution oracle;
  std::vector<rb::TrialLog> logs;
};

const HardRuns& hard_runs(const Context& ctx) {
  static const HardRuns runs = [&] {
    HardRuns r;
    r.spec = load(ctx, "reference_k5_m2.json");
    r.oracle = rb::solve_oracle(r.spec);
    r.logs = rb::run_batch(r.spec, r.oracle, rb::AlgorithmKind::kDeboraH, rb::ReplicabilityTarget{0.05, 0.2}, 200,
                           5005, ctx.threads);
    return r;
  }();
  return runs;
}

Outcome hard_safety(const Context& ctx) {
  const HardRuns& r = hard_runs(ctx);
  if (r.oracle.lambda_min < 0.1) return {false, "reference instance has lambda_min < 0.1"};
  int clean = 0, clean_unsafe = 0, unsafe = 0;
  for (const auto& log : r.logs) {
    if (log.summary.any_unsafe_round) ++unsafe;
    if (!log.summary.clean_event) continue;
    ++clean;
    if (log.summary.any_unsafe_round) ++clean_unsafe;
  }
  const double rate = unsafe / 200.0, gate = three_sigma_threshold(0.05, 200);
  return {clean_unsafe == 0 && rate <= gate,
          "clean runs " + std::to_string(clean) + "/200 with " + std::to_string(clean_unsafe) +
              " unsafe; runs with any unsafe round " + fmt(rate) + " (gate " + fmt(gate) + ")"};
}

Outcome sigma_bound(const Context& ctx) {
  const HardRuns& r = hard_runs(ctx);
  const double cap = 1.0 / (1.0 + r.oracle.lambda_min);
  std::uint64_t epochs = 0, bad = 0;
  double max_sigma = 0.0;
  for (const auto& log : r.logs) {
    for (const auto& e : log.epochs) {
      ++epochs;
      max_sigma = std::max(max_sigma, e.sigma);
      if (!(e.sigma >= 0.0 && e.sigma <= cap)) ++bad;
    }
  }
  return {bad == 0, std::to_string(epochs - bad) + "/" + std::to_string(epochs) + " epochs with sigma in [0, " +
                        fmt(cap) + "]; max sigma " + fmt(max_sigma)};
}

Outcome sublinear_scaling(const Context& ctx) {
  const rb::ReplicabilityTarget target{0.05, 0.2};
  std::vector<double> regret, violation;
  for (std::uint64_t horizon : {2500ULL, 10000ULL, 40000ULL}) {
    const rb::InstanceSpec spec = load(ctx, "reference_k5_m2.json", horizon);
    const auto logs =
        rb::run_batch(spec, rb::solve_oracle(spec), rb::AlgorithmKind::kDeboraS, target, 50, 7007, ctx.threads);
    double r = 0.0, v = 0.0;
    for (const auto& log : logs) {
      r += log.summary.regret;
      v += log.summary.violation;
    }
    regret.push_back(r / 50.0);
    violation.push_back(v / 50.0);
  }
  bool pass = true;
  std::string detail;
  auto ratio = [&](const std::vector<double>& metric, const char* name) {
    for (std::size_t i = 0; i + 1 < metric.size(); ++i) {
      // A metric that stays at zero is trivially sublinear.
      const double q = metric[i] == 0.0 ? (metric[i + 1] == 0.0 ? 0.0 : INFINITY) : metric[i + 1] / metric[i];
      pass = pass && q <= 3.0;
      detail += std::string(name) + " " + fmt(metric[i]) + "->" + fmt(metric[i + 1]) + " ratio " + fmt(q) + "; ";
    }
  };
  ratio(regret, "regret");
  ratio(violation, "violation");
  return {pass, detail + "gate 3.0"};
}

Outcome instance_convergence(const Context& ctx) {
  const rb::InstanceSpec spec = load(ctx, "three_arm_gap02.json", 50000);
  const auto logs = rb::run_batch(spec, rb::solve_oracle(spec), rb::AlgorithmKind::kDebora,
                                  rb::ReplicabilityTarget{0.05, 0.2}, 50, 8008, ctx.threads);
  const std::size_t tenth = spec.horizon / 10;
  double head = 0.0, tail = 0.0;
  for (const auto& log : logs) {
    for (std::size_t t = 0; t < tenth; ++t) head += log.rounds[t].inst_regret;
    for (std::size_t t = spec.horizon - tenth; t < spec.horizon; ++t) tail += log.rounds[t].inst_regret;
  }
  head /= 50.0 * tenth;
  tail /= 50.0 * tenth;
  return {tail <= 0.2 * head, "per-round regret first 10% " + fmt(head) + ", final 10% " + fmt(tail) +
                                  " (ratio " + fmt(head > 0 ? tail / head : INFINITY) + ", gate 0.2)"};
}

Outcome optimistic_containment(const Context& ctx) {
  const HardRuns& hard = hard_runs(ctx);
  const auto soft = rb::run_batch(hard.spec, hard.oracle, rb::AlgorithmKind::kDeboraS,
                                  rb::ReplicabilityTarget{0.05, 0.2}, 200, 9009, ctx.threads);
  std::uint64_t clean_runs = 0, epochs = 0, failures = 0;
  auto check = [&](const std::vector<rb::TrialLog>& logs) {
    for (const auto& log : logs) {
      if (!log.summary.clean_event) continue;
      ++clean_runs;
      for (const auto& mon : log.monitors) {
        ++epochs;
        if (!mon.contains_x_star) ++failures;
      }
    }
  };
  check(hard.logs);
  check(soft);
  return {failures == 0 && clean_runs > 0, std::to_string(clean_runs) + "/400 clean runs; x* inside the optimistic set at " +
                                                std::to_string(epochs - failures) + "/" + std::to_string(epochs) +
                                                " epochs"};
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const Context& ctx) {
  const fs::path root = fs::temp_directory_path() / ("repbandit_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::string inst = (ctx.instances / "reference_k5_m2.json").string();
  std::vector<std::vector<std::string>> invocations;
  for (const char* algo : {"debora", "debora-s", "debora-h", "ucb1"}) {
    invocations.push_back({"run", "--instance", inst, "--algo", algo, "--horizon", "2000", "--trials", "4", "--seed",
                           "11", "--delta", "0.05", "--rho", "0.2"});
    invocations.push_back({"replicability", "--instance", inst, "--algo", algo, "--horizon", "2000", "--pairs", "10",
                           "--seed", "12"});
  }
  std::uint64_t files = 0, identical = 0;
  std::ostringstream sink;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    std::string last_stdout;
    for (int repeat = 0; repeat < 2; ++repeat) {
      auto args = invocations[i];
      args.push_back("--out");
      args.push_back((root / std::to_string(i) / std::to_string(repeat)).string());
      std::ostringstream out;
      if (rb::run_cli(args, out, sink) != rb::kExitOk) return {false, "invocation " + std::to_string(i) + " failed"};
    }
    for (const auto& entry : fs::directory_iterator(root / std::to_string(i) / "0")) {
      ++files;
      const fs::path twin = root / std::to_string(i) / "1" / entry.path().filename();
      if (fs::exists(twin) && read_bytes(entry.path()) == read_bytes(twin)) ++identical;
    }
  }
  fs::remove_all(root);
  return {files > 0 && identical == files, std::to_string(identical) + "/" + std::to_string(files) +
                                               " output files byte-identical across " +
                                               std::to_string(invocations.size()) + " repeated invocations"};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repbandit acceptance suite"};
  std::vector<int> selected;
  Context ctx;
  std::string instances = REPBANDIT_INSTANCE_DIR;
  app.add_option("--criterion", selected, "criterion number(s) to run; default all");
  app.add_option("--instances", instances, "directory holding the instance files");
  app.add_option("--threads", ctx.threads, "worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);
  ctx.instances = instances;

  const std::vector<Criterion> criteria = {
      {1, "replicability gate", replicability_gate},
      {2, "epoch bound", epoch_bound},
      {3, "replicable mean guarantees", rep_mean_guarantees},
      {4, "LP oracle equivalence", lp_equivalence},
      {5, "hard-constraint safety", hard_safety},
      {6, "mixing coefficient bound", sigma_bound},
      {7, "sublinear scaling", sublinear_scaling},
      {8, "instance-dependent convergence", instance_convergence},
      {9, "optimistic-set containment", optimistic_containment},
      {10, "CLI determinism", cli_determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << "): " << o.detail << " ["
              << fmt(secs) << "s]" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
