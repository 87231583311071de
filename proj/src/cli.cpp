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

#include "repbandit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "repbandit/environment.hpp"
#include "repbandit/export.hpp"
#include "repbandit/format.hpp"
#include "repbandit/harness.hpp"

namespace repbandit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Options shared by the run and replicability subcommands. Values set on the
// command line take precedence over the --config file.
struct Options {
  std::string config;
  std::string instance;
  std::string algo = "debora";
  std::uint64_t horizon = 0;  // 0: use the instance horizon
  double delta = 0.05;
  double rho = 0.2;
  std::uint64_t trials = 1;
  std::uint64_t pairs = 100;
  std::uint64_t seed = 0;
  std::string out = "out";
  unsigned threads = 0;
};

struct Bindings {
  CLI::Option* instance = nullptr;
  CLI::Option* algo = nullptr;
  CLI::Option* horizon = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* rho = nullptr;
  CLI::Option* trials = nullptr;
  CLI::Option* pairs = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
};

Bindings bind_common(CLI::App* cmd, Options& o, bool batch) {
  Bindings b;
  cmd->add_option("--config", o.config, "JSON experiment file; explicit flags override it");
  b.instance = cmd->add_option("--instance", o.instance, "instance JSON file");
  b.algo = cmd->add_option("--algo", o.algo, "debora | debora-s | debora-h | ucb1");
  b.horizon = cmd->add_option("--horizon", o.horizon, "number of rounds (default: instance horizon)");
  b.delta = cmd->add_option("--delta", o.delta, "failure probability");
  b.rho = cmd->add_option("--rho", o.rho, "replicability target");
  if (batch) {
    b.trials = cmd->add_option("--trials", o.trials, "independent trials");
  } else {
    b.pairs = cmd->add_option("--pairs", o.pairs, "run pairs sharing internal randomness");
  }
  b.seed = cmd->add_option("--seed", o.seed, "master seed");
  b.out = cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  return b;
}

template <typename T>
void take(const json& cfg, const char* key, CLI::Option* opt, T& value) {
  if (opt == nullptr || !cfg.contains(key) || opt->count() > 0) return;
  try {
    value = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config: bad value for '") + key + "'");
  }
}

void apply_config(Options& o, const Bindings& b) {
  if (o.config.empty()) return;
  std::ifstream in(o.config, std::ios::binary);
  if (!in) throw ValidationError("cannot read config " + o.config);
  std::stringstream buf;
  buf << in.rdbuf();
  json cfg;
  try {
    cfg = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ValidationError(o.config + ": " + e.what());
  }
  if (!cfg.is_object()) throw ValidationError(o.config + ": expected a JSON object");
  static const char* kKnown[] = {"instance", "algo", "horizon", "delta", "rho", "trials", "pairs", "seed", "out"};
  for (const auto& item : cfg.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || item.key() == k;
    if (!known) throw ValidationError(o.config + ": unknown key '" + item.key() + "'");
  }
  const bool had_instance = b.instance->count() > 0;
  take(cfg, "instance", b.instance, o.instance);
  take(cfg, "algo", b.algo, o.algo);
  take(cfg, "horizon", b.horizon, o.horizon);
  take(cfg, "delta", b.delta, o.delta);
  take(cfg, "rho", b.rho, o.rho);
  take(cfg, "trials", b.trials, o.trials);
  take(cfg, "pairs", b.pairs, o.pairs);
  take(cfg, "seed", b.seed, o.seed);
  take(cfg, "out", b.out, o.out);
  // Instance paths in a config file are relative to the file itself.
  if (!had_instance && !o.instance.empty() && fs::path(o.instance).is_relative()) {
    o.instance = (fs::path(o.config).parent_path() / o.instance).string();
  }
}

struct Prepared {
  InstanceSpec spec;
  OracleSolution oracle;
  AlgorithmKind kind;
  ReplicabilityTarget target;
  RunMetadata meta;
};

Prepared prepare(const Options& o) {
  if (o.instance.empty()) throw ValidationError("--instance is required");
  Prepared p;
  p.kind = parse_algorithm_kind(o.algo);
  p.target = ReplicabilityTarget{o.delta, o.rho};
  p.target.validate();
  p.spec = load_instance(o.instance);
  if (o.horizon > 0) p.spec.horizon = o.horizon;
  p.oracle = solve_oracle(p.spec);
  if (p.kind == AlgorithmKind::kDeboraH) require_slater(p.oracle);
  p.meta.instance_name = p.spec.name.empty() ? fs::path(o.instance).stem().string() : p.spec.name;
  p.meta.algorithm = p.kind;
  p.meta.target = p.target;
  p.meta.horizon = p.spec.horizon;
  p.meta.seed = o.seed;
  return p;
}

void cmd_run(const Options& o, std::ostream& out) {
  if (o.trials < 1) throw ValidationError("--trials must be at least 1");
  const Prepared p = prepare(o);
  const auto logs = run_batch(p.spec, p.oracle, p.kind, p.target, o.trials, o.seed, o.threads);
  aggregate_and_export(logs, nullptr, p.meta, o.out);
  const BatchStatistics s = summarize(logs);
  out << algorithm_name(p.kind) << " on " << p.meta.instance_name << ": " << s.trials
      << " trial(s), mean regret " << format_double(s.regret.mean) << ", mean violation "
      << format_double(s.violation.mean) << ", mean epochs " << format_double(s.epochs.mean) << "\n";
  out << "wrote " << o.out << "\n";
}

void cmd_replicability(const Options& o, std::ostream& out) {
  if (o.pairs < 1) throw ValidationError("--pairs must be at least 1");
  const Prepared p = prepare(o);
  const ReplicabilityReport r =
      run_replicability_experiment(p.spec, p.oracle, p.kind, p.target, o.pairs, o.seed, o.threads);
  export_replicability(r, p.meta, o.out);
  out << algorithm_name(p.kind) << " on " << p.meta.instance_name << ": " << r.mismatches << "/" << r.pairs
      << " strategy mismatches (rate " << format_double(r.rate) << ", threshold " << format_double(r.threshold)
      << "), " << r.action_mismatches << " action mismatches\n";
  out << "wrote " << o.out << "\n";
}

void cmd_validate(const std::string& path, const std::string& algo, std::ostream& out) {
  const InstanceSpec spec = load_instance(path);
  const OracleSolution oracle = solve_oracle(spec);
  if (!algo.empty() && parse_algorithm_kind(algo) == AlgorithmKind::kDeboraH) require_slater(oracle);
  out << path << ": ok, K=" << spec.num_arms << " m=" << spec.num_constraints << " T=" << spec.horizon
      << ", opt " << format_double(oracle.opt_value) << ", x* " << oracle.x_star.serialize();
  if (spec.num_constraints > 0) out << ", lambda_min " << format_double(oracle.lambda_min);
  out << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Replicable constrained bandit experiments"};
  app.name("repbandit");
  app.require_subcommand(1);

  Options run_opts;
  CLI::App* run = app.add_subcommand("run", "run independent trials and export logs");
  const Bindings run_bind = bind_common(run, run_opts, true);

  Options rep_opts;
  CLI::App* rep = app.add_subcommand("replicability", "estimate the strategy mismatch rate");
  const Bindings rep_bind = bind_common(rep, rep_opts, false);

  std::string validate_path;
  std::string validate_algo;
  CLI::App* val = app.add_subcommand("validate", "check an instance file");
  val->add_option("--instance", validate_path, "instance JSON file")->required();
  val->add_option("--algo", validate_algo, "also check the requirements of this algorithm");

  std::vector<std::string> argv_storage{"repbandit"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (run->parsed()) {
      apply_config(run_opts, run_bind);
      cmd_run(run_opts, out);
    } else if (rep->parsed()) {
      apply_config(rep_opts, rep_bind);
      cmd_replicability(rep_opts, out);
    } else {
      cmd_validate(validate_path, validate_algo, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace repbandit
