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

#include "repbandit/environment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace repbandit {
namespace {

using nlohmann::json;

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

// 1-based line of the first occurrence of "key", or 0.
std::size_t line_of_key(std::string_view text, std::string_view key) {
  const std::string needle = "\"" + std::string(key) + "\"";
  const auto pos = text.find(needle);
  if (pos == std::string_view::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Diagnostics {
 public:
  Diagnostics(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(std::string_view key, const std::string& message) const {
    std::ostringstream os;
    os << source_ << ':' << line_of_key(text_, key) << ": " << message;
    throw ValidationError(os.str());
  }

  const json& require(const json& doc, std::string_view key) const {
    auto it = doc.find(std::string(key));
    if (it == doc.end()) {
      std::ostringstream os;
      os << source_ << ":1: missing required field \"" << key << '"';
      throw ValidationError(os.str());
    }
    return *it;
  }

  std::uint64_t unsigned_integer(const json& doc, std::string_view key) const {
    const json& v = require(doc, key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      fail(key, "field \"" + std::string(key) + "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::vector<double> unit_vector(const json& v, std::string_view key, std::size_t expected,
                                  const std::string& what) const {
    if (!v.is_array()) fail(key, what + " must be an array");
    if (v.size() != expected) {
      fail(key, what + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(expected));
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key, what + "[" + std::to_string(i) + "] is not a number");
      const double d = v[i].get<double>();
      if (!in_unit_interval(d)) {
        fail(key, what + "[" + std::to_string(i) + "] = " + std::to_string(d) + " is outside [0,1]");
      }
      out.push_back(d);
    }
    return out;
  }

 private:
  std::string_view text_;
  std::string source_;
};

}  // namespace

void InstanceSpec::validate() const {
  if (num_arms < 1) throw ValidationError("instance needs at least one arm");
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (reward_means.size() != num_arms) throw ValidationError("reward_means length differs from K");
  for (double r : reward_means) {
    if (!in_unit_interval(r)) throw ValidationError("reward mean outside [0,1]");
  }
  if (cost_means.size() != num_constraints || thresholds.size() != num_constraints) {
    throw ValidationError("cost_means/thresholds count differs from m");
  }
  for (std::size_t i = 0; i < num_constraints; ++i) {
    if (cost_means[i].size() != num_arms) throw ValidationError("cost_means row length differs from K");
    for (double g : cost_means[i]) {
      if (!in_unit_interval(g)) throw ValidationError("cost mean outside [0,1]");
    }
    if (!in_unit_interval(thresholds[i])) throw ValidationError("threshold outside [0,1]");
  }
  SimplexPolytopeLP feasibility{std::vector<double>(num_arms, 0.0), cost_means, thresholds};
  if (!solve(feasibility)) throw ValidationError("safe set is empty: no strategy satisfies all constraints");
}

InstanceSpec parse_instance(std::string_view json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C" inside what().
    throw ValidationError(source + ": " + e.what());
  }
  if (!doc.is_object()) throw ValidationError(source + ":1: instance must be a JSON object");
  Diagnostics diag(json_text, source);

  static const std::set<std::string> kKnown = {"K", "m", "reward_means", "cost_means", "thresholds",
                                               "horizon", "family", "name", "description"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKnown.contains(key)) diag.fail(key, "unknown field \"" + key + "\"");
  }

  InstanceSpec spec;
  spec.num_arms = diag.unsigned_integer(doc, "K");
  if (spec.num_arms < 1) diag.fail("K", "K must be at least 1");
  spec.num_constraints = diag.unsigned_integer(doc, "m");
  spec.horizon = diag.unsigned_integer(doc, "horizon");
  if (spec.horizon < 1) diag.fail("horizon", "horizon must be at least 1");

  const json& family = diag.require(doc, "family");
  if (!family.is_string() || family.get<std::string>() != "bernoulli") {
    diag.fail("family", "family must be \"bernoulli\"");
  }
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) diag.fail("name", "name must be a string");
    spec.name = it->get<std::string>();
  }

  spec.reward_means = diag.unit_vector(diag.require(doc, "reward_means"), "reward_means", spec.num_arms,
                                       "reward_means");

  const json& costs = diag.require(doc, "cost_means");
  if (!costs.is_array()) diag.fail("cost_means", "cost_means must be an array of arrays");
  if (costs.size() != spec.num_constraints) {
    diag.fail("cost_means", "cost_means has " + std::to_string(costs.size()) + " rows, expected m = " +
                                std::to_string(spec.num_constraints));
  }
  for (std::size_t i = 0; i < costs.size(); ++i) {
    spec.cost_means.push_back(
        diag.unit_vector(costs[i], "cost_means", spec.num_arms, "cost_means[" + std::to_string(i) + "]"));
  }
  spec.thresholds =
      diag.unit_vector(diag.require(doc, "thresholds"), "thresholds", spec.num_constraints, "thresholds");

  try {
    spec.validate();
  } catch (const ValidationError& e) {
    diag.fail("cost_means", e.what());
  }
  return spec;
}

InstanceSpec load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string() + ": cannot open instance file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path.string());
}

std::string instance_to_json(const InstanceSpec& spec) {
  json doc;
  doc["K"] = spec.num_arms;
  doc["m"] = spec.num_constraints;
  doc["reward_means"] = spec.reward_means;
  doc["cost_means"] = spec.cost_means.empty() ? json::array() : json(spec.cost_means);
  doc["thresholds"] = spec.thresholds.empty() ? json::array() : json(spec.thresholds);
  doc["horizon"] = spec.horizon;
  doc["family"] = "bernoulli";
  if (!spec.name.empty()) doc["name"] = spec.name;
  return doc.dump(2);
}

std::vector<double> OracleSolution::margins(const InstanceSpec& spec) const {
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) out[i] = spec.thresholds[i] - lambda[i];
  return out;
}

OracleSolution solve_oracle(const InstanceSpec& spec) {
  SimplexPolytopeLP lp{spec.reward_means, spec.cost_means, spec.thresholds};
  auto best = solve(lp);
  if (!best) throw ValidationError("safe set is empty: no strategy satisfies all constraints");

  OracleSolution oracle;
  oracle.x_star = best->x;
  oracle.opt_value = best->value;

  if (spec.num_constraints == 0) {
    oracle.x_diamond = oracle.x_star;
    oracle.lambda_min = std::numeric_limits<double>::infinity();
  } else {
    MarginSolution diamond = max_margin(spec.cost_means, spec.thresholds, spec.num_arms);
    oracle.x_diamond = diamond.x;
    oracle.lambda_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.num_constraints; ++i) {
      oracle.lambda.push_back(oracle.x_diamond.dot(spec.cost_means[i]));
      oracle.lambda_min = std::min(oracle.lambda_min, spec.thresholds[i] - oracle.lambda.back());
    }
  }

  const double best_mean = *std::max_element(spec.reward_means.begin(), spec.reward_means.end());
  for (double r : spec.reward_means) oracle.gaps.push_back(best_mean - r);
  return oracle;
}

void require_slater(const OracleSolution& oracle) {
  if (!(oracle.lambda_min > 0.0)) {
    throw ValidationError("Slater condition fails: best worst-case margin is " +
                          std::to_string(oracle.lambda_min) + " (must be > 0)");
  }
}

Feedback sample_feedback(const InstanceSpec& spec, std::size_t arm, const RandomSource& env,
                         std::uint64_t round) {
  Feedback fb;
  StreamLabel label{StreamPurpose::kEnvReward, StreamLabel::kNone, arm, StreamLabel::kNone, round};
  fb.reward = env.derive_stream(label).next_uniform() < spec.reward_means[arm] ? 1.0 : 0.0;
  fb.costs.resize(spec.num_constraints);
  label.purpose = StreamPurpose::kEnvCost;
  for (std::size_t i = 0; i < spec.num_constraints; ++i) {
    label.constraint = i;
    fb.costs[i] = env.derive_stream(label).next_uniform() < spec.cost_means[i][arm] ? 1.0 : 0.0;
  }
  return fb;
}

double instant_regret(const InstanceSpec& spec, const OracleSolution& oracle, const Strategy& x) {
  return oracle.opt_value - x.dot(spec.reward_means);
}

double expected_cost(const InstanceSpec& spec, std::size_t constraint, const Strategy& x) {
  return x.dot(spec.cost_means.at(constraint));
}

std::vector<double> instant_violation(const InstanceSpec& spec, const Strategy& x) {
  std::vector<double> out(spec.num_constraints);
  for (std::size_t i = 0; i < spec.num_constraints; ++i) {
    out[i] = std::max(0.0, expected_cost(spec, i, x) - spec.thresholds[i]);
  }
  return out;
}

}  // namespace repbandit
