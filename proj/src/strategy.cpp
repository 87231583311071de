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

#include "repbandit/strategy.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "repbandit/format.hpp"

namespace repbandit {

bool is_on_simplex(std::span<const double> x, double tol) {
  if (x.empty()) return false;
  double total = 0.0;
  for (double p : x) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= tol;
}

Strategy::Strategy(std::vector<double> probs) : probs_(std::move(probs)) {
  if (!is_on_simplex(probs_)) {
    throw std::invalid_argument("strategy is not a point of the simplex");
  }
}

Strategy Strategy::unit(std::size_t num_arms, std::size_t arm) {
  if (arm >= num_arms) throw std::out_of_range("Strategy::unit: arm out of range");
  std::vector<double> probs(num_arms, 0.0);
  probs[arm] = 1.0;
  return Strategy(std::move(probs));
}

Strategy Strategy::uniform(std::size_t num_arms) {
  return Strategy(std::vector<double>(num_arms, 1.0 / static_cast<double>(num_arms)));
}

Strategy Strategy::mix(double weight, const Strategy& a, const Strategy& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Strategy::mix: size mismatch");
  if (weight < 0.0 || weight > 1.0) throw std::invalid_argument("Strategy::mix: weight outside [0,1]");
  std::vector<double> probs(a.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = weight * a.probs_[i] + (1.0 - weight) * b.probs_[i];
  }
  return Strategy(std::move(probs));
}

double Strategy::dot(std::span<const double> per_arm) const {
  return repbandit::dot(probs_, per_arm);
}

std::size_t Strategy::pure_arm() const {
  std::size_t found = probs_.size();
  for (std::size_t a = 0; a < probs_.size(); ++a) {
    if (probs_[a] == 0.0) continue;
    if (probs_[a] != 1.0 || found != probs_.size()) return probs_.size();
    found = a;
  }
  return found;
}

std::string Strategy::serialize() const {
  std::string out;
  for (std::size_t a = 0; a < probs_.size(); ++a) {
    if (a > 0) out.push_back(';');
    out += format_double(probs_[a]);
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

}  // namespace repbandit
