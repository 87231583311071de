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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace repbandit {

/// Absolute tolerance on 1^T x = 1 for a point of the simplex.
inline constexpr double kSimplexTolerance = 1e-9;

bool is_on_simplex(std::span<const double> x, double tol = kSimplexTolerance);

/// A probability vector over K arms.
class Strategy {
 public:
  Strategy() = default;
  /// Throws std::invalid_argument unless probs is on the simplex.
  explicit Strategy(std::vector<double> probs);

  static Strategy unit(std::size_t num_arms, std::size_t arm);
  static Strategy uniform(std::size_t num_arms);
  /// weight * a + (1 - weight) * b, coordinatewise in arm order.
  static Strategy mix(double weight, const Strategy& a, const Strategy& b);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  std::span<const double> probabilities() const { return probs_; }

  /// Expectation of a per-arm quantity, summed in arm order.
  double dot(std::span<const double> per_arm) const;

  /// Index of the unit vector, or size() when the strategy is mixed.
  std::size_t pure_arm() const;

  /// Shortest round-trip decimal representation joined with ';'.
  std::string serialize() const;

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  std::vector<double> probs_;
};

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace repbandit
