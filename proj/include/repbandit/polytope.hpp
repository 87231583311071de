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
#include <optional>
#include <vector>

#include "repbandit/strategy.hpp"

namespace repbandit {

/// Absolute feasibility tolerance for every LP in this library.
inline constexpr double kFeasibilityTolerance = 1e-9;

using Matrix = std::vector<std::vector<double>>;

/// maximize objective^T x  s.t.  constraint_matrix x <= bounds,  x in the simplex.
struct SimplexPolytopeLP {
  std::vector<double> objective;
  Matrix constraint_matrix;
  std::vector<double> bounds;

  std::size_t num_arms() const { return objective.size(); }
  std::size_t num_constraints() const { return bounds.size(); }
  /// Throws std::invalid_argument on shape mismatch or non-finite data.
  void validate() const;
  /// Largest constraint excess max_i (A_i x - b_i), or -inf when m = 0.
  double max_violation(const Strategy& x) const;
};

struct LpSolution {
  Strategy x;
  double value = 0.0;
};

/// Dense simplex with Bland's rule. Among optimal vertices, returns the one
/// that is lexicographically largest in (x_0, x_1, ...), i.e. mass goes to the
/// lowest arm indices first. std::nullopt means the polytope is empty.
std::optional<LpSolution> solve(const SimplexPolytopeLP& lp);

/// Maximizes the worst-case slack min_i (bounds_i - A_i x) over the simplex,
/// with the same tie-breaking as solve(). For m = 0 the margin is +inf and the
/// returned point is e_0.
struct MarginSolution {
  Strategy x;
  double margin = 0.0;
};
MarginSolution max_margin(const Matrix& constraint_matrix, const std::vector<double>& bounds,
                          std::size_t num_arms);

/// Test oracle: enumerates all vertices of simplex ∩ {Ax <= b}. Requires
/// K <= 6 and m <= 4, otherwise throws std::invalid_argument.
std::optional<LpSolution> brute_force_optimum(const SimplexPolytopeLP& lp);

namespace lp_detail {

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

/// General dense LP: maximize c^T y s.t. rows, y >= 0. After the primary
/// objective, each index in `lex_order` is maximized in turn over the current
/// optimal face. Returns std::nullopt when infeasible; throws
/// std::runtime_error if unbounded or the iteration cap is hit.
struct DenseProgram {
  std::vector<double> objective;
  Matrix rows;
  std::vector<double> rhs;
  std::vector<RowSense> senses;
  std::vector<std::size_t> lex_order;
};

std::optional<std::vector<double>> solve_dense(const DenseProgram& program);

}  // namespace lp_detail

}  // namespace repbandit
