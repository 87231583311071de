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

#include "repbandit/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace repbandit {
namespace lp_detail {
namespace {

constexpr double kPivotTolerance = 1e-11;
constexpr double kRatioTieTolerance = 1e-12;

// Row-major tableau with the right-hand side in the last column. Columns are
// ordered structural, slack/surplus, artificial; Bland's rule scans them in
// that order, which fixes the pivot sequence for identical inputs.
class Tableau {
 public:
  explicit Tableau(const DenseProgram& program) {
    const std::size_t m = program.rows.size();
    num_structural_ = program.objective.size();
    std::size_t num_slack = 0;
    for (RowSense s : program.senses) {
      if (s != RowSense::kEqual) ++num_slack;
    }
    // Rows whose rhs is negative flip sense, which changes artificial needs.
    std::vector<RowSense> senses = program.senses;
    std::vector<double> sign(m, 1.0);
    std::size_t num_artificial = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (program.rhs[i] < 0.0) {
        sign[i] = -1.0;
        if (senses[i] == RowSense::kLessEqual) {
          senses[i] = RowSense::kGreaterEqual;
        } else if (senses[i] == RowSense::kGreaterEqual) {
          senses[i] = RowSense::kLessEqual;
        }
      }
      if (senses[i] != RowSense::kLessEqual) ++num_artificial;
    }
    first_artificial_ = num_structural_ + num_slack;
    num_columns_ = first_artificial_ + num_artificial;
    width_ = num_columns_ + 1;
    rows_ = m;
    cells_.assign(rows_ * width_, 0.0);
    basis_.assign(rows_, 0);
    banned_.assign(num_columns_, false);

    std::size_t slack_col = num_structural_;
    std::size_t art_col = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& row = program.rows[i];
      double scale = std::abs(program.rhs[i]);
      for (double v : row) scale = std::max(scale, std::abs(v));
      const double factor = sign[i] / std::max(scale, 1.0);
      for (std::size_t j = 0; j < num_structural_; ++j) at(i, j) = row[j] * factor;
      at(i, num_columns_) = program.rhs[i] * factor;
      switch (senses[i]) {
        case RowSense::kLessEqual:
          at(i, slack_col) = 1.0;
          basis_[i] = slack_col++;
          break;
        case RowSense::kGreaterEqual:
          at(i, slack_col++) = -1.0;
          at(i, art_col) = 1.0;
          basis_[i] = art_col++;
          break;
        case RowSense::kEqual:
          at(i, art_col) = 1.0;
          basis_[i] = art_col++;
          break;
      }
    }
  }

  std::size_t num_columns() const { return num_columns_; }
  std::size_t first_artificial() const { return first_artificial_; }

  void set_objective(const std::vector<double>& cost) {
    cost_ = cost;
    double scale = 1.0;
    for (double c : cost_) scale = std::max(scale, std::abs(c));
    reduced_tolerance_ = 1e-10 * scale;
    reduced_.assign(num_columns_, 0.0);
    for (std::size_t j = 0; j < num_columns_; ++j) {
      double z = 0.0;
      for (std::size_t i = 0; i < rows_; ++i) z += cost_[basis_[i]] * at(i, j);
      reduced_[j] = cost_[j] - z;
    }
  }

  double objective_value() const {
    double v = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) v += cost_[basis_[i]] * at(i, num_columns_);
    return v;
  }

  void run_to_optimality() {
    const std::size_t cap = 10000 + 100 * (rows_ + num_columns_);
    for (std::size_t iter = 0; iter < cap; ++iter) {
      std::size_t entering = num_columns_;
      for (std::size_t j = 0; j < num_columns_; ++j) {
        if (!banned_[j] && reduced_[j] > reduced_tolerance_) {
          entering = j;
          break;
        }
      }
      if (entering == num_columns_) return;

      std::size_t leaving = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        const double a = at(i, entering);
        if (a <= kPivotTolerance) continue;
        const double ratio = std::max(at(i, num_columns_), 0.0) / a;
        if (leaving == rows_ || ratio < best_ratio - kRatioTieTolerance) {
          leaving = i;
          best_ratio = ratio;
        } else if (ratio <= best_ratio + kRatioTieTolerance && basis_[i] < basis_[leaving]) {
          leaving = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
      if (leaving == rows_) throw std::runtime_error("linear program is unbounded");
      pivot(leaving, entering);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  // Pivots zero-valued artificials out of the basis where possible, then bars
  // every artificial column from re-entering.
  void drop_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < first_artificial_) continue;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(at(i, j)) > kPivotTolerance) {
          pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = first_artificial_; j < num_columns_; ++j) banned_[j] = true;
  }

  // Restricts the search to the optimal face of the current objective.
  void freeze_optimal_face() {
    for (std::size_t j = 0; j < num_columns_; ++j) {
      if (reduced_[j] < -reduced_tolerance_) banned_[j] = true;
    }
  }

  std::vector<double> structural_values() const {
    std::vector<double> y(num_structural_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < num_structural_) y[basis_[i]] = std::max(at(i, num_columns_), 0.0);
    }
    return y;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return cells_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * width_ + j]; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j < width_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    const double f = reduced_.empty() ? 0.0 : reduced_[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j < num_columns_; ++j) reduced_[j] -= f * at(r, j);
      reduced_[c] = 0.0;
    }
    basis_[r] = c;
  }

  std::size_t num_structural_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t num_columns_ = 0;
  std::size_t width_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> cells_;
  std::vector<std::size_t> basis_;
  std::vector<bool> banned_;
  std::vector<double> cost_;
  std::vector<double> reduced_;
  double reduced_tolerance_ = 1e-10;
};

}  // namespace

std::optional<std::vector<double>> solve_dense(const DenseProgram& program) {
  const std::size_t n = program.objective.size();
  if (program.rows.size() != program.rhs.size() || program.rows.size() != program.senses.size()) {
    throw std::invalid_argument("solve_dense: row/rhs/sense count mismatch");
  }
  for (const auto& row : program.rows) {
    if (row.size() != n) throw std::invalid_argument("solve_dense: row width mismatch");
  }
  Tableau tableau(program);

  std::vector<double> cost(tableau.num_columns(), 0.0);
  for (std::size_t j = tableau.first_artificial(); j < cost.size(); ++j) cost[j] = -1.0;
  tableau.set_objective(cost);
  tableau.run_to_optimality();
  if (tableau.objective_value() < -kFeasibilityTolerance) return std::nullopt;
  tableau.drop_artificials();

  std::fill(cost.begin(), cost.end(), 0.0);
  std::copy(program.objective.begin(), program.objective.end(), cost.begin());
  tableau.set_objective(cost);
  tableau.run_to_optimality();

  for (std::size_t idx : program.lex_order) {
    tableau.freeze_optimal_face();
    std::fill(cost.begin(), cost.end(), 0.0);
    cost.at(idx) = 1.0;
    tableau.set_objective(cost);
    tableau.run_to_optimality();
  }
  return tableau.structural_values();
}

}  // namespace lp_detail

namespace {

using lp_detail::DenseProgram;
using lp_detail::RowSense;

// Turns raw solver output into a clean probability vector.
Strategy to_strategy(std::vector<double> x) {
  double total = 0.0;
  for (double& v : x) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    for (double& v : x) v /= total;
  }
  return Strategy(std::move(x));
}

std::vector<std::size_t> arm_order(std::size_t k) {
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

}  // namespace

void SimplexPolytopeLP::validate() const {
  const std::size_t k = objective.size();
  if (k == 0) throw std::invalid_argument("LP needs at least one arm");
  if (constraint_matrix.size() != bounds.size()) {
    throw std::invalid_argument("LP constraint matrix and bounds disagree on row count");
  }
  for (double c : objective) {
    if (!std::isfinite(c)) throw std::invalid_argument("LP objective is not finite");
  }
  for (std::size_t i = 0; i < constraint_matrix.size(); ++i) {
    if (constraint_matrix[i].size() != k) {
      throw std::invalid_argument("LP constraint row " + std::to_string(i) + " has wrong width");
    }
    for (double v : constraint_matrix[i]) {
      if (!std::isfinite(v)) throw std::invalid_argument("LP constraint coefficient is not finite");
    }
    if (!std::isfinite(bounds[i])) throw std::invalid_argument("LP bound is not finite");
  }
}

double SimplexPolytopeLP::max_violation(const Strategy& x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    worst = std::max(worst, x.dot(constraint_matrix[i]) - bounds[i]);
  }
  return worst;
}

std::optional<LpSolution> solve(const SimplexPolytopeLP& lp) {
  lp.validate();
  const std::size_t k = lp.num_arms();
  DenseProgram program;
  program.objective = lp.objective;
  program.rows = lp.constraint_matrix;
  program.rhs = lp.bounds;
  program.senses.assign(lp.num_constraints(), RowSense::kLessEqual);
  program.rows.emplace_back(k, 1.0);
  program.rhs.push_back(1.0);
  program.senses.push_back(RowSense::kEqual);
  program.lex_order = arm_order(k);

  auto y = lp_detail::solve_dense(program);
  if (!y) return std::nullopt;
  Strategy x = to_strategy(std::move(*y));
  if (lp.max_violation(x) > kFeasibilityTolerance) {
    throw std::runtime_error("simplex returned a point outside the feasible region");
  }
  const double value = x.dot(lp.objective);
  return LpSolution{std::move(x), value};
}

MarginSolution max_margin(const Matrix& constraint_matrix, const std::vector<double>& bounds,
                          std::size_t num_arms) {
  if (num_arms == 0) throw std::invalid_argument("max_margin: need at least one arm");
  if (constraint_matrix.size() != bounds.size()) {
    throw std::invalid_argument("max_margin: matrix and bounds disagree on row count");
  }
  if (bounds.empty()) {
    return {Strategy::unit(num_arms, 0), std::numeric_limits<double>::infinity()};
  }
  // Margin s is free; shift it by a known lower bound so s' = s - floor >= 0.
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (constraint_matrix[i].size() != num_arms) throw std::invalid_argument("max_margin: row width mismatch");
    const double worst_cost = *std::max_element(constraint_matrix[i].begin(), constraint_matrix[i].end());
    floor = std::min(floor, bounds[i] - worst_cost);
  }
  floor -= 1.0;

  DenseProgram program;
  program.objective.assign(num_arms + 1, 0.0);
  program.objective[num_arms] = 1.0;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    std::vector<double> row = constraint_matrix[i];
    row.push_back(1.0);
    program.rows.push_back(std::move(row));
    program.rhs.push_back(bounds[i] - floor);
    program.senses.push_back(RowSense::kLessEqual);
  }
  std::vector<double> simplex_row(num_arms, 1.0);
  simplex_row.push_back(0.0);
  program.rows.push_back(std::move(simplex_row));
  program.rhs.push_back(1.0);
  program.senses.push_back(RowSense::kEqual);
  program.lex_order = arm_order(num_arms);

  auto y = lp_detail::solve_dense(program);
  if (!y) throw std::runtime_error("max_margin: simplex reported an empty simplex");
  y->pop_back();
  Strategy x = to_strategy(std::move(*y));
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    margin = std::min(margin, bounds[i] - x.dot(constraint_matrix[i]));
  }
  return {std::move(x), margin};
}

namespace {

// Gaussian elimination with partial pivoting; nullopt when singular.
std::optional<std::vector<double>> solve_square(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

std::optional<LpSolution> brute_force_optimum(const SimplexPolytopeLP& lp) {
  lp.validate();
  const std::size_t k = lp.num_arms();
  const std::size_t m = lp.num_constraints();
  if (k > 6 || m > 4) throw std::invalid_argument("brute_force_optimum: requires K <= 6 and m <= 4");

  // Candidate active sets: choose K-1 rows among {x_j >= 0} ∪ {A_i x <= b_i}.
  const std::size_t pool = k + m;
  std::optional<LpSolution> best;
  std::vector<bool> pick(pool, false);
  for (std::size_t j = 0; j + 1 < k; ++j) pick[j] = true;
  do {
    Matrix a;
    std::vector<double> b;
    a.emplace_back(k, 1.0);
    b.push_back(1.0);
    for (std::size_t p = 0; p < pool; ++p) {
      if (!pick[p]) continue;
      if (p < k) {
        std::vector<double> row(k, 0.0);
        row[p] = 1.0;
        a.push_back(std::move(row));
        b.push_back(0.0);
      } else {
        a.push_back(lp.constraint_matrix[p - k]);
        b.push_back(lp.bounds[p - k]);
      }
    }
    auto point = solve_square(std::move(a), std::move(b));
    if (!point) continue;
    bool feasible = true;
    for (double v : *point) feasible = feasible && v >= -kFeasibilityTolerance;
    if (!feasible) continue;
    for (double& v : *point) v = std::max(v, 0.0);
    double total = std::accumulate(point->begin(), point->end(), 0.0);
    for (double& v : *point) v /= total;
    Strategy x(std::move(*point));
    if (lp.max_violation(x) > kFeasibilityTolerance) continue;
    const double value = x.dot(lp.objective);
    if (!best || value > best->value) best = LpSolution{std::move(x), value};
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace repbandit
