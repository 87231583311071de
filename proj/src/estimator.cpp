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

#include "repbandit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace repbandit {

void check_replicability_split(double delta_prime, double rho_prime) {
  if (!(delta_prime > 0.0 && 2.0 * delta_prime < rho_prime && rho_prime < 1.0)) {
    throw std::invalid_argument("replicability parameters must satisfy 0 < 2*delta' < rho' < 1 (got delta'=" +
                                std::to_string(delta_prime) + ", rho'=" + std::to_string(rho_prime) + ")");
  }
}

double grid_cell(double tolerance, double delta_prime, double rho_prime) {
  return 2.0 * tolerance / (1.0 + rho_prime - 2.0 * delta_prime);
}

double confidence_width(std::uint64_t n_at_epoch_start, double delta_prime, double rho_prime) {
  check_replicability_split(delta_prime, rho_prime);
  const double n = static_cast<double>(std::max<std::uint64_t>(n_at_epoch_start, 1));
  const double gap = rho_prime - 2.0 * delta_prime;
  return std::sqrt(2.0 * std::log(2.0 / delta_prime) / (n * (gap * gap)));
}

std::uint64_t samples_for_tolerance(double epsilon, double delta_prime, double rho_prime) {
  check_replicability_split(delta_prime, rho_prime);
  if (!(epsilon > 0.0)) throw std::invalid_argument("samples_for_tolerance: epsilon must be positive");
  const double gap = rho_prime - 2.0 * delta_prime;
  return static_cast<std::uint64_t>(
      std::ceil(2.0 * std::log(2.0 / delta_prime) / (epsilon * epsilon * gap * gap)));
}

RepMeanParams RepMeanParams::make(double delta_prime, double rho_prime, double tolerance,
                                  double offset_uniform) {
  check_replicability_split(delta_prime, rho_prime);
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) {
    throw std::invalid_argument("RepMean tolerance must be positive and finite");
  }
  if (!(offset_uniform >= 0.0 && offset_uniform <= 1.0)) {
    throw std::invalid_argument("RepMean offset draw must lie in [0,1]");
  }
  RepMeanParams p;
  p.delta_prime = delta_prime;
  p.rho_prime = rho_prime;
  p.tolerance = tolerance;
  p.grid_cell = repbandit::grid_cell(tolerance, delta_prime, rho_prime);
  p.offset = offset_uniform * p.grid_cell;
  return p;
}

RepMeanParams RepMeanParams::for_sample_count(std::uint64_t n, double delta_prime, double rho_prime,
                                              double offset_uniform) {
  return make(delta_prime, rho_prime, confidence_width(n, delta_prime, rho_prime), offset_uniform);
}

void RepMeanParams::validate() const {
  check_replicability_split(delta_prime, rho_prime);
  if (!(grid_cell > 0.0) || !std::isfinite(grid_cell)) {
    throw std::invalid_argument("RepMean grid cell must be positive and finite");
  }
  if (!(offset >= 0.0 && offset <= grid_cell)) {
    throw std::invalid_argument("RepMean offset must lie in [0, grid_cell]");
  }
}

double rep_mean_from_sum(double sum, std::uint64_t count, const RepMeanParams& params) {
  if (count == 0) throw std::invalid_argument("rep_mean: empty sample set");
  params.validate();
  const double mean = sum / static_cast<double>(count);
  const double z = std::floor(std::max((mean - params.offset) / params.grid_cell, 0.0));
  return std::min(params.offset + (z + 0.5) * params.grid_cell, 1.0);
}

double rep_mean(std::span<const double> samples, const RepMeanParams& params) {
  if (samples.empty()) throw std::invalid_argument("rep_mean: empty sample set");
  double sum = 0.0;
  for (double s : samples) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("rep_mean: sample outside [0,1]");
    sum += s;
  }
  return rep_mean_from_sum(sum, samples.size(), params);
}

}  // namespace repbandit
