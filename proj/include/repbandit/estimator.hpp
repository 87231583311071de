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
#include <span>

namespace repbandit {

/// Parameters of one replicable mean estimate.
///
/// The estimator rounds the sample mean to the midpoint of a randomly shifted
/// grid. The grid cell is 2*tolerance / (1 + rho' - 2*delta'); with enough
/// samples to put the sample mean within tolerance*(rho'-2*delta')/(1+rho'-2*delta')
/// of the truth, the output is within `tolerance` of the mean with
/// probability 1 - delta' and two independent runs sharing the offset agree
/// with probability 1 - rho'.
struct RepMeanParams {
  double delta_prime = 0.0;
  double rho_prime = 0.0;
  double tolerance = 0.0;
  double grid_cell = 0.0;
  /// Grid shift in [0, grid_cell], drawn from the internal randomness.
  double offset = 0.0;

  /// `offset_uniform` is a draw in [0, 1) scaled onto [0, grid_cell].
  /// Throws std::invalid_argument on invalid probabilities or tolerance.
  static RepMeanParams make(double delta_prime, double rho_prime, double tolerance,
                            double offset_uniform);

  /// Builds params whose tolerance is the confidence width for n samples.
  static RepMeanParams for_sample_count(std::uint64_t n, double delta_prime, double rho_prime,
                                        double offset_uniform);

  void validate() const;
};

/// Throws std::invalid_argument unless 0 < 2*delta' < rho' < 1.
void check_replicability_split(double delta_prime, double rho_prime);

/// 2*tolerance / (1 + rho' - 2*delta').
double grid_cell(double tolerance, double delta_prime, double rho_prime);

/// sqrt(2 ln(2/delta') / (max(n,1) (rho' - 2 delta')^2)).
double confidence_width(std::uint64_t n_at_epoch_start, double delta_prime, double rho_prime);

/// Number of samples that makes confidence_width equal to epsilon (rounded up).
std::uint64_t samples_for_tolerance(double epsilon, double delta_prime, double rho_prime);

/// Replicable estimate from samples in [0,1], summed in the given order.
double rep_mean(std::span<const double> samples, const RepMeanParams& params);

/// Same estimate when the caller already holds the in-order running sum.
double rep_mean_from_sum(double sum, std::uint64_t count, const RepMeanParams& params);

}  // namespace repbandit
