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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "repbandit/estimator.hpp"
#include "repbandit/random.hpp"

using namespace repbandit;

namespace {

RepMeanParams params_with(double cell, double offset) {
  RepMeanParams p;
  p.delta_prime = 0.05;
  p.rho_prime = 0.2;
  p.tolerance = cell;
  p.grid_cell = cell;
  p.offset = offset;
  return p;
}

}  // namespace

TEST_CASE("rep_mean rounds to the midpoint of the shifted cell") {
  const RepMeanParams p = params_with(0.2, 0.1);
  const std::vector<double> samples = {0.43, 0.43, 0.43, 0.43};
  CHECK(rep_mean(samples, p) == doctest::Approx(0.4).epsilon(1e-12));

  // Means 0.41 and 0.43 share the cell [0.3, 0.5).
  CHECK(rep_mean(std::vector<double>{0.41}, p) == rep_mean(std::vector<double>{0.43}, p));
  CHECK(rep_mean(std::vector<double>{0.0, 1.0, 0.23}, p) == rep_mean(std::vector<double>{0.41}, p));
}

TEST_CASE("rep_mean clamps below the offset and at one") {
  for (double off : {0.0, 0.05, 0.2}) {
    const RepMeanParams p = params_with(0.2, off);
    CHECK(rep_mean(std::vector<double>{0.0, 0.0}, p) == doctest::Approx(std::min(off + 0.1, 1.0)));
  }
  CHECK(rep_mean(std::vector<double>{1.0}, params_with(0.2, 0.15)) == 1.0);
}

TEST_CASE("rep_mean rejects empty input and invalid parameters") {
  CHECK_THROWS_AS(rep_mean(std::vector<double>{}, params_with(0.2, 0.1)), std::invalid_argument);
  CHECK_THROWS_AS(rep_mean_from_sum(0.0, 0, params_with(0.2, 0.1)), std::invalid_argument);
  CHECK_THROWS_AS(RepMeanParams::make(0.1, 0.2, 0.1, 0.5), std::invalid_argument);  // 2 delta' == rho'
  CHECK_THROWS_AS(RepMeanParams::make(0.05, 1.0, 0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(RepMeanParams::make(0.05, 0.2, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(rep_mean(std::vector<double>{1.5}, params_with(0.2, 0.1)), std::invalid_argument);
}

TEST_CASE("grid cell") {
  // 2 * 0.01 / (1 + 0.1 - 0.02)
  CHECK(grid_cell(0.01, 0.01, 0.1) == doctest::Approx(0.0185185185185185).epsilon(1e-12));
  const RepMeanParams p = RepMeanParams::make(0.01, 0.1, 0.01, 0.5);
  CHECK(p.grid_cell == doctest::Approx(0.0185185185185185).epsilon(1e-12));
  CHECK(p.offset == doctest::Approx(0.5 * p.grid_cell));
}

TEST_CASE("confidence width") {
  CHECK(confidence_width(0, 0.05, 0.5) == confidence_width(1, 0.05, 0.5));
  for (std::uint64_t n : {1ULL, 3ULL, 100ULL, 12345ULL}) {
    CHECK(confidence_width(4 * n, 0.05, 0.5) == doctest::Approx(confidence_width(n, 0.05, 0.5) / 2).epsilon(1e-15));
  }
  CHECK(confidence_width(100, 0.05, 0.5) == doctest::Approx(0.6790507578703098).epsilon(1e-13));
  CHECK_THROWS_AS(confidence_width(10, 0.3, 0.5), std::invalid_argument);
}

TEST_CASE("samples_for_tolerance inverts the width") {
  // ceil(2 ln 40 / (0.1^2 * 0.1^2))
  CHECK(samples_for_tolerance(0.1, 0.05, 0.2) == 73778);
  const std::uint64_t n = samples_for_tolerance(0.05, 0.01, 0.3);
  CHECK(confidence_width(n, 0.01, 0.3) <= 0.05);
  CHECK(confidence_width(n - 1, 0.01, 0.3) > 0.05);
}

TEST_CASE("outputs are quantized") {
  UniformStream s = RandomSource(11).derive_stream({StreamPurpose::kTest, 1, 2, 3, 4});
  for (int i = 0; i < 2000; ++i) {
    const RepMeanParams p = RepMeanParams::make(0.05, 0.2, 0.01 + 0.3 * s.next_uniform(), s.next_uniform());
    const double mean = s.next_uniform();
    const double out = rep_mean_from_sum(mean * 10.0, 10, p);
    if (out == 1.0) continue;
    const double z = (out - p.offset) / p.grid_cell - 0.5;
    CHECK(z >= -1e-9);
    CHECK(std::abs(z - std::round(z)) < 1e-6);
  }
}

TEST_CASE("from-sum form matches the sample form") {
  const std::vector<double> samples = {0.1, 0.9, 0.3, 0.7, 1.0, 0.0, 0.25};
  double sum = 0.0;
  for (double v : samples) sum += v;
  const RepMeanParams p = RepMeanParams::make(0.05, 0.2, 0.07, 0.31);
  CHECK(rep_mean(samples, p) == rep_mean_from_sum(sum, samples.size(), p));
}
