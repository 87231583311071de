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

#include "repbandit/random.hpp"

#include <array>
#include <stdexcept>

#include "repbandit/strategy.hpp"

namespace repbandit {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Absorbs one word into the running key. Position-dependent so that swapping
// two label fields changes the result.
std::uint64_t absorb(std::uint64_t state, std::uint64_t word, std::uint64_t pos) {
  return mix64(state ^ mix64(word + (pos + 1) * kGolden));
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t UniformStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double UniformStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

UniformStream RandomSource::derive_stream(const StreamLabel& label) const {
  const std::array<std::uint64_t, 5> words = {
      static_cast<std::uint64_t>(label.purpose), label.epoch, label.arm,
      label.constraint, label.round};
  std::uint64_t key = mix64(root_seed_ ^ 0x5851F42D4C957F2DULL);
  for (std::uint64_t i = 0; i < words.size(); ++i) key = absorb(key, words[i], i);
  return UniformStream(key);
}

std::uint64_t RandomSource::derive_seed(const StreamLabel& label) const {
  return derive_stream(label).next_u64();
}

std::size_t sample_categorical(std::span<const double> x, double u) {
  if (!is_on_simplex(x)) {
    throw std::invalid_argument("sample_categorical: strategy is not a point of the simplex");
  }
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (x[a] <= 0.0) continue;
    cumulative += x[a];
    last_positive = a;
    if (u <= cumulative) return a;
  }
  // Only reachable when rounding leaves the total just below u.
  return last_positive;
}

std::size_t sample_categorical(UniformStream& stream, std::span<const double> x) {
  return sample_categorical(x, stream.next_uniform());
}

}  // namespace repbandit
