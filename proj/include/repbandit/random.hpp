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
#include <limits>
#include <span>

namespace repbandit {

/// What a substream is used for. Algorithm-side purposes are drawn from the
/// internal-randomness root; environment purposes from the environment root.
enum class StreamPurpose : std::uint32_t {
  kGridOffset = 1,   // RepMean offset, keyed by (epoch, arm, constraint)
  kActionSample = 2, // a_t ~ x_t, keyed by round
  kEnvReward = 3,    // keyed by (round, arm)
  kEnvCost = 4,      // keyed by (round, arm, constraint)
  kSeedDerivation = 5,
  kTest = 6,
};

/// Structured key naming one substream. Unused coordinates must be kNone;
/// they still take part in the serialization, so (h=0) and (h=kNone) differ.
struct StreamLabel {
  static constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

  StreamPurpose purpose = StreamPurpose::kTest;
  std::uint64_t epoch = kNone;
  std::uint64_t arm = kNone;
  std::uint64_t constraint = kNone;
  std::uint64_t round = kNone;

  friend bool operator==(const StreamLabel&, const StreamLabel&) = default;
};

/// Counter-based uniform generator. The i-th value depends only on the key and
/// i, so copies replay identically and independently.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t key) : key_(key) {}

  /// Next value in [0, 1) with 53 random bits.
  double next_uniform();
  std::uint64_t next_u64();

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// A root seed from which labelled substreams are derived. Derivation is a
/// pure function of (root_seed, label); no state is shared between streams.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t root_seed) : root_seed_(root_seed) {}

  std::uint64_t root_seed() const { return root_seed_; }

  UniformStream derive_stream(const StreamLabel& label) const;

  /// First 64-bit value of the labelled stream; used to mint child seeds.
  std::uint64_t derive_seed(const StreamLabel& label) const;

 private:
  std::uint64_t root_seed_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Inverse-CDF draw of one arm from a probability vector. Cumulative sums are
/// taken in ascending arm order; u landing exactly on a boundary goes to the
/// lower arm. Throws std::invalid_argument if x is not on the simplex.
std::size_t sample_categorical(std::span<const double> x, double u);
std::size_t sample_categorical(UniformStream& stream, std::span<const double> x);

}  // namespace repbandit
