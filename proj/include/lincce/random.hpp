// Copyright 2026 The lincce Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LINCCE_RANDOM_HPP
#define LINCCE_RANDOM_HPP

#include <cstdint>
#include <limits>
#include <span>

namespace lincce {

/// SplitMix64 finalizer. Used both as a stateless hash for counter-based
/// draws and as the step function of `Rng`.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Counter-based uniform draw keyed by (seed, counter, stream).
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t counter,
                               std::uint64_t stream = 0) noexcept {
  return to_unit(mix64(mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)) ^
                       (counter * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL)));
}

/// Small sequential generator (SplitMix64). Satisfies
/// UniformRandomBitGenerator so it also plugs into <random>.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  double uniform() noexcept { return to_unit((*this)()); }

  /// Independent child generator; does not advance this one.
  Rng fork(std::uint64_t stream) const noexcept {
    return Rng(mix64(state_ ^ mix64(stream + 0x632be59bd9b4e019ULL)));
  }

 private:
  std::uint64_t state_;
};

/// Inverse-CDF draw from a discrete distribution given u in [0, 1).
/// Zero-mass entries are never selected.
inline int sample_index(std::span<const double> probs, double u) {
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] <= 0.0) continue;
    last_positive = static_cast<int>(k);
    acc += probs[k];
    if (u < acc) return last_positive;
  }
  // Rounding can leave acc slightly below 1.
  return last_positive < 0 ? 0 : last_positive;
}

}  // namespace lincce

#endif  // LINCCE_RANDOM_HPP
