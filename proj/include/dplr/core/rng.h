// Copyright 2026 The dplr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPLR_CORE_RNG_H_
#define DPLR_CORE_RNG_H_

#include <cstdint>
#include <optional>
#include <random>

namespace dplr {

// SplitMix64 finalizer (Steele, Lea & Flood). Used for seed derivation only.
std::uint64_t SplitMix64(std::uint64_t x);

// Seed of the independent stream `index` under a user seed:
//   SplitMix64(seed ^ SplitMix64(index)).
// The harness derives one stream per sweep cell with this rule, and each run
// forks sub-streams (data, training, test) from its own stream seed the same
// way.
std::uint64_t DeriveStreamSeed(std::uint64_t seed, std::uint64_t index);

// Seedable random source with platform-independent output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard library distributions are not (their algorithms are
// implementation-defined), so the conversions to uniform reals, bounded
// integers and normals are implemented here:
//   - Uniform01: top 53 bits of one draw, scaled by 2^-53.
//   - UniformIndex: rejection sampling on the full 64-bit range.
//   - Gaussian: Marsaglia's polar method; the second variate of each accepted
//     pair is cached and returned by the next call.
// One instance belongs to exactly one thread of execution.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform01();
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::uint64_t UniformIndex(std::uint64_t n);
  // Standard normal.
  double Gaussian();

  // Independent child stream; does not advance this generator.
  SeededRng Fork(std::uint64_t index) const {
    return SeededRng(DeriveStreamSeed(seed_, index));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace dplr

#endif  // DPLR_CORE_RNG_H_
