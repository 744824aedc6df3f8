/* Copyright 2026 The PerceptCane Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef PERCEPT_RNG_HPP_
#define PERCEPT_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace percept {

// Seeded generator with distribution mappings written out by hand, so a
// given seed yields the same stream with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);

  // Standard normal via Box-Muller (one draw per call, no caching).
  double Normal();

  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Order-sensitive combination of two 64-bit values.
std::uint64_t HashCombine(std::uint64_t seed, std::uint64_t value);

// FNV-1a over the bytes of `text`, finalized with Mix64.
std::uint64_t HashString(std::string_view text);

// Maps a hash to [0, 1).
double UnitInterval(std::uint64_t hash);

}  // namespace percept

#endif  // PERCEPT_RNG_HPP_
