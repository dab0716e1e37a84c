// Copyright 2026 The relaxround Authors
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

#ifndef RELAXROUND_RNG_HPP
#define RELAXROUND_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace relaxround {

// Splittable generator. Every random decision in the library goes through an
// Rng derived from a user seed; there is no global state. The bit streams are
// defined here (xoshiro256** seeded by splitmix64) rather than borrowed from
// <random> so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = SplitMix(s);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t NextU64() {
    const std::uint64_t result = Rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = Rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n) {
    // Lemire's nearly-divisionless rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(NextU64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(NextU64()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  double Normal() {
    // Box-Muller; the second variate is discarded to keep the stream simple.
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Independent child stream. Children with distinct ids never share state
  // with each other or with the parent.
  Rng Split(std::uint64_t stream) const {
    std::uint64_t s = seed_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
    return Rng(SplitMix(s) ^ Rotl(seed_, 17));
  }

  Rng Split(std::string_view label) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return Split(h);
  }

 private:
  static std::uint64_t Rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t SplitMix(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace relaxround

#endif  // RELAXROUND_RNG_HPP
