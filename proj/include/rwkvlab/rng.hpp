// Copyright 2026 The rwkvlab Authors. Apache 2.0 License.
//
// SplitMix64 generator. The stream is fully defined by the seed so results
// reproduce across platforms and languages:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// uniform() takes the top 53 bits: (next_u64() >> 11) * 2^-53, in [0, 1).
// normal() is Box-Muller over two uniforms (first output only, no caching).

#pragma once

#include <cstdint>

namespace rwkvlab {

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept { return next_u64() % bound; }

  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

}  // namespace rwkvlab
