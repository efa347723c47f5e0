#pragma once

#include <cstdint>

namespace hrm {

// SplitMix64 step function (Steele, Lea & Flood, "Fast splittable pseudorandom
// number generators", OOPSLA 2014). Every randomized component in this project
// draws exclusively from this generator, and the bounded/real mappings below
// are part of the reproducibility contract documented in the README: given the
// same seed, any implementation of the same recipe reproduces our corpora
// byte for byte.
inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One-shot scramble of a 64-bit value (a single SplitMix64 step).
inline std::uint64_t mix64(std::uint64_t value) {
  return splitmix64_step(value);
}

// Derives a child stream key from a parent key and an index. Used to give
// packets (and other independent sampling units) their own substreams whose
// contents do not depend on evaluation order.
inline std::uint64_t derive_key(std::uint64_t key, std::uint64_t index) {
  return mix64(key ^ (index + 0x9e3779b97f4a7c15ull + (key << 6) + (key >> 2)));
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64_step(state_); }

  // Uniform double in [0, 1), using the top 53 bits of one draw.
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), bound >= 1. Rejection keeps it unbiased:
  // draws below 2^64 mod bound are discarded.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t v = next();
      if (v >= threshold) return v % bound;
    }
  }

  // Uniform double in [lo, hi); returns lo when the range is degenerate.
  double next_real(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

 private:
  std::uint64_t state_;
};

}  // namespace hrm
