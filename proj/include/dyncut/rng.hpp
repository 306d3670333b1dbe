#pragma once

#include <cstdint>

namespace dyncut {

/// SplitMix64 finalizer. Used as the mixing primitive for all seeded
/// randomness in the library so that runs are reproducible across
/// platforms (std:: distributions are not bit-portable).
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (mix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

/// Counter-based priority: a pure function of (seed, stream, counter).
/// Streams drawn from distinct (seed, stream) pairs are independent for
/// all practical purposes, which is what the batched local-cut runs need.
inline std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t counter) {
  return mix64(hash_combine(hash_combine(seed, stream), counter));
}

/// Small deterministic generator with explicit state, equivalent to
/// iterating counter_draw. Bounded draws use rejection sampling so the
/// output does not depend on the platform's division behavior.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix64(seed ^ 0x5851f42d4c957f2dULL)) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : state_(hash_combine(mix64(seed), mix64(stream))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t next_below(std::uint64_t bound) {
    // Rejection from the top of the range keeps the draw exactly uniform.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace dyncut
