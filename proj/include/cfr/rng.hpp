#pragma once

#include <cstdint>

namespace cfr {

// Small deterministic generator (splitmix64). Used wherever reproducible
// byte-identical output matters; the standard distributions are
// implementation-defined and therefore avoided.
struct rng {
  std::uint64_t state;

  explicit rng(std::uint64_t seed) : state{seed} {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling keeps the distribution exact.
    std::uint64_t const limit = ~0ull - ~0ull % n;
    std::uint64_t x = next();
    while (x >= limit) {
      x = next();
    }
    return x % n;
  }

  // Uniform in [lo, hi] inclusive.
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }

  bool chance(double p) {
    return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
  }
};

}  // namespace cfr
