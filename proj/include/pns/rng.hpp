#pragma once

#include <cstdint>

namespace pns {

// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
// needed so that outputs are reproducible across platforms and standard
// library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 bits of randomness.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). n must be positive.
  uint64_t bounded(uint64_t n) {
    const uint64_t threshold = -n % n;
    for (;;) {
      const uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  uint64_t state_;
};

// Derives an independent stream for (seed, index) pairs, e.g. one stream per
// generated instance.
inline uint64_t substream_seed(uint64_t seed, uint64_t index) {
  SplitMix64 rng(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xd1b54a32d192ed03ULL));
  rng.next();
  return rng.next();
}

}  // namespace pns
