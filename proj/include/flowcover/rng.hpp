#pragma once

#include <cstdint>

namespace flowcover {

// Seed carried through every randomized operation. Identical seed and
// parameters must reproduce identical objects on every platform, which rules
// out std:: distributions (their output is implementation-defined); all draws
// go through the fixed engine below instead.
struct RngSeed {
  std::uint64_t value = 0;
};

// Finalizer of splitmix64 (Steele, Lea, Flood 2014). Bijective on uint64.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// splitmix64: full-period 64-bit generator, two multiplies per draw. Strong
// enough for simulation workloads and trivially portable.
class SplitMix64 {
 public:
  explicit SplitMix64(RngSeed seed) : state_(seed.value) {}
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, bound); bound must be nonzero. Multiply-shift rejection-free
  // mapping; bias below 2^-64 * bound, negligible for every use here.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// Derives an independent stream from a base seed and a stream key. Used to
// give each flow / trial / generator stage its own seed so that neither
// thread scheduling nor evaluation order can change what is drawn.
inline RngSeed substream(RngSeed base, std::uint64_t key) {
  return RngSeed{mix64(base.value + 0x9e3779b97f4a7c15ULL * (key + 1))};
}

}  // namespace flowcover
