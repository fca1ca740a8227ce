#pragma once

#include <cstdint>

namespace cgq {

// splitmix64: tiny deterministic generator used wherever reproducibility across
// platforms matters more than statistical quality (start vectors, sampled words).
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [-1, 1)
  double sreal() { return 2.0 * real() - 1.0; }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

}  // namespace cgq
