#pragma once

#include <cstdint>

namespace govo {

// Seedable splitmix64 generator. Datasets and RANSAC draws must regenerate
// bit-identically on every platform, so std::uniform_* distributions
// (implementation-defined) are not used anywhere in this project.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit mantissa.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

  // Uniform integer in [0, n) via 128-bit multiply (no rejection loop).
  std::uint64_t next_below(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed, e.g. one per simulated frame.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x632be59bd9b4e019ull * (stream + 1)));
  return g.next_u64();
}

}  // namespace govo
