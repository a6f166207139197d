#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "shardbench/types.hpp"

namespace shardbench {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// murmur3 finalizer (fmix64). Bijective; full avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDull;
  x ^= x >> 33;
  x *= 0xC4CEB9FE1A85EC53ull;
  x ^= x >> 33;
  return x;
}

/// Deterministic, seedable 64-bit hash over an arbitrary byte sequence.
/// The one mixing function of the project: every placement algorithm and
/// every workload generator draws its randomness from here plus a Seed.
HashValue hash64(std::span<const std::uint8_t> data, Seed seed);

/// hash64 over the fixed-width big-endian concatenation of a and b,
/// computed without materializing the 16-byte buffer.
HashValue hash_pair(std::uint64_t a, std::uint64_t b, Seed seed);

/// splitmix64 sequence; used for workload/test value streams.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace shardbench
