#include "shardbench/hash.hpp"

namespace shardbench {
namespace {

constexpr std::uint64_t kSeedTag = 0xA24BAED4963EE407ull;

// Little-endian word assembly via explicit byte shifts so the result does not
// depend on host endianness.
std::uint64_t load_word_le(const std::uint8_t* p, std::size_t n) {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  }
  return w;
}

constexpr std::uint64_t byteswap64(std::uint64_t x) {
  x = ((x & 0x00FF00FF00FF00FFull) << 8) | ((x >> 8) & 0x00FF00FF00FF00FFull);
  x = ((x & 0x0000FFFF0000FFFFull) << 16) | ((x >> 16) & 0x0000FFFF0000FFFFull);
  return (x << 32) | (x >> 32);
}

constexpr std::uint64_t init_state(Seed seed) { return mix64(seed.value ^ kSeedTag); }

constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t word) {
  return mix64((h + kGoldenGamma) ^ mix64(word));
}

constexpr std::uint64_t finalize(std::uint64_t h, std::uint64_t length) {
  return mix64(h ^ (length * kGoldenGamma));
}

}  // namespace

HashValue hash64(std::span<const std::uint8_t> data, Seed seed) {
  std::uint64_t h = init_state(seed);
  const std::uint8_t* p = data.data();
  std::size_t remaining = data.size();
  while (remaining >= 8) {
    h = absorb(h, load_word_le(p, 8));
    p += 8;
    remaining -= 8;
  }
  if (remaining > 0) {
    h = absorb(h, load_word_le(p, remaining));
  }
  return finalize(h, data.size());
}

HashValue hash_pair(std::uint64_t a, std::uint64_t b, Seed seed) {
  // Equivalent to hash64 over BE(a) || BE(b): a big-endian octet string read
  // back as two little-endian words is the byte-swapped pair.
  std::uint64_t h = init_state(seed);
  h = absorb(h, byteswap64(a));
  h = absorb(h, byteswap64(b));
  return finalize(h, 16);
}

}  // namespace shardbench
