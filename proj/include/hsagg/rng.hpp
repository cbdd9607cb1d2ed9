#pragma once

#include <cstdint>
#include <random>

namespace hsagg {

// splitmix64: used only to derive independent stream seeds from (seed, index).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

// Uniform draw from {0, ..., n-1} by rejection. std::uniform_int_distribution
// is not pinned by the standard; mt19937_64 output is, so reports stay
// byte-identical across platforms.
inline std::uint64_t rand_below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;  // multiple of n
  std::uint64_t r;
  do {
    r = gen();
  } while (r >= limit);
  return r % n;
}

}  // namespace hsagg
