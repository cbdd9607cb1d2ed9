#pragma once

#include <cstdint>
#include <vector>

namespace hsagg {

bool is_prime(std::uint64_t n);

// Smallest prime strictly greater than bound.
std::uint64_t next_prime_above(std::uint64_t bound);

// Shared parameters of one aggregation instance. p is the field modulus,
// q the per-entry model alphabet, K the client/relay count. The lift from
// the mod-p sum to the integer sum is a bijection because p > K*(q-1).
struct FieldConfig {
  std::uint32_t p;
  std::uint32_t q;
  std::uint32_t K;

  FieldConfig(std::uint32_t p_, std::uint32_t q_, std::uint32_t K_);
};

// Residue arithmetic mod p. All stored values are already reduced.
inline std::uint32_t fp_add(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  std::uint32_t s = a + b;
  return s >= p ? s - p : s;
}

inline std::uint32_t fp_sub(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return a >= b ? a - b : a + p - b;
}

inline std::uint32_t fp_neg(std::uint32_t a, std::uint32_t p) { return a == 0 ? 0 : p - a; }

inline std::uint32_t fp_mul(std::uint32_t a, std::uint32_t b, std::uint32_t p) {
  return static_cast<std::uint32_t>(std::uint64_t(a) * b % p);
}

std::uint32_t fp_pow(std::uint32_t a, std::uint64_t e, std::uint32_t p);

// Inverse of a != 0 via Fermat (p prime).
std::uint32_t fp_inv(std::uint32_t a, std::uint32_t p);

using FieldVector = std::vector<std::uint32_t>;

}  // namespace hsagg
