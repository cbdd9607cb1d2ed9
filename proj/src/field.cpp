#include "hsagg/field.hpp"

#include <stdexcept>
#include <string>

namespace hsagg {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t f = 3; f * f <= n; f += 2)
    if (n % f == 0) return false;
  return true;
}

std::uint64_t next_prime_above(std::uint64_t bound) {
  std::uint64_t c = bound + 1;
  while (!is_prime(c)) ++c;
  return c;
}

FieldConfig::FieldConfig(std::uint32_t p_, std::uint32_t q_, std::uint32_t K_)
    : p(p_), q(q_), K(K_) {
  if (K < 2) throw std::invalid_argument("FieldConfig: K must be at least 2");
  if (q < 2) throw std::invalid_argument("FieldConfig: q must be at least 2");
  if (!is_prime(p)) throw std::invalid_argument("FieldConfig: p = " + std::to_string(p) + " is not prime");
  if (std::uint64_t(p) <= std::uint64_t(K) * (q - 1))
    throw std::invalid_argument("FieldConfig: need p > K*(q-1) for the integer lift");
}

std::uint32_t fp_pow(std::uint32_t a, std::uint64_t e, std::uint32_t p) {
  std::uint64_t base = a % p, acc = 1;
  while (e) {
    if (e & 1) acc = acc * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(acc);
}

std::uint32_t fp_inv(std::uint32_t a, std::uint32_t p) {
  if (a % p == 0) throw std::domain_error("fp_inv: zero has no inverse");
  return fp_pow(a % p, p - 2, p);
}

}  // namespace hsagg
