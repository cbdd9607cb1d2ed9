#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hsagg {

// Exact rational on int64 with __int128 intermediates. Always normalized:
// den > 0, gcd(|num|, den) = 1.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat() = default;
  Rat(std::int64_t n, std::int64_t d = 1) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return from128(i128(a.num) * b.den + i128(b.num) * a.den, i128(a.den) * b.den);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return from128(i128(a.num) * b.den - i128(b.num) * a.den, i128(a.den) * b.den);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from128(i128(a.num) * b.num, i128(a.den) * b.den);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw std::domain_error("Rat: division by zero");
    return from128(i128(a.num) * b.den, i128(a.den) * b.num);
  }
  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rat& a, const Rat& b) {
    return i128(a.num) * b.den < i128(b.num) * a.den;
  }
  friend bool operator<=(const Rat& a, const Rat& b) { return a == b || a < b; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator>=(const Rat& a, const Rat& b) { return b <= a; }

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  using i128 = __int128;

  static Rat from128(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("Rat: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    i128 a = n < 0 ? -n : n;
    i128 b = d;
    while (b) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw std::overflow_error("Rat: value exceeds 64-bit range");
    Rat r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    return r;
  }
};

}  // namespace hsagg
