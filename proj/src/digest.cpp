#include "hsagg/digest.hpp"

#include <array>

namespace hsagg {

void Fnv1a::update(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= v >> (8 * i) & 0xff;
    h *= 0x100000001b3ull;
  }
}

std::string Fnv1a::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[15 - i] = digits[h >> (4 * i) & 0xf];
  return out;
}

namespace {

void feed_matrix(Fnv1a& f, const FieldMatrix& m) {
  f.update(m.rows());
  f.update(m.cols());
  f.update(m.modulus());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) f.update(m.at(r, c));
}

}  // namespace

std::string digest_matrix(const FieldMatrix& m) {
  Fnv1a f;
  feed_matrix(f, m);
  return f.hex();
}

std::string digest_code(const GcCode& code) {
  Fnv1a f;
  f.update(code.K);
  f.update(code.d);
  f.update(code.s);
  f.update(code.p);
  f.update(code.segment_len);
  for (std::uint32_t m = 1; m <= code.K; ++m)
    for (std::uint32_t k = 1; k <= code.K; ++k) {
      const FieldVector& w = code.encoders[m - 1][k - 1];
      f.update(w.size());
      for (std::uint32_t v : w) f.update(v);
    }
  for (std::uint32_t mc : code.mask_coord) f.update(mc);
  for (const auto& combo : code.combos) {
    f.update(combo.pattern.size());
    for (std::uint32_t m : combo.pattern) f.update(m);
    feed_matrix(f, combo.C);
  }
  return f.hex();
}

}  // namespace hsagg
