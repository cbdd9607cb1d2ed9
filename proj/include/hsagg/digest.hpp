#pragma once

#include <cstdint>
#include <string>

#include "hsagg/gc_code.hpp"
#include "hsagg/matrix.hpp"

namespace hsagg {

// FNV-1a over a canonical serialization; stable across platforms, used to
// fingerprint schemes inside reports.
struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void update(std::uint64_t v);
  std::string hex() const;
};

std::string digest_matrix(const FieldMatrix& m);
std::string digest_code(const GcCode& code);

}  // namespace hsagg
