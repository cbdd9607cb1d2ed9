#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsagg/field.hpp"
#include "hsagg/gc_code.hpp"
#include "hsagg/matrix.hpp"
#include "hsagg/rational.hpp"

namespace hsagg {

// Ground-truth bundle for the K=5 reference scheme: generator, encoders,
// combination matrices, the expected per-message and per-relay coefficient
// displays, the key-mixing matrix, and the expected rates.
struct VectorFile {
  std::uint32_t p = 0, K = 0, d = 0, s = 0, q = 0, L = 0;
  FieldMatrix G_S;
  std::vector<std::uint32_t> mask_coord;

  struct ExpectedMessage {
    std::uint32_t m = 0, k = 0;
    FieldVector theta;       // encoder coefficients, length d-s
    std::uint32_t key = 0;   // key coefficient
  };
  struct ExpectedRelay {
    std::uint32_t m = 0;
    std::vector<FieldVector> theta;  // [k-1] -> length d-s (zeros off U_m)
    FieldVector key;                 // [k-1] -> key coefficient
  };

  GcCode code;  // encoders + combos rebuilt from the file
  std::vector<ExpectedMessage> expected_messages;
  std::vector<ExpectedRelay> expected_relays;
  FieldMatrix key_mixing;  // K x L_seed, rows sum_k key_{m,k} * G_S[k]
  std::vector<std::uint32_t> expected_decodes;  // dropout relay ids to verify
  Rat rate_R1, rate_R2, rate_RS, rate_RSsum;
};

VectorFile load_vector_file(const std::string& path);
void save_vector_file(const VectorFile& vf, const std::string& path);

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

// Every check the reference bundle must satisfy: config validity, generator
// invariants, recovery identities, per-message and per-relay coefficient
// equality, key-mixing matrix, decode identities for every listed dropout
// (symbolic and on concrete random episodes), and rate equalities.
std::vector<CheckResult> verify_example(const VectorFile& vf);

}  // namespace hsagg
