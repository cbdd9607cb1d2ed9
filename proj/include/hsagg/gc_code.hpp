#pragma once

#include <cstdint>
#include <vector>

#include "hsagg/field.hpp"
#include "hsagg/matrix.hpp"
#include "hsagg/topology.hpp"

namespace hsagg {

// Straggler-resilient linear code: per (relay m, client k) encoder vectors
// w_{m,k} of length segment_len = d-s, and one combination matrix per size-s
// relay pattern. For every pattern f, every client k and coordinates l, l':
//   sum_{m not in f} C_f[l, m] * w_{m,k}[l'] = (l == l' ? 1 : 0),
// so any K-s relay outputs recover each segment's per-coordinate sums. The
// key rides at coordinate mask_coord[k-1]; its coefficient in every message
// is w_{m,k}[mask_coord-1] != 0, and the recovery identity leaves residual
// key coefficient 1 on every client exactly in row mask_coord, where the
// zero-sum key property cancels it.
struct GcCode {
  std::uint32_t K = 0;
  std::uint32_t d = 0;
  std::uint32_t s = 0;
  std::uint32_t p = 2;
  std::uint32_t segment_len = 0;  // d - s

  // encoders[m-1][k-1]: length segment_len when k in U_m, empty otherwise.
  std::vector<std::vector<FieldVector>> encoders;

  struct Combo {
    std::vector<std::uint32_t> pattern;  // sorted relay ids, size s
    FieldMatrix C;                       // segment_len x K, zero columns on pattern
  };
  std::vector<Combo> combos;  // lexicographically ordered by pattern

  std::vector<std::uint32_t> mask_coord;  // [k-1], 1-based, uniform across clients

  const FieldVector& encoder(std::uint32_t m, std::uint32_t k) const {
    return encoders[m - 1][k - 1];
  }
};

// Evaluation-based construction: distinct nonzero points a_1..a_K, client
// polynomials Z_k(x) = prod_{m not in R_k} (x - a_m) (so w vanishes off R_k),
// and per coordinate l' a multiplier v_{k,l'} making Z_k * v_{k,l'} hit unit
// coefficient patterns on degrees x^{K-d}..x^{K-s-1}; then w_{m,k}[l'] =
// Z_k(a_m) * v_{k,l'}(a_m). Degrees stay below K-s, so every size-s pattern
// is decodable by coefficient extraction; each C_f is found with
// mat_solve_left and the whole code re-verified before returning.
// mask_coord = segment_len for every client (its multiplier is v = 1, making
// the mask coefficient Z_k(a_m) != 0 unconditionally).
// Throws std::invalid_argument unless 0 <= s < d <= K-1, ConstructionFailed
// after bounded retries (remedy: larger p).
GcCode construct_code(const FieldConfig& cfg, const Topology& topo, std::uint32_t s,
                      std::uint64_t rng_seed);

// Matrix of the lexicographically smallest stored pattern containing
// `missing`. Throws TooManyMissing when |missing| > s.
const FieldMatrix& combination_matrix(const GcCode& code,
                                      const std::vector<std::uint32_t>& missing);

// Exhaustive check of the recovery identity for every stored pattern, the
// nonzero mask coefficients, and the pattern count C(K, s).
bool verify_recovery(const GcCode& code);

std::uint64_t binomial(std::uint32_t n, std::uint32_t k);

// All size-s subsets of {1..K} in lexicographic order.
std::vector<std::vector<std::uint32_t>> all_patterns(std::uint32_t K, std::uint32_t s);

}  // namespace hsagg
