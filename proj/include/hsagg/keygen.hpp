#pragma once

#include <cstdint>
#include <vector>

#include "hsagg/field.hpp"
#include "hsagg/matrix.hpp"

namespace hsagg {

// Pool of i.i.d. uniform field symbols; one length-L_seed slice per segment,
// L_seed = max{d, K-d}.
struct SourceRandomness {
  FieldVector symbols;  // length L_X * L_seed
  std::uint64_t seed = 0;
};

// G_S is K x L_seed with zero column sums, every d-row subset of rank d and
// every (K-d)-row subset of rank K-d; keys[k-1][lx] is client k's key symbol
// for segment lx, the k-th entry of G_S * (segment slice of Z). Zero column
// sums make the K keys of every segment sum to zero.
struct KeySchedule {
  FieldMatrix G_S;
  std::vector<FieldVector> keys;  // [k-1] -> length L_X
};

inline std::uint32_t seed_len(std::uint32_t K, std::uint32_t d) {
  return d > K - d ? d : K - d;
}

// Rows 1..K-1 are Vandermonde rows on distinct nonzero points truncated to
// L_seed columns; row K is the negated sum of the others. Redraws points
// until verify_gs passes (bounded); throws ConstructionFailed after that,
// std::invalid_argument unless 1 <= d <= K-1.
FieldMatrix build_gs(const FieldConfig& cfg, std::uint32_t d, std::uint64_t rng_seed);

// Exhaustive check of all three invariant families (zero column sums, d-row
// subsets, (K-d)-row subsets).
bool verify_gs(const FieldMatrix& g, std::uint32_t d);

SourceRandomness draw_source(const FieldConfig& cfg, std::uint32_t d, std::uint32_t L_X,
                             std::uint64_t seed);

// Throws std::invalid_argument when src length != L_X * cols(G).
KeySchedule expand_keys(const FieldMatrix& g, const SourceRandomness& src, std::uint32_t L_X);

}  // namespace hsagg
