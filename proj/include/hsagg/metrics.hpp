#pragma once

#include <array>
#include <cstdint>

#include "hsagg/field.hpp"
#include "hsagg/gc_code.hpp"
#include "hsagg/keygen.hpp"
#include "hsagg/rational.hpp"
#include "hsagg/topology.hpp"

namespace hsagg {

// A rate as an exact rational, optionally times the unit log(p)/log(q).
// Only like units compare.
struct RateValue {
  Rat value;
  bool has_unit = false;
};

struct RateReport {
  RateValue R1, R2, RS, RSsum;
  std::array<RateValue, 4> bounds{};          // lower bounds in the same order
  std::array<bool, 4> achieves_optimum{};     // measured == bound, exact
  std::uint32_t p = 0, q = 0;
};

// Symbol-count rates of a constructed scheme (messages are uniform symbols,
// so counts equal entropies): R1 = d*L_X/L, R2 = L_X/L, RS = (L_X/L)*u,
// RSsum = (L_seed*L_X/L)*u with u = log p / log q and L = L_X * segment_len.
RateReport measured_rates(const KeySchedule& sched, const GcCode& code,
                          const FieldConfig& cfg, const Topology& topo);

// Optimal-region lower bounds: (d/(d-s), max{1/(d-s), 1/(K-1)},
// max{1/(d-s), 1/(K-1)}*u, max{d/(d-s), (K-d)/(d-s)}*u).
// Throws std::invalid_argument unless 0 <= s < d <= K-1.
std::array<RateValue, 4> theorem1_bounds(std::uint32_t K, std::uint32_t d, std::uint32_t s,
                                         const FieldConfig& cfg);

// measured >= bound per rate (exact); the report's achieves_optimum flags
// record the equalities.
std::array<bool, 4> check_in_region(const RateReport& report);

}  // namespace hsagg
