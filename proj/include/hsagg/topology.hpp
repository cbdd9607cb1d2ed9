#pragma once

#include <cstdint>
#include <vector>

namespace hsagg {

// Cyclic association of K clients and K relays with degree d. Client k sends
// to the d relays R_k = {k, k-1, ..., k-d+1} (mod K, 1-based); relay m hears
// the d clients U_m = {m, m+1, ..., m+d-1}. Duality m in R_k <=> k in U_m
// holds because both reduce to (k - m) mod K in {0, ..., d-1}.
struct Topology {
  std::uint32_t K = 0;
  std::uint32_t d = 0;
  std::vector<std::vector<std::uint32_t>> relay_sets;   // [k-1] -> ordered R_k
  std::vector<std::vector<std::uint32_t>> client_sets;  // [m-1] -> ordered U_m

  const std::vector<std::uint32_t>& relays_of(std::uint32_t k) const {
    return relay_sets[k - 1];
  }
  const std::vector<std::uint32_t>& clients_of(std::uint32_t m) const {
    return client_sets[m - 1];
  }
  bool sends_to(std::uint32_t k, std::uint32_t m) const {
    return (k + K - m) % K < d;
  }
};

// Throws std::invalid_argument when K < 2 or d outside [1, K].
Topology build_topology(std::uint32_t K, std::uint32_t d);

bool check_duality(const Topology& t);

}  // namespace hsagg
