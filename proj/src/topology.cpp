#include "hsagg/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace hsagg {

Topology build_topology(std::uint32_t K, std::uint32_t d) {
  if (K < 2) throw std::invalid_argument("build_topology: K must be at least 2");
  if (d < 1 || d > K) throw std::invalid_argument("build_topology: need 1 <= d <= K");
  Topology t;
  t.K = K;
  t.d = d;
  t.relay_sets.resize(K);
  t.client_sets.resize(K);
  for (std::uint32_t k = 1; k <= K; ++k)
    for (std::uint32_t i = 1; i <= d; ++i)
      t.relay_sets[k - 1].push_back((k - i + K) % K + 1);
  for (std::uint32_t m = 1; m <= K; ++m)
    for (std::uint32_t i = 1; i <= d; ++i)
      t.client_sets[m - 1].push_back((m + i - 2) % K + 1);
  return t;
}

bool check_duality(const Topology& t) {
  for (std::uint32_t k = 1; k <= t.K; ++k)
    for (std::uint32_t m = 1; m <= t.K; ++m) {
      bool in_r = std::find(t.relay_sets[k - 1].begin(), t.relay_sets[k - 1].end(), m) !=
                  t.relay_sets[k - 1].end();
      bool in_u = std::find(t.client_sets[m - 1].begin(), t.client_sets[m - 1].end(), k) !=
                  t.client_sets[m - 1].end();
      if (in_r != in_u) return false;
    }
  return true;
}

}  // namespace hsagg
