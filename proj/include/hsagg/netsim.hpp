#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "hsagg/field.hpp"
#include "hsagg/gc_code.hpp"
#include "hsagg/keygen.hpp"
#include "hsagg/metrics.hpp"
#include "hsagg/protocol.hpp"
#include "hsagg/topology.hpp"

namespace hsagg {

// Which transmissions fail. bernoulli draws every link independently;
// fixed replays the given pattern every trial; exhaustive maps the trial
// index onto the canonical enumeration (all failed_r2s subsets by ascending
// bitmask, then single c2r link failures, then pairs).
struct DropModel {
  enum class Kind { bernoulli, fixed, exhaustive };
  Kind kind = Kind::fixed;
  double p_c2r = 0.0;
  double p_r2s = 0.0;
  std::set<std::pair<std::uint32_t, std::uint32_t>> failed_c2r;  // (client, relay)
  std::set<std::uint32_t> failed_r2s;
  std::uint64_t seed = 0;
  std::uint32_t depth = 2;  // c2r combination depth in the exhaustive order
};

struct LinkRealization {
  std::set<std::pair<std::uint32_t, std::uint32_t>> failed_c2r;
  std::set<std::uint32_t> failed_r2s;
  std::vector<std::uint32_t> V1;  // relays with complete inboxes
  std::vector<std::uint32_t> V2;  // V1 minus failed relay->server links
};

// Deterministic given (model, trial). V1 = {m : no (k, m) failure, k in U_m},
// V2 = V1 minus failed_r2s.
LinkRealization realize_links(const DropModel& model, const Topology& topo,
                              std::uint64_t trial);

// Number of realizations the exhaustive order enumerates.
std::uint64_t exhaustive_count(const Topology& topo, std::uint32_t depth);

struct EpisodeResult {
  LinkRealization realization;
  std::optional<AggregateResult> outcome;  // nullopt = InsufficientRelays
  bool sum_matches_oracle = false;
  std::vector<std::uint32_t> relay_leaks;  // [m-1], on the arrived inbox
  std::uint32_t server_leak = 0;
  RateReport measured;
};

// encode -> c2r drops -> aggregate -> r2s drops -> decode; the leakage audit
// always runs, decode or not.
EpisodeResult run_episode(const FieldConfig& cfg, const Topology& topo,
                          const KeySchedule& sched, const GcCode& code,
                          const std::vector<LocalModel>& models,
                          const LinkRealization& realization);

// One episode per realization in the canonical exhaustive order. budget = 0
// yields an empty sweep; an unset budget requires K <= 6; a set budget
// smaller than the enumeration throws BudgetExceeded (no truncation).
std::vector<EpisodeResult> sweep_patterns(const FieldConfig& cfg, const Topology& topo,
                                          const KeySchedule& sched, const GcCode& code,
                                          const std::vector<LocalModel>& models,
                                          std::optional<std::uint64_t> budget = std::nullopt,
                                          std::uint32_t depth = 2);

}  // namespace hsagg
