#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hsagg/field.hpp"
#include "hsagg/gc_code.hpp"
#include "hsagg/keygen.hpp"
#include "hsagg/matrix.hpp"
#include "hsagg/topology.hpp"

namespace hsagg {

// Column layout shared by payloads, traces and audits. Model entries are
// padded with zeros to a multiple of segment_len; theta columns enumerate the
// padded entries client-major, z columns enumerate source symbols
// segment-major.
struct Layout {
  std::uint32_t K = 0;
  std::uint32_t L = 0;       // true model length
  std::uint32_t L_pad = 0;   // padded length, multiple of segment_len
  std::uint32_t L_t = 0;     // segment_len
  std::uint32_t L_X = 0;     // segments = L_pad / L_t
  std::uint32_t L_seed = 0;  // source symbols per segment

  std::size_t theta_cols() const { return std::size_t(K) * L_pad; }
  std::size_t z_cols() const { return std::size_t(L_X) * L_seed; }
  std::size_t theta_col(std::uint32_t k, std::uint32_t l) const {  // 1-based
    return std::size_t(k - 1) * L_pad + (l - 1);
  }
  std::size_t z_col(std::uint32_t lx, std::uint32_t j) const {  // 1-based
    return std::size_t(lx - 1) * L_seed + (j - 1);
  }
  bool is_pad_col(std::size_t theta_column) const {
    return theta_column % L_pad >= L;
  }
};

Layout make_layout(std::uint32_t K, std::uint32_t L, std::uint32_t segment_len,
                   std::uint32_t L_seed);

struct LocalModel {
  std::uint32_t owner = 0;          // client id, 1-based
  std::vector<std::uint32_t> entries;  // values in {0, ..., q-1}, length L
};

// Exact linear expression of a payload over all padded model entries and all
// source symbols: payload = theta * model_vec + z * source_vec.
struct SymbolTrace {
  FieldMatrix theta;  // L_X x theta_cols
  FieldMatrix z;      // L_X x z_cols
};

struct ClientMessage {
  std::uint32_t from = 0;  // client
  std::uint32_t to = 0;    // relay
  FieldVector payload;     // length L_X
  SymbolTrace trace;
};

struct RelayMessage {
  std::uint32_t from = 0;  // relay
  FieldVector payload;     // length L_X
  SymbolTrace trace;
};

struct AggregateResult {
  FieldVector finite_sum;                // length L, entries mod p
  std::vector<std::uint32_t> integer_sum;  // length L, entries <= K*(q-1)
  std::vector<std::uint32_t> used_pattern;
  std::uint32_t pad_len = 0;
};

// One message per relay in R_k, in R_k order. Segment lx of X_{m,k} is
// w_{m,k} . theta_segment + w_{m,k}[mask] * S_{k,lx}, and the trace mirrors
// that expression exactly (key expanded through G_S). `unmask_to`, when set,
// zeroes the key coefficient of the message to that relay (test hook for the
// leakage audits). Throws std::invalid_argument on shape mismatches.
std::vector<ClientMessage> client_encode(const LocalModel& model, const KeySchedule& sched,
                                         const GcCode& code, const Topology& topo,
                                         const FieldConfig& cfg,
                                         std::optional<std::uint32_t> unmask_to = std::nullopt);

// Sum of a complete inbox {X_{m,k}}_{k in U_m}; nullopt (Silent) when any
// expected message is absent, which removes m from V_1.
std::optional<RelayMessage> relay_aggregate(std::uint32_t m,
                                            const std::vector<ClientMessage>& inbox,
                                            const Topology& topo, const Layout& lay,
                                            std::uint32_t p);

// Applies the combination matrix of the lexicographically smallest pattern
// covering the missing relays, segment by segment, then truncates padding and
// lifts. nullopt = InsufficientRelays (|V_2| < K-s); no partial output.
std::optional<AggregateResult> server_decode(const std::vector<RelayMessage>& received,
                                             const GcCode& code, const FieldConfig& cfg,
                                             std::uint32_t L);

// Canonical representative of each entry; throws OutOfRange when an entry
// exceeds K*(q-1), which a true sum of K models never does.
std::vector<std::uint32_t> lift_to_integers(const FieldVector& finite_sum,
                                            const FieldConfig& cfg);

// Plaintext oracle: entry-wise integer sum of the models.
std::vector<std::uint32_t> plain_integer_sum(const std::vector<LocalModel>& models);

// Evaluates a trace on concrete (padded) model entries and source symbols.
FieldVector eval_trace(const SymbolTrace& trace, const FieldVector& theta_padded,
                       const FieldVector& z, std::uint32_t p);

// Padded concatenation of all model vectors in the layout's column order.
FieldVector pack_models(const std::vector<LocalModel>& models, const Layout& lay);

}  // namespace hsagg
