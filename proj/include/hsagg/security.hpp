#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsagg/field.hpp"
#include "hsagg/gc_code.hpp"
#include "hsagg/matrix.hpp"
#include "hsagg/protocol.hpp"
#include "hsagg/rational.hpp"

namespace hsagg {

// One party's view as exact linear algebra: observed symbols are
// M_theta * theta + M_z * z for uniform independent z. Theta columns cover
// only the real (unpadded) model entries; pad entries are constants and are
// stripped when observations are assembled.
struct LinearObservation {
  FieldMatrix M_theta;
  FieldMatrix M_z;
  std::string label;
};

// Observation of a set of messages (client or relay), stripping pad columns.
LinearObservation observe_client_messages(const std::vector<ClientMessage>& msgs,
                                          const Layout& lay, const std::string& label);
LinearObservation observe_relay_messages(const std::vector<RelayMessage>& msgs,
                                         const Layout& lay, const std::string& label);

// L rows: row l has coefficient 1 on theta entry l of every client.
FieldMatrix sum_target_rows(const Layout& lay, std::uint32_t p);

// Leaked degrees of freedom at a relay: dimension of the model-coefficient
// space reachable by randomness-cancelling combinations,
//   rank([M_theta | M_z]) - rank(M_z).
// Zero iff the view is independent of the models (linear schemes, uniform z).
std::uint32_t relay_leakage(const LinearObservation& obs);

// Leaked DoF at the server beyond the all-clients sum: with N spanning
// {v : v*M_z = 0}, rank([N*M_theta ; T]) - rank(T) for the sum-target rows T.
// Zero iff every randomness-cancelling combination reveals only the sum.
std::uint32_t server_leakage(const LinearObservation& obs, const FieldMatrix& sum_targets);

// True when every randomness-cancelling combination of complete relay
// outputs reveals only per-coordinate sums. Checked on one symbolic segment
// with all relays present; zero leakage there is a column-space containment
// that survives dropping relay rows and repeats per segment, so the single
// check covers every survivor set and every model length.
bool verify_output_masking(const GcCode& code, const FieldMatrix& gs);

// build_gs redrawn until verify_output_masking accepts the pair. The first
// attempt uses rng_seed unchanged, so an already-compatible draw is identical
// to plain build_gs. Throws ConstructionFailed when the retry bound is hit.
// Can fail for every generator draw: the generator's first column is forced
// to (1,..,1,-(K-1)) by the zero-column-sum construction, and a code whose
// key-mixing null space contains that vector admits no compatible generator.
FieldMatrix build_gs_for_code(const FieldConfig& cfg, std::uint32_t d, const GcCode& code,
                              std::uint64_t rng_seed);

// construct_code and build_gs drawn together until verify_output_masking
// accepts the pair: generator redraws cure the common collision, code
// redraws the rare draw no generator can mask. First attempt uses both seeds
// unchanged. Throws ConstructionFailed when the bounded search is exhausted.
std::pair<GcCode, FieldMatrix> build_masked_pair(const FieldConfig& cfg, const Topology& topo,
                                                 std::uint32_t s, std::uint32_t d,
                                                 std::uint64_t code_seed, std::uint64_t gs_seed);

// Exact mutual information by full enumeration of (theta, z). Counts are
// integers; the zero verdict is an integer independence check and the nonzero
// value is reported as an exact map prime -> rational with
// MI = sum coeff * ln(prime). With theta_alphabet = p the map degenerates to
// a single rational multiple of ln p.
struct MiResult {
  bool zero = true;
  std::map<std::uint64_t, Rat> log_terms;
  double nats() const;
};

// conditioning, when present, holds the sum-target rows: the result is then
// I(theta; view | sum). Budget counts theta_alphabet^{theta_cols} * p^{z_cols}
// joint assignments; throws TooLarge beyond it.
MiResult brute_force_mi(const LinearObservation& obs, const FieldConfig& cfg,
                        std::uint32_t theta_alphabet,
                        const std::optional<FieldMatrix>& conditioning,
                        std::uint64_t budget = 10'000'000);

}  // namespace hsagg
