#include "hsagg/security.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "hsagg/errors.hpp"
#include "hsagg/keygen.hpp"
#include "hsagg/rng.hpp"

namespace hsagg {

namespace {

// Copy a trace's theta rows, dropping the padded (constant-zero) entries so
// the audit quantifies over the true model coordinates only.
void append_stripped(const SymbolTrace& trace, const Layout& lay, FieldMatrix& m_theta,
                     FieldMatrix& m_z, std::size_t& next_row) {
  for (std::size_t r = 0; r < trace.theta.rows(); ++r) {
    std::size_t out_c = 0;
    for (std::size_t c = 0; c < trace.theta.cols(); ++c) {
      if (lay.is_pad_col(c)) continue;
      m_theta.set(next_row, out_c++, trace.theta.at(r, c));
    }
    for (std::size_t c = 0; c < trace.z.cols(); ++c) m_z.set(next_row, c, trace.z.at(r, c));
    ++next_row;
  }
}

}  // namespace

LinearObservation observe_client_messages(const std::vector<ClientMessage>& msgs,
                                          const Layout& lay, const std::string& label) {
  const std::uint32_t p = msgs.empty() ? 2 : msgs.front().trace.theta.modulus();
  std::size_t rows = std::size_t(msgs.size()) * lay.L_X;
  LinearObservation obs;
  obs.M_theta = FieldMatrix(rows, std::size_t(lay.K) * lay.L, p);
  obs.M_z = FieldMatrix(rows, lay.z_cols(), p);
  obs.label = label;
  std::size_t next = 0;
  for (const auto& m : msgs) append_stripped(m.trace, lay, obs.M_theta, obs.M_z, next);
  return obs;
}

LinearObservation observe_relay_messages(const std::vector<RelayMessage>& msgs,
                                         const Layout& lay, const std::string& label) {
  const std::uint32_t p = msgs.empty() ? 2 : msgs.front().trace.theta.modulus();
  std::size_t rows = std::size_t(msgs.size()) * lay.L_X;
  LinearObservation obs;
  obs.M_theta = FieldMatrix(rows, std::size_t(lay.K) * lay.L, p);
  obs.M_z = FieldMatrix(rows, lay.z_cols(), p);
  obs.label = label;
  std::size_t next = 0;
  for (const auto& m : msgs) append_stripped(m.trace, lay, obs.M_theta, obs.M_z, next);
  return obs;
}

FieldMatrix sum_target_rows(const Layout& lay, std::uint32_t p) {
  FieldMatrix t(lay.L, std::size_t(lay.K) * lay.L, p);
  for (std::uint32_t l = 0; l < lay.L; ++l)
    for (std::uint32_t k = 0; k < lay.K; ++k) t.set(l, std::size_t(k) * lay.L + l, 1);
  return t;
}

std::uint32_t relay_leakage(const LinearObservation& obs) {
  std::size_t joint = mat_rank(hstack(obs.M_theta, obs.M_z));
  std::size_t rz = mat_rank(obs.M_z);
  return static_cast<std::uint32_t>(joint - rz);
}

std::uint32_t server_leakage(const LinearObservation& obs, const FieldMatrix& sum_targets) {
  FieldMatrix n = nullspace_basis(obs.M_z);
  FieldMatrix reachable = matmul(n, obs.M_theta);
  std::size_t with_targets = mat_rank(vstack(reachable, sum_targets));
  std::size_t targets_only = mat_rank(sum_targets);
  return static_cast<std::uint32_t>(with_targets - targets_only);
}

bool verify_output_masking(const GcCode& code, const FieldMatrix& gs) {
  const std::uint32_t K = code.K;
  const std::uint32_t seg = code.segment_len;
  const std::uint32_t p = gs.modulus();
  // One segment, every relay output present. Row m carries client k's
  // encoder in theta block k and the key-mixing row sum_k w_{m,k}[mask]*G_S[k]
  // in the randomness part.
  LinearObservation obs;
  obs.M_theta = FieldMatrix(K, std::size_t{K} * seg, p);
  obs.M_z = FieldMatrix(K, gs.cols(), p);
  obs.label = "complete relay outputs";
  for (std::uint32_t m = 1; m <= K; ++m) {
    FieldVector mix(gs.cols(), 0);
    for (std::uint32_t k = 1; k <= K; ++k) {
      const FieldVector& w = code.encoder(m, k);
      if (w.empty()) continue;
      for (std::uint32_t l = 0; l < seg; ++l)
        obs.M_theta.set(m - 1, std::size_t{k - 1} * seg + l, w[l]);
      gs.add_scaled_row_into(k - 1, w[code.mask_coord[k - 1] - 1], mix);
    }
    for (std::size_t c = 0; c < mix.size(); ++c) obs.M_z.set(m - 1, c, mix[c]);
  }
  FieldMatrix targets(seg, std::size_t{K} * seg, p);
  for (std::uint32_t l = 0; l < seg; ++l)
    for (std::uint32_t k = 0; k < K; ++k) targets.set(l, std::size_t{k} * seg + l, 1);
  return server_leakage(obs, targets) == 0;
}

FieldMatrix build_gs_for_code(const FieldConfig& cfg, std::uint32_t d, const GcCode& code,
                              std::uint64_t rng_seed) {
  for (std::uint64_t t = 0; t < 64; ++t) {
    FieldMatrix gs = build_gs(cfg, d, t == 0 ? rng_seed : mix_seed(rng_seed, t));
    if (verify_output_masking(code, gs)) return gs;
  }
  throw ConstructionFailed("build_gs_for_code: no generator draw masks this code over p=" +
                           std::to_string(cfg.p));
}

std::pair<GcCode, FieldMatrix> build_masked_pair(const FieldConfig& cfg, const Topology& topo,
                                                 std::uint32_t s, std::uint32_t d,
                                                 std::uint64_t code_seed, std::uint64_t gs_seed) {
  for (std::uint64_t t = 0; t < 8; ++t) {
    try {
      GcCode code = construct_code(cfg, topo, s, t == 0 ? code_seed : mix_seed(code_seed, t));
      FieldMatrix gs = build_gs_for_code(cfg, d, code, gs_seed);
      return {std::move(code), std::move(gs)};
    } catch (const ConstructionFailed&) {
      if (t + 1 == 8) throw;
    }
  }
  throw ConstructionFailed("build_masked_pair: unreachable");
}

double MiResult::nats() const {
  double acc = 0;
  for (const auto& [prime, coeff] : log_terms)
    acc += double(coeff.num) / double(coeff.den) * std::log(double(prime));
  return acc;
}

namespace {

void add_log(std::map<std::uint64_t, Rat>& terms, std::uint64_t n, const Rat& scale) {
  // scale * ln(n), n factored by trial division (n <= enumeration budget).
  for (std::uint64_t f = 2; f * f <= n; ++f) {
    std::uint64_t e = 0;
    while (n % f == 0) {
      n /= f;
      ++e;
    }
    if (e) terms[f] = terms[f] + scale * Rat(static_cast<std::int64_t>(e));
  }
  if (n > 1) terms[n] = terms[n] + scale;
}

void drop_zero_terms(std::map<std::uint64_t, Rat>& terms) {
  for (auto it = terms.begin(); it != terms.end();)
    it = it->second.num == 0 ? terms.erase(it) : std::next(it);
}

}  // namespace

MiResult brute_force_mi(const LinearObservation& obs, const FieldConfig& cfg,
                        std::uint32_t theta_alphabet,
                        const std::optional<FieldMatrix>& conditioning, std::uint64_t budget) {
  const std::uint32_t p = cfg.p;
  const std::size_t n_theta = obs.M_theta.cols();
  const std::size_t n_z = obs.M_z.cols();
  const std::size_t rows = obs.M_theta.rows();
  if (theta_alphabet < 2 || theta_alphabet > p)
    throw std::invalid_argument("brute_force_mi: theta alphabet must be in [2, p]");

  // Joint state count a^{n_theta} * p^{n_z}, overflow-safe.
  std::uint64_t states = 1;
  auto mul_check = [&](std::uint64_t f) {
    if (states > budget / f + 1) states = budget + 1;
    else states *= f;
  };
  for (std::size_t i = 0; i < n_theta; ++i) mul_check(theta_alphabet);
  for (std::size_t i = 0; i < n_z; ++i) mul_check(p);
  if (states > budget)
    throw TooLarge("brute_force_mi: enumeration exceeds budget of " + std::to_string(budget));

  std::uint64_t A = 1;
  for (std::size_t i = 0; i < n_theta; ++i) A *= theta_alphabet;

  // Canonical coset reduction of the observation by the randomness image:
  // span{M_z * z} = column space of M_z, as RREF rows over F_p^rows.
  std::vector<std::size_t> zpivots;
  FieldMatrix zspace = rref(transpose(obs.M_z), &zpivots);

  auto reduce = [&](FieldVector& u) {
    for (std::size_t i = 0; i < zpivots.size(); ++i) {
      std::uint32_t c = u[zpivots[i]];
      if (!c) continue;
      for (std::size_t j = 0; j < rows; ++j)
        u[j] = fp_sub(u[j], fp_mul(c, zspace.at(i, j), p), p);
    }
  };

  const FieldMatrix* T = conditioning ? &*conditioning : nullptr;
  const std::size_t t_rows = T ? T->rows() : 0;

  // Group thetas by (coset representative, conditioning value).
  std::map<FieldVector, std::uint64_t> joint_count;   // key = t ++ rep
  std::map<FieldVector, std::uint64_t> t_count;       // key = t
  FieldVector theta(n_theta, 0);
  for (std::uint64_t it = 0; it < A; ++it) {
    FieldVector u(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::uint32_t acc = 0;
      for (std::size_t c = 0; c < n_theta; ++c)
        acc = fp_add(acc, fp_mul(obs.M_theta.at(r, c), theta[c], p), p);
      u[r] = acc;
    }
    reduce(u);
    FieldVector key;
    key.reserve(t_rows + rows);
    if (T) {
      for (std::size_t r = 0; r < t_rows; ++r) {
        std::uint32_t acc = 0;
        for (std::size_t c = 0; c < n_theta; ++c)
          acc = fp_add(acc, fp_mul(T->at(r, c), theta[c], p), p);
        key.push_back(acc);
      }
      ++t_count[key];
    }
    key.insert(key.end(), u.begin(), u.end());
    ++joint_count[key];
    // next theta in the box alphabet
    for (std::size_t i = 0; i < n_theta; ++i) {
      if (++theta[i] < theta_alphabet) break;
      theta[i] = 0;
    }
  }

  MiResult res;
  if (!T) {
    // I = sum_groups (c/A) * (ln A - ln c); zero iff one group.
    res.zero = joint_count.size() <= 1;
    if (!res.zero) {
      for (const auto& [key, c] : joint_count) {
        Rat scale(static_cast<std::int64_t>(c), static_cast<std::int64_t>(A));
        add_log(res.log_terms, A, scale);
        add_log(res.log_terms, c, Rat(-scale.num, scale.den));
      }
      drop_zero_terms(res.log_terms);
      res.zero = res.log_terms.empty();
    }
  } else {
    // I = sum_groups (c/A) * (ln c_t - ln c); zero iff each conditioning
    // class maps to a single coset.
    res.zero = joint_count.size() == t_count.size();
    if (!res.zero) {
      for (const auto& [key, c] : joint_count) {
        FieldVector tkey(key.begin(), key.begin() + t_rows);
        std::uint64_t ct = t_count.at(tkey);
        Rat scale(static_cast<std::int64_t>(c), static_cast<std::int64_t>(A));
        add_log(res.log_terms, ct, scale);
        add_log(res.log_terms, c, Rat(-scale.num, scale.den));
      }
      drop_zero_terms(res.log_terms);
      res.zero = res.log_terms.empty();
    }
  }
  return res;
}

}  // namespace hsagg
