#include "hsagg/gc_code.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hsagg/errors.hpp"
#include "hsagg/rng.hpp"

namespace hsagg {

std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t acc = 1;
  for (std::uint32_t i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  return acc;
}

std::vector<std::vector<std::uint32_t>> all_patterns(std::uint32_t K, std::uint32_t s) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> cur(s);
  std::iota(cur.begin(), cur.end(), 1);
  if (s == 0) {
    out.push_back({});
    return out;
  }
  while (true) {
    out.push_back(cur);
    std::uint32_t i = s;
    while (i-- > 0) {
      if (cur[i] + 1 <= K - (s - 1 - i)) {
        ++cur[i];
        for (std::uint32_t j = i + 1; j < s; ++j) cur[j] = cur[j - 1] + 1;
        break;
      }
      if (i == 0) return out;
    }
  }
}

namespace {

// poly coefficients ascending; result reduced mod p.
FieldVector poly_mul(const FieldVector& a, const FieldVector& b, std::uint32_t p) {
  FieldVector r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = fp_add(r[i + j], fp_mul(a[i], b[j], p), p);
  return r;
}

std::uint32_t poly_eval(const FieldVector& poly, std::uint32_t x, std::uint32_t p) {
  std::uint32_t acc = 0;
  for (std::size_t i = poly.size(); i-- > 0;) acc = fp_add(fp_mul(acc, x, p), poly[i], p);
  return acc;
}

// Coefficient row matrix for one straggler pattern: columns are (client k,
// coordinate l'), rows are the available relays' encoder entries.
FieldMatrix pattern_rows(const GcCode& code, const std::vector<std::uint32_t>& pattern,
                         std::vector<std::uint32_t>& avail) {
  avail.clear();
  for (std::uint32_t m = 1; m <= code.K; ++m)
    if (!std::binary_search(pattern.begin(), pattern.end(), m)) avail.push_back(m);
  const std::uint32_t Lt = code.segment_len;
  FieldMatrix rows(avail.size(), std::size_t(code.K) * Lt, code.p);
  for (std::size_t i = 0; i < avail.size(); ++i) {
    std::uint32_t m = avail[i];
    for (std::uint32_t k = 1; k <= code.K; ++k) {
      const FieldVector& w = code.encoders[m - 1][k - 1];
      if (w.empty()) continue;
      for (std::uint32_t lp = 0; lp < Lt; ++lp)
        rows.set(i, std::size_t(k - 1) * Lt + lp, w[lp]);
    }
  }
  return rows;
}

// Recovery targets: row l' of the identity pattern replicated per client.
FieldMatrix pattern_targets(std::uint32_t K, std::uint32_t Lt, std::uint32_t p) {
  FieldMatrix t(Lt, std::size_t(K) * Lt, p);
  for (std::uint32_t lt = 0; lt < Lt; ++lt)
    for (std::uint32_t k = 0; k < K; ++k) t.set(lt, std::size_t(k) * Lt + lt, 1);
  return t;
}

bool solve_all_patterns(GcCode& code) {
  const std::uint32_t Lt = code.segment_len;
  FieldMatrix targets = pattern_targets(code.K, Lt, code.p);
  code.combos.clear();
  for (auto& pattern : all_patterns(code.K, code.s)) {
    std::vector<std::uint32_t> avail;
    FieldMatrix rows = pattern_rows(code, pattern, avail);
    auto sol = mat_solve_left(rows, targets);
    if (!sol) return false;
    FieldMatrix C(Lt, code.K, code.p);
    for (std::uint32_t lt = 0; lt < Lt; ++lt)
      for (std::size_t i = 0; i < avail.size(); ++i) C.set(lt, avail[i] - 1, sol->at(lt, i));
    code.combos.push_back({pattern, std::move(C)});
  }
  return true;
}

}  // namespace

GcCode construct_code(const FieldConfig& cfg, const Topology& topo, std::uint32_t s,
                      std::uint64_t rng_seed) {
  const std::uint32_t K = cfg.K, p = cfg.p, d = topo.d;
  if (s >= d || d > K - 1)
    throw std::invalid_argument("construct_code: need 0 <= s < d <= K-1");
  const std::uint32_t Lt = d - s;
  if (p - 1 < K)
    throw ConstructionFailed("construct_code: p too small for K distinct nonzero points");

  std::mt19937_64 gen(mix_seed(rng_seed, 0xc0de));
  for (int attempt = 0; attempt < 64; ++attempt) {
    // Distinct nonzero evaluation points per relay.
    std::vector<std::uint32_t> pool(p - 1);
    std::iota(pool.begin(), pool.end(), 1);
    for (std::uint32_t i = 0; i < K; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rand_below(gen, pool.size() - i));
      std::swap(pool[i], pool[j]);
    }

    GcCode code;
    code.K = K;
    code.d = d;
    code.s = s;
    code.p = p;
    code.segment_len = Lt;
    code.encoders.assign(K, std::vector<FieldVector>(K));
    code.mask_coord.assign(K, Lt);

    bool ok = true;
    for (std::uint32_t k = 1; k <= K && ok; ++k) {
      // Z_k vanishes exactly on the relays client k does not reach.
      FieldVector Z{1};
      for (std::uint32_t m = 1; m <= K; ++m)
        if (!topo.sends_to(k, m)) Z = poly_mul(Z, FieldVector{fp_neg(pool[m - 1], p), 1}, p);
      const std::uint32_t degZ = static_cast<std::uint32_t>(Z.size() - 1);  // K - d
      // v multipliers: Z*v has unit coefficient at degree degZ + (Lt - l')
      // and zeros elsewhere in degrees degZ..degZ+Lt-1. Z is monic, so the
      // system is unit-triangular top-down.
      std::vector<FieldVector> vs(Lt);
      for (std::uint32_t lp = 1; lp <= Lt; ++lp) {
        FieldVector v(Lt, 0);
        for (std::uint32_t t = Lt; t-- > 0;) {
          std::uint32_t acc = 0;
          for (std::uint32_t j = t + 1; j < Lt; ++j) {
            std::int64_t zi = std::int64_t(degZ) + t - j;
            if (zi >= 0 && zi < std::int64_t(Z.size()))
              acc = fp_add(acc, fp_mul(Z[zi], v[j], p), p);
          }
          std::uint32_t tgt = (t == Lt - lp) ? 1u : 0u;
          v[t] = fp_sub(tgt, acc, p);
        }
        vs[lp - 1] = std::move(v);
      }
      for (std::uint32_t m : topo.relays_of(k)) {
        std::uint32_t za = poly_eval(Z, pool[m - 1], p);
        FieldVector w(Lt);
        for (std::uint32_t lp = 0; lp < Lt; ++lp)
          w[lp] = fp_mul(za, poly_eval(vs[lp], pool[m - 1], p), p);
        if (w[Lt - 1] == 0) {  // mask coefficient; Z_k(a_m) != 0 makes this unreachable
          ok = false;
          break;
        }
        code.encoders[m - 1][k - 1] = std::move(w);
      }
    }
    if (!ok) continue;
    if (!solve_all_patterns(code)) continue;
    if (!verify_recovery(code)) continue;
    return code;
  }
  throw ConstructionFailed("construct_code: no decodable code in 64 draws at p = " +
                           std::to_string(p));
}

const FieldMatrix& combination_matrix(const GcCode& code,
                                      const std::vector<std::uint32_t>& missing) {
  if (missing.size() > code.s)
    throw TooManyMissing("combination_matrix: " + std::to_string(missing.size()) +
                         " missing relays exceed s = " + std::to_string(code.s));
  std::vector<std::uint32_t> sorted = missing;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& combo : code.combos) {  // combos are in lexicographic order
    if (std::includes(combo.pattern.begin(), combo.pattern.end(), sorted.begin(), sorted.end()))
      return combo.C;
  }
  throw std::logic_error("combination_matrix: no stored pattern covers the missing set");
}

bool verify_recovery(const GcCode& code) {
  const std::uint32_t Lt = code.segment_len;
  if (code.combos.size() != binomial(code.K, code.s)) return false;
  if (code.mask_coord.size() != code.K) return false;
  for (std::uint32_t k = 1; k <= code.K; ++k) {
    std::uint32_t l0 = code.mask_coord[k - 1];
    if (l0 < 1 || l0 > Lt) return false;
    for (std::uint32_t m = 1; m <= code.K; ++m) {
      const FieldVector& w = code.encoders[m - 1][k - 1];
      if (!w.empty() && w[l0 - 1] == 0) return false;  // every message carries its mask
    }
  }
  FieldMatrix targets = pattern_targets(code.K, Lt, code.p);
  for (const auto& combo : code.combos) {
    for (std::uint32_t m : combo.pattern) {
      for (std::uint32_t lt = 0; lt < Lt; ++lt)
        if (combo.C.at(lt, m - 1) != 0) return false;  // dropped relays get zero columns
    }
    std::vector<std::uint32_t> avail;
    FieldMatrix rows = pattern_rows(code, combo.pattern, avail);
    FieldMatrix cpart(Lt, avail.size(), code.p);
    for (std::uint32_t lt = 0; lt < Lt; ++lt)
      for (std::size_t i = 0; i < avail.size(); ++i) cpart.set(lt, i, combo.C.at(lt, avail[i] - 1));
    if (matmul(cpart, rows) != targets) return false;
  }
  return true;
}

}  // namespace hsagg
