#include "hsagg/keygen.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "hsagg/errors.hpp"
#include "hsagg/rng.hpp"

namespace hsagg {

namespace {

// Next size-r subset of {0..n-1} in lexicographic order; false when done.
bool next_subset(std::vector<std::uint32_t>& idx, std::uint32_t n) {
  std::uint32_t r = static_cast<std::uint32_t>(idx.size());
  for (std::uint32_t i = r; i-- > 0;) {
    if (idx[i] + 1 <= n - (r - i)) {
      ++idx[i];
      for (std::uint32_t j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

bool all_subsets_full_rank(const FieldMatrix& g, std::uint32_t r) {
  std::uint32_t K = static_cast<std::uint32_t>(g.rows());
  if (r == 0) return true;
  std::vector<std::uint32_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    FieldMatrix sub(r, g.cols(), g.modulus());
    for (std::uint32_t i = 0; i < r; ++i)
      for (std::size_t c = 0; c < g.cols(); ++c) sub.set(i, c, g.at(idx[i], c));
    if (mat_rank(sub) != r) return false;
  } while (next_subset(idx, K));
  return true;
}

}  // namespace

bool verify_gs(const FieldMatrix& g, std::uint32_t d) {
  std::uint32_t K = static_cast<std::uint32_t>(g.rows());
  if (d < 1 || d > K - 1) return false;
  const std::uint32_t p = g.modulus();
  for (std::size_t c = 0; c < g.cols(); ++c) {
    std::uint32_t sum = 0;
    for (std::size_t r = 0; r < g.rows(); ++r) sum = fp_add(sum, g.at(r, c), p);
    if (sum != 0) return false;
  }
  return all_subsets_full_rank(g, d) && all_subsets_full_rank(g, K - d);
}

FieldMatrix build_gs(const FieldConfig& cfg, std::uint32_t d, std::uint64_t rng_seed) {
  const std::uint32_t K = cfg.K, p = cfg.p;
  if (d < 1 || d > K - 1) throw std::invalid_argument("build_gs: need 1 <= d <= K-1");
  const std::uint32_t cols = seed_len(K, d);
  if (p - 1 < K - 1)
    throw ConstructionFailed("build_gs: p too small for K-1 distinct nonzero points");
  std::mt19937_64 gen(mix_seed(rng_seed, 0x675f));
  for (int attempt = 0; attempt < 64; ++attempt) {
    // K-1 distinct nonzero evaluation points.
    std::vector<std::uint32_t> pool(p - 1);
    std::iota(pool.begin(), pool.end(), 1);
    for (std::uint32_t i = 0; i < K - 1; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rand_below(gen, pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    FieldMatrix g(K, cols, p);
    for (std::uint32_t r = 0; r < K - 1; ++r) {
      std::uint32_t v = 1;
      for (std::uint32_t c = 0; c < cols; ++c) {
        g.set(r, c, v);
        v = fp_mul(v, pool[r], p);
      }
    }
    for (std::uint32_t c = 0; c < cols; ++c) {
      std::uint32_t sum = 0;
      for (std::uint32_t r = 0; r < K - 1; ++r) sum = fp_add(sum, g.at(r, c), p);
      g.set(K - 1, c, fp_neg(sum, p));
    }
    if (verify_gs(g, d)) return g;
  }
  throw ConstructionFailed("build_gs: no verified generator in 64 draws at p = " +
                           std::to_string(p));
}

SourceRandomness draw_source(const FieldConfig& cfg, std::uint32_t d, std::uint32_t L_X,
                             std::uint64_t seed) {
  SourceRandomness src;
  src.seed = seed;
  std::mt19937_64 gen(mix_seed(seed, 0x5eed));
  std::size_t total = std::size_t(L_X) * seed_len(cfg.K, d);
  src.symbols.reserve(total);
  for (std::size_t i = 0; i < total; ++i)
    src.symbols.push_back(static_cast<std::uint32_t>(rand_below(gen, cfg.p)));
  return src;
}

KeySchedule expand_keys(const FieldMatrix& g, const SourceRandomness& src, std::uint32_t L_X) {
  const std::uint32_t K = static_cast<std::uint32_t>(g.rows());
  const std::uint32_t p = g.modulus();
  const std::size_t L_seed = g.cols();
  if (src.symbols.size() != std::size_t(L_X) * L_seed)
    throw std::invalid_argument("expand_keys: source length != L_X * cols(G)");
  KeySchedule sched;
  sched.G_S = g;
  sched.keys.assign(K, FieldVector(L_X, 0));
  for (std::uint32_t lx = 0; lx < L_X; ++lx)
    for (std::uint32_t k = 0; k < K; ++k) {
      std::uint32_t acc = 0;
      for (std::size_t j = 0; j < L_seed; ++j)
        acc = fp_add(acc, fp_mul(g.at(k, j), src.symbols[lx * L_seed + j], p), p);
      sched.keys[k][lx] = acc;
    }
  return sched;
}

}  // namespace hsagg
