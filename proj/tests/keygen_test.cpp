#include <doctest.h>

#include <stdexcept>

#include "hsagg/errors.hpp"
#include "hsagg/keygen.hpp"

using namespace hsagg;

TEST_CASE("seed length is the larger side of the split") {
  CHECK(seed_len(5, 3) == 3);
  CHECK(seed_len(5, 2) == 3);
  CHECK(seed_len(3, 2) == 2);
  CHECK(seed_len(8, 4) == 4);
  CHECK(seed_len(4, 1) == 3);
}

TEST_CASE("generator invariants hold for a hand-checked matrix and fail under perturbation") {
  // Columns sum to zero mod 13; every 3-row and 2-row subset has full rank.
  FieldMatrix g = FieldMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 2, 4}, {11, 10, 8}}, 13);
  CHECK(verify_gs(g, 3));
  FieldMatrix bad = g;
  bad.set(4, 0, 0);  // breaks the zero column sum
  CHECK_FALSE(verify_gs(bad, 3));
  FieldMatrix dup = g;
  for (std::size_t j = 0; j < 3; ++j) dup.set(1, j, g.at(0, j));  // duplicate row kills 2-row rank
  // restore the column sums after the duplication
  for (std::size_t j = 0; j < 3; ++j) {
    std::uint32_t col = 0;
    for (std::size_t i = 0; i < 4; ++i) col = fp_add(col, dup.at(i, j), 13);
    dup.set(4, j, fp_neg(col, 13));
  }
  CHECK_FALSE(verify_gs(dup, 3));
}

TEST_CASE("constructed generators pass their own verifier across shapes") {
  for (std::uint32_t K : {3u, 5u, 8u}) {
    FieldConfig cfg(next_prime_above(K * 2), 3, K);
    for (std::uint32_t d = 1; d <= K - 1; ++d) {
      FieldMatrix g = build_gs(cfg, d, 7);
      CHECK(g.rows() == K);
      CHECK(g.cols() == seed_len(K, d));
      CHECK(verify_gs(g, d));
    }
  }
  FieldConfig cfg(13, 3, 5);
  CHECK_THROWS_AS(build_gs(cfg, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_gs(cfg, 5, 1), std::invalid_argument);
}

TEST_CASE("key expansion multiplies the generator into the symbol pool") {
  FieldMatrix g = FieldMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 2, 4}, {11, 10, 8}}, 13);
  SourceRandomness src;
  src.symbols = {5, 7, 11};  // one segment, L_X = 1
  KeySchedule sched = expand_keys(g, src, 1);
  REQUIRE(sched.keys.size() == 5);
  CHECK(sched.keys[0] == FieldVector{5});
  CHECK(sched.keys[1] == FieldVector{7});
  CHECK(sched.keys[2] == FieldVector{11});
  CHECK(sched.keys[3] == FieldVector{(5 * 1 + 7 * 2 + 11 * 4) % 13});
  std::uint32_t sum = 0;
  for (auto& k : sched.keys) sum = fp_add(sum, k[0], 13);
  CHECK(sum == 0);
}

TEST_CASE("keys of every segment sum to zero for drawn sources") {
  FieldConfig cfg(13, 3, 5);
  FieldMatrix g = build_gs(cfg, 3, 42);
  SourceRandomness src = draw_source(cfg, 3, 4, 99);
  CHECK(src.symbols.size() == 4 * seed_len(5, 3));
  KeySchedule sched = expand_keys(g, src, 4);
  for (std::uint32_t lx = 0; lx < 4; ++lx) {
    std::uint32_t sum = 0;
    for (auto& k : sched.keys) sum = fp_add(sum, k[lx], 13);
    CHECK(sum == 0);
  }
}

TEST_CASE("key expansion rejects a mis-sized symbol pool") {
  FieldMatrix g = FieldMatrix::from_rows({{1, 1}, {2, 1}, {4, 1}}, 7);
  SourceRandomness src;
  src.symbols = {1, 2, 3};  // not a multiple of 2
  CHECK_THROWS_AS(expand_keys(g, src, 2), std::invalid_argument);
}
