#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hsagg/field.hpp"

namespace hsagg {

// Dense row-major matrix over Z_p. Every entry is kept reduced.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols, std::uint32_t p);

  static FieldMatrix from_rows(const std::vector<std::vector<std::uint32_t>>& rows,
                               std::uint32_t p);
  static FieldMatrix identity(std::size_t n, std::uint32_t p);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint32_t modulus() const { return p_; }

  std::uint32_t at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, std::uint32_t v) { data_[r * cols_ + c] = v % p_; }

  FieldVector row(std::size_t r) const;
  void add_scaled_row_into(std::size_t r, std::uint32_t scale, FieldVector& acc) const;

  bool operator==(const FieldMatrix& other) const = default;

  const std::vector<std::uint32_t>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::uint32_t p_ = 2;
  std::vector<std::uint32_t> data_;
};

FieldMatrix transpose(const FieldMatrix& m);
FieldMatrix matmul(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix vstack(const FieldMatrix& top, const FieldMatrix& bottom);
FieldMatrix hstack(const FieldMatrix& left, const FieldMatrix& right);

// v * M for a row vector v.
FieldVector vecmat(const FieldVector& v, const FieldMatrix& m);

std::size_t mat_rank(FieldMatrix m);

// Deterministic C with C*A = B (free coordinates zero), or nullopt when some
// row of B lies outside A's row space.
std::optional<FieldMatrix> mat_solve_left(const FieldMatrix& a, const FieldMatrix& b);

// Basis of the left null space {v : v*M = 0}, rows in the reduced echelon
// convention (deterministic given M). Row count = rows(M) - rank(M).
FieldMatrix nullspace_basis(const FieldMatrix& m);

// Reduced row echelon form; pivot columns reported in order.
FieldMatrix rref(FieldMatrix m, std::vector<std::size_t>* pivot_cols = nullptr);

}  // namespace hsagg
