#include "hsagg/matrix.hpp"

#include <stdexcept>

namespace hsagg {

FieldMatrix::FieldMatrix(std::size_t rows, std::size_t cols, std::uint32_t p)
    : rows_(rows), cols_(cols), p_(p), data_(rows * cols, 0) {}

FieldMatrix FieldMatrix::from_rows(const std::vector<std::vector<std::uint32_t>>& rows,
                                   std::uint32_t p) {
  std::size_t nc = rows.empty() ? 0 : rows.front().size();
  FieldMatrix m(rows.size(), nc, p);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != nc) throw std::invalid_argument("from_rows: ragged rows");
    for (std::size_t c = 0; c < nc; ++c) m.set(r, c, rows[r][c]);
  }
  return m;
}

FieldMatrix FieldMatrix::identity(std::size_t n, std::uint32_t p) {
  FieldMatrix m(n, n, p);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
  return m;
}

FieldVector FieldMatrix::row(std::size_t r) const {
  return FieldVector(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
}

void FieldMatrix::add_scaled_row_into(std::size_t r, std::uint32_t scale,
                                      FieldVector& acc) const {
  for (std::size_t c = 0; c < cols_; ++c)
    acc[c] = fp_add(acc[c], fp_mul(scale, at(r, c), p_), p_);
}

FieldMatrix transpose(const FieldMatrix& m) {
  FieldMatrix t(m.cols(), m.rows(), m.modulus());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t.set(c, r, m.at(r, c));
  return t;
}

FieldMatrix matmul(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.cols() != b.rows() || a.modulus() != b.modulus())
    throw std::invalid_argument("matmul: shape or modulus mismatch");
  const std::uint32_t p = a.modulus();
  FieldMatrix out(a.rows(), b.cols(), p);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      std::uint32_t aik = a.at(i, k);
      if (!aik) continue;
      for (std::size_t j = 0; j < b.cols(); ++j)
        out.set(i, j, fp_add(out.at(i, j), fp_mul(aik, b.at(k, j), p), p));
    }
  return out;
}

FieldMatrix vstack(const FieldMatrix& top, const FieldMatrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols() || top.modulus() != bottom.modulus())
    throw std::invalid_argument("vstack: shape or modulus mismatch");
  FieldMatrix out(top.rows() + bottom.rows(), top.cols(), top.modulus());
  for (std::size_t r = 0; r < top.rows(); ++r)
    for (std::size_t c = 0; c < top.cols(); ++c) out.set(r, c, top.at(r, c));
  for (std::size_t r = 0; r < bottom.rows(); ++r)
    for (std::size_t c = 0; c < top.cols(); ++c) out.set(top.rows() + r, c, bottom.at(r, c));
  return out;
}

FieldMatrix hstack(const FieldMatrix& left, const FieldMatrix& right) {
  if (left.rows() != right.rows() || left.modulus() != right.modulus())
    throw std::invalid_argument("hstack: shape or modulus mismatch");
  FieldMatrix out(left.rows(), left.cols() + right.cols(), left.modulus());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    for (std::size_t c = 0; c < left.cols(); ++c) out.set(r, c, left.at(r, c));
    for (std::size_t c = 0; c < right.cols(); ++c) out.set(r, left.cols() + c, right.at(r, c));
  }
  return out;
}

FieldVector vecmat(const FieldVector& v, const FieldMatrix& m) {
  if (v.size() != m.rows()) throw std::invalid_argument("vecmat: shape mismatch");
  FieldVector out(m.cols(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (v[r]) m.add_scaled_row_into(r, v[r], out);
  return out;
}

FieldMatrix rref(FieldMatrix m, std::vector<std::size_t>* pivot_cols) {
  const std::uint32_t p = m.modulus();
  if (pivot_cols) pivot_cols->clear();
  std::size_t lead = 0;
  for (std::size_t c = 0; c < m.cols() && lead < m.rows(); ++c) {
    std::size_t piv = lead;
    while (piv < m.rows() && m.at(piv, c) == 0) ++piv;  // first nonzero, no heuristics
    if (piv == m.rows()) continue;
    if (piv != lead)
      for (std::size_t j = 0; j < m.cols(); ++j) {
        std::uint32_t t = m.at(lead, j);
        m.set(lead, j, m.at(piv, j));
        m.set(piv, j, t);
      }
    std::uint32_t inv = fp_inv(m.at(lead, c), p);
    for (std::size_t j = 0; j < m.cols(); ++j) m.set(lead, j, fp_mul(m.at(lead, j), inv, p));
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == lead) continue;
      std::uint32_t f = m.at(r, c);
      if (!f) continue;
      for (std::size_t j = 0; j < m.cols(); ++j)
        m.set(r, j, fp_sub(m.at(r, j), fp_mul(f, m.at(lead, j), p), p));
    }
    if (pivot_cols) pivot_cols->push_back(c);
    ++lead;
  }
  return m;
}

std::size_t mat_rank(FieldMatrix m) {
  std::vector<std::size_t> pivots;
  rref(std::move(m), &pivots);
  return pivots.size();
}

std::optional<FieldMatrix> mat_solve_left(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.cols() != b.cols() || a.modulus() != b.modulus())
    throw std::invalid_argument("mat_solve_left: shape or modulus mismatch");
  const std::uint32_t p = a.modulus();
  // Row-reduce [A | I]: R = E*A with E recorded; then express each B row over
  // R's pivot rows. Free coordinates stay zero, so the result is canonical.
  FieldMatrix aug = hstack(a, FieldMatrix::identity(a.rows(), p));
  std::vector<std::size_t> pivots;
  // Eliminate only within the first a.cols() columns.
  {
    std::size_t lead = 0;
    for (std::size_t c = 0; c < a.cols() && lead < aug.rows(); ++c) {
      std::size_t piv = lead;
      while (piv < aug.rows() && aug.at(piv, c) == 0) ++piv;
      if (piv == aug.rows()) continue;
      if (piv != lead)
        for (std::size_t j = 0; j < aug.cols(); ++j) {
          std::uint32_t t = aug.at(lead, j);
          aug.set(lead, j, aug.at(piv, j));
          aug.set(piv, j, t);
        }
      std::uint32_t inv = fp_inv(aug.at(lead, c), p);
      for (std::size_t j = 0; j < aug.cols(); ++j)
        aug.set(lead, j, fp_mul(aug.at(lead, j), inv, p));
      for (std::size_t r = 0; r < aug.rows(); ++r) {
        if (r == lead) continue;
        std::uint32_t f = aug.at(r, c);
        if (!f) continue;
        for (std::size_t j = 0; j < aug.cols(); ++j)
          aug.set(r, j, fp_sub(aug.at(r, j), fp_mul(f, aug.at(lead, j), p), p));
      }
      pivots.push_back(c);
      ++lead;
    }
  }
  FieldMatrix out(b.rows(), a.rows(), p);
  for (std::size_t br = 0; br < b.rows(); ++br) {
    FieldVector residual = b.row(br);
    FieldVector combo(a.rows(), 0);  // coefficients over the E rows
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      std::uint32_t coef = residual[pivots[i]];
      if (!coef) continue;
      for (std::size_t j = 0; j < a.cols(); ++j)
        residual[j] = fp_sub(residual[j], fp_mul(coef, aug.at(i, j), p), p);
      combo[i] = coef;
    }
    for (std::uint32_t v : residual)
      if (v) return std::nullopt;  // outside A's row space
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      if (!combo[i]) continue;
      for (std::size_t c = 0; c < a.rows(); ++c)
        out.set(br, c, fp_add(out.at(br, c), fp_mul(combo[i], aug.at(i, a.cols() + c), p), p));
    }
  }
  return out;
}

FieldMatrix nullspace_basis(const FieldMatrix& m) {
  const std::uint32_t p = m.modulus();
  // Left null space of M = right kernel of M^T, read off the RREF of M^T:
  // one basis row per free column, identity on the free coordinates.
  FieldMatrix mt = transpose(m);
  std::vector<std::size_t> pivots;
  FieldMatrix r = rref(mt, &pivots);
  std::vector<bool> is_pivot(mt.cols(), false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < mt.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  FieldMatrix basis(free_cols.size(), mt.cols(), p);
  for (std::size_t i = 0; i < free_cols.size(); ++i) {
    std::size_t fc = free_cols[i];
    basis.set(i, fc, 1);
    for (std::size_t pi = 0; pi < pivots.size(); ++pi)
      basis.set(i, pivots[pi], fp_neg(r.at(pi, fc), p));
  }
  return basis;
}

}  // namespace hsagg
