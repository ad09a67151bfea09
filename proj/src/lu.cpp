#include <cmath>
#include <numeric>
#include <utility>

#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"

namespace rdecomp {

namespace {

void swap_rows(DenseMatrix& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  auto ri = a.row(i);
  auto rj = a.row(j);
  std::swap_ranges(ri.begin(), ri.end(), rj.begin());
}

void swap_cols(DenseMatrix& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t r = 0; r < a.rows(); ++r) std::swap(a(r, i), a(r, j));
}

// Eliminates below pivot (j, j); multipliers are stored in column j.
void eliminate(DenseMatrix& a, std::size_t j) {
  const double pivot = a(j, j);
  const double* prow = a.row(j).data();
  for (std::size_t i = j + 1; i < a.rows(); ++i) {
    double* row = a.row(i).data();
    const double l = row[j] / pivot;
    row[j] = l;
    if (l == 0.0) continue;
    for (std::size_t c = j + 1; c < a.cols(); ++c) row[c] -= l * prow[c];
  }
}

DenseMatrix unit_lower(const DenseMatrix& a, std::size_t q) {
  DenseMatrix l(a.rows(), q);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < std::min(i, q); ++j) l(i, j) = a(i, j);
    if (i < q) l(i, i) = 1.0;
  }
  return l;
}

DenseMatrix upper(const DenseMatrix& a, std::size_t q) {
  DenseMatrix u(q, a.cols());
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i; j < a.cols(); ++j) u(i, j) = a(i, j);
  }
  return u;
}

std::vector<std::size_t> iota_vector(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

PartialPivotLu lu_partial_pivot(const DenseMatrix& m) {
  if (m.rows() < m.cols()) {
    throw DimensionError("lu_partial_pivot requires rows >= cols, got " + shape_string(m.rows(), m.cols()));
  }
  DenseMatrix a = m;
  auto perm = iota_vector(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::size_t piv = j;
    for (std::size_t i = j + 1; i < m.rows(); ++i) {
      if (std::abs(a(i, j)) > std::abs(a(piv, j))) piv = i;
    }
    swap_rows(a, j, piv);
    std::swap(perm[j], perm[piv]);
    // A zero pivot means the column is already eliminated.
    if (a(j, j) != 0.0) eliminate(a, j);
  }
  return {PermutationVector(std::move(perm)), unit_lower(a, m.cols()), upper(a, m.cols())};
}

// A zero pivot row leaves the entries below it unrepresented; the
// factorization is exact whenever every leading Schur row is nonzero,
// e.g. for full row rank input.
ColumnPivotLu lu_column_pivot(const DenseMatrix& m) {
  if (m.rows() > m.cols()) {
    throw DimensionError("lu_column_pivot requires rows <= cols, got " + shape_string(m.rows(), m.cols()));
  }
  DenseMatrix a = m;
  auto perm = iota_vector(m.cols());
  for (std::size_t j = 0; j < m.rows(); ++j) {
    std::size_t piv = j;
    for (std::size_t c = j + 1; c < m.cols(); ++c) {
      if (std::abs(a(j, c)) > std::abs(a(j, piv))) piv = c;
    }
    swap_cols(a, j, piv);
    std::swap(perm[j], perm[piv]);
    if (a(j, j) != 0.0) {
      eliminate(a, j);
    } else {
      for (std::size_t i = j + 1; i < m.rows(); ++i) a(i, j) = 0.0;
    }
  }
  return {PermutationVector(std::move(perm)), unit_lower(a, m.rows()), upper(a, m.rows())};
}

CompletePivotLu lu_complete_pivot(const DenseMatrix& m) {
  const std::size_t q = std::min(m.rows(), m.cols());
  DenseMatrix a = m;
  auto rows = iota_vector(m.rows());
  auto cols = iota_vector(m.cols());
  for (std::size_t j = 0; j < q; ++j) {
    std::size_t pr = j, pc = j;
    double best = std::abs(a(j, j));
    for (std::size_t i = j; i < m.rows(); ++i) {
      const double* row = a.row(i).data();
      for (std::size_t c = j; c < m.cols(); ++c) {
        if (std::abs(row[c]) > best) {
          best = std::abs(row[c]);
          pr = i;
          pc = c;
        }
      }
    }
    if (best == 0.0) break;  // remaining block is exactly zero
    swap_rows(a, j, pr);
    std::swap(rows[j], rows[pr]);
    swap_cols(a, j, pc);
    std::swap(cols[j], cols[pc]);
    eliminate(a, j);
  }
  return {PermutationVector(std::move(rows)), PermutationVector(std::move(cols)), unit_lower(a, q), upper(a, q)};
}

}  // namespace rdecomp
