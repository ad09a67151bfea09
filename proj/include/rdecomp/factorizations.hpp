#pragma once

#include <optional>
#include <vector>

#include "rdecomp/dense_matrix.hpp"
#include "rdecomp/permutation.hpp"

namespace rdecomp {

struct QrFactors {
  DenseMatrix q;  // rows x cols, orthonormal columns
  DenseMatrix r;  // cols x cols, upper triangular, nonnegative diagonal
};

/// Householder thin QR of a tall (rows >= cols) matrix. Rank deficiency is
/// allowed: R then carries zero diagonal entries while Q stays orthonormal.
QrFactors thin_qr(const DenseMatrix& b);

struct SvdResult {
  DenseMatrix u;          // rows x q
  std::vector<double> s;  // q values, nonincreasing
  DenseMatrix v;          // cols x q
};

/// Thin SVD, q = min(rows, cols). Tall inputs are first reduced with a
/// Householder QR; the square factor is diagonalised by one-sided
/// (Hestenes) Jacobi rotations in a fixed cyclic order.
SvdResult dense_svd(const DenseMatrix& m);

/// Singular values only.
std::vector<double> singular_values(const DenseMatrix& m);

/// Moore-Penrose pseudoinverse. Singular values below rank_tol * s_max are
/// treated as zero; the default cutoff is max(rows, cols) * eps.
DenseMatrix pseudo_inverse(const DenseMatrix& m, std::optional<double> rank_tol = std::nullopt);

double default_rank_tolerance(std::size_t rows, std::size_t cols);

struct PartialPivotLu {
  PermutationVector p;  // P * M = L * U
  DenseMatrix l;        // rows x cols, unit lower trapezoidal, |l| <= 1
  DenseMatrix u;        // cols x cols, upper triangular
};

/// Row-pivoted LU of a tall (rows >= cols) matrix.
PartialPivotLu lu_partial_pivot(const DenseMatrix& m);

struct ColumnPivotLu {
  PermutationVector qc;  // M * Qc = L * U
  DenseMatrix l;         // rows x rows, unit lower triangular
  DenseMatrix u;         // rows x cols, upper trapezoidal
};

/// Column-pivoted LU of a wide (rows <= cols) matrix. Each step takes the
/// largest remaining entry of the pivot row.
ColumnPivotLu lu_column_pivot(const DenseMatrix& m);

struct CompletePivotLu {
  PermutationVector p;   // P * M * Qc = L * U
  PermutationVector qc;
  DenseMatrix l;         // rows x q, unit lower trapezoidal, |l| <= 1
  DenseMatrix u;         // q x cols, upper trapezoidal
};

/// LU with complete pivoting, q = min(rows, cols). The leading columns of
/// L span the columns of M selected greedily by pivot magnitude.
CompletePivotLu lu_complete_pivot(const DenseMatrix& m);

}  // namespace rdecomp
