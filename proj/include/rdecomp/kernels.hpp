#pragma once

#include <cstddef>
#include <span>

#include "rdecomp/csr_matrix.hpp"
#include "rdecomp/dense_matrix.hpp"

namespace rdecomp {

/// A * B with a fixed summation order (k ascending for every entry).
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
/// A^T * B.
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
/// A * B^T.
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);

enum class Side { Left, Right };

/// Sparse-dense product. With side Left this is op(S) * B, with side Right
/// it is B * op(S), where op(S) is S or S^T. Work is proportional to
/// nnz(S) times the width of B.
DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& b, Side side, bool transpose_s = false);

/// Sparse * sparse with a dense result, cost proportional to the number of
/// scalar products actually formed.
DenseMatrix spgemm_dense(const CsrMatrix& a, const CsrMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double factor);
/// A * diag(d).
DenseMatrix scale_columns(const DenseMatrix& a, std::span<const double> d);

double frobenius_norm(const DenseMatrix& a);
double frobenius_norm(const CsrMatrix& a);
double max_abs(const DenseMatrix& a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// max |Q^T Q - I|.
double orthonormality_error(const DenseMatrix& q);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

}  // namespace rdecomp
