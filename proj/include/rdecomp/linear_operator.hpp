#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "rdecomp/csr_matrix.hpp"
#include "rdecomp/dense_matrix.hpp"

namespace rdecomp {

/// Matrix-free operator: dimensions plus products with a block of vectors
/// from the left (A * X) and with the transpose (A^T * Y).
class LinearOperator {
 public:
  using Apply = std::function<DenseMatrix(const DenseMatrix&)>;

  LinearOperator(std::size_t rows, std::size_t cols, Apply apply, Apply adjoint,
                 std::optional<std::size_t> nnz_hint = std::nullopt);

  static LinearOperator from_dense(DenseMatrix a);
  static LinearOperator from_csr(CsrMatrix a);
  static LinearOperator zero(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::optional<std::size_t> nnz_hint() const noexcept { return nnz_hint_; }

  /// A * x for x of shape cols x w.
  DenseMatrix apply(const DenseMatrix& x) const;
  /// A^T * y for y of shape rows x w.
  DenseMatrix apply_adjoint(const DenseMatrix& y) const;

  /// The transposed operator.
  LinearOperator adjoint() const;

  /// Explicit rows x cols matrix (applies the operator to the identity).
  DenseMatrix materialize() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  Apply apply_;
  Apply adjoint_;
  std::optional<std::size_t> nnz_hint_;
};

}  // namespace rdecomp
