#include "rdecomp/linear_operator.hpp"

#include <memory>

#include "rdecomp/errors.hpp"
#include "rdecomp/kernels.hpp"

namespace rdecomp {

LinearOperator::LinearOperator(std::size_t rows, std::size_t cols, Apply apply, Apply adjoint,
                               std::optional<std::size_t> nnz_hint)
    : rows_(rows), cols_(cols), apply_(std::move(apply)), adjoint_(std::move(adjoint)), nnz_hint_(nnz_hint) {
  if (rows == 0 || cols == 0) throw DimensionError("operator dimensions must be positive");
  if (!apply_ || !adjoint_) throw InvalidArgument("operator requires both apply and adjoint");
}

LinearOperator LinearOperator::from_dense(DenseMatrix a) {
  auto shared = std::make_shared<const DenseMatrix>(std::move(a));
  const std::size_t nnz = shared->size();
  return LinearOperator(
      shared->rows(), shared->cols(), [shared](const DenseMatrix& x) { return gemm(*shared, x); },
      [shared](const DenseMatrix& y) { return gemm_tn(*shared, y); }, nnz);
}

LinearOperator LinearOperator::from_csr(CsrMatrix a) {
  auto shared = std::make_shared<const CsrMatrix>(std::move(a));
  return LinearOperator(
      shared->rows(), shared->cols(), [shared](const DenseMatrix& x) { return spmm(*shared, x, Side::Left); },
      [shared](const DenseMatrix& y) { return spmm(*shared, y, Side::Left, true); }, shared->nnz());
}

LinearOperator LinearOperator::zero(std::size_t rows, std::size_t cols) {
  return LinearOperator(
      rows, cols, [rows](const DenseMatrix& x) { return DenseMatrix(rows, x.cols()); },
      [cols](const DenseMatrix& y) { return DenseMatrix(cols, y.cols()); }, 0);
}

DenseMatrix LinearOperator::apply(const DenseMatrix& x) const {
  if (x.rows() != cols_) {
    throw DimensionError("operator " + shape_string(rows_, cols_) + " cannot apply to " +
                         shape_string(x.rows(), x.cols()));
  }
  DenseMatrix y = apply_(x);
  if (y.rows() != rows_ || y.cols() != x.cols()) throw DimensionError("operator apply returned wrong shape");
  return y;
}

DenseMatrix LinearOperator::apply_adjoint(const DenseMatrix& y) const {
  if (y.rows() != rows_) {
    throw DimensionError("adjoint of operator " + shape_string(rows_, cols_) + " cannot apply to " +
                         shape_string(y.rows(), y.cols()));
  }
  DenseMatrix x = adjoint_(y);
  if (x.rows() != cols_ || x.cols() != y.cols()) throw DimensionError("operator adjoint returned wrong shape");
  return x;
}

LinearOperator LinearOperator::adjoint() const {
  return LinearOperator(cols_, rows_, adjoint_, apply_, nnz_hint_);
}

DenseMatrix LinearOperator::materialize() const { return apply(DenseMatrix::identity(cols_)); }

}  // namespace rdecomp
