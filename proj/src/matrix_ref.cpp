#include "rdecomp/matrix_ref.hpp"

#include "rdecomp/errors.hpp"
#include "rdecomp/kernels.hpp"

namespace rdecomp {

std::size_t MatrixRef::rows() const noexcept {
  return std::visit([](const auto* p) { return p->rows(); }, ref_);
}

std::size_t MatrixRef::cols() const noexcept {
  return std::visit([](const auto* p) { return p->cols(); }, ref_);
}

const DenseMatrix* MatrixRef::dense() const noexcept {
  auto p = std::get_if<const DenseMatrix*>(&ref_);
  return p ? *p : nullptr;
}

const CsrMatrix* MatrixRef::csr() const noexcept {
  auto p = std::get_if<const CsrMatrix*>(&ref_);
  return p ? *p : nullptr;
}

const LinearOperator* MatrixRef::op() const noexcept {
  auto p = std::get_if<const LinearOperator*>(&ref_);
  return p ? *p : nullptr;
}

DenseMatrix MatrixRef::times(const DenseMatrix& x) const {
  if (auto d = dense()) return gemm(*d, x);
  if (auto s = csr()) return spmm(*s, x, Side::Left);
  return op()->apply(x);
}

DenseMatrix MatrixRef::adjoint_times(const DenseMatrix& y) const {
  if (auto d = dense()) return gemm_tn(*d, y);
  if (auto s = csr()) return spmm(*s, y, Side::Left, true);
  return op()->apply_adjoint(y);
}

DenseMatrix MatrixRef::left_times(const DenseMatrix& w) const {
  if (auto d = dense()) return gemm(w, *d);
  if (auto s = csr()) return spmm(*s, w, Side::Right);
  // W * A = (A^T * W^T)^T
  return transpose(op()->apply_adjoint(transpose(w)));
}

DenseMatrix MatrixRef::to_dense() const {
  if (auto d = dense()) return *d;
  if (auto s = csr()) return s->to_dense();
  return op()->materialize();
}

LinearOperator MatrixRef::as_operator() const {
  if (auto o = op()) return *o;
  const MatrixRef self = *this;
  std::optional<std::size_t> nnz;
  if (auto d = dense()) nnz = d->size();
  if (auto s = csr()) nnz = s->nnz();
  return LinearOperator(
      rows(), cols(), [self](const DenseMatrix& x) { return self.times(x); },
      [self](const DenseMatrix& y) { return self.adjoint_times(y); }, nnz);
}

}  // namespace rdecomp
