#pragma once

#include <variant>

#include "rdecomp/csr_matrix.hpp"
#include "rdecomp/dense_matrix.hpp"
#include "rdecomp/linear_operator.hpp"

namespace rdecomp {

/// Non-owning handle over any of the three matrix representations. The
/// referenced object must outlive the handle.
class MatrixRef {
 public:
  MatrixRef(const DenseMatrix& a) : ref_(&a) {}     // NOLINT(google-explicit-constructor)
  MatrixRef(const CsrMatrix& a) : ref_(&a) {}       // NOLINT(google-explicit-constructor)
  MatrixRef(const LinearOperator& a) : ref_(&a) {}  // NOLINT(google-explicit-constructor)

  std::size_t rows() const noexcept;
  std::size_t cols() const noexcept;

  const DenseMatrix* dense() const noexcept;
  const CsrMatrix* csr() const noexcept;
  const LinearOperator* op() const noexcept;
  bool materialized() const noexcept { return op() == nullptr; }

  /// A * X.
  DenseMatrix times(const DenseMatrix& x) const;
  /// A^T * Y.
  DenseMatrix adjoint_times(const DenseMatrix& y) const;
  /// W * A.
  DenseMatrix left_times(const DenseMatrix& w) const;

  DenseMatrix to_dense() const;

  /// Operator view sharing the referenced storage.
  LinearOperator as_operator() const;

 private:
  std::variant<const DenseMatrix*, const CsrMatrix*, const LinearOperator*> ref_;
};

}  // namespace rdecomp
