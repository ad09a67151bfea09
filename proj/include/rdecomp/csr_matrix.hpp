#pragma once

#include <cstddef>
#include <vector>

#include "rdecomp/dense_matrix.hpp"

namespace rdecomp {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row and explicit zeros are never stored.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Empty (nnz = 0) matrix.
  CsrMatrix(std::size_t rows, std::size_t cols);

  /// Validates the structure and prunes stored zeros.
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
            std::vector<std::size_t> col_indices, std::vector<double> values);

  /// Duplicates are summed; entries that end up zero are dropped.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static CsrMatrix from_dense(const DenseMatrix& a);
  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
  const std::vector<double>& values() const noexcept { return values_; }

  DenseMatrix to_dense() const;
  CsrMatrix transposed() const;
  CsrMatrix scaled(double factor) const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

}  // namespace rdecomp
