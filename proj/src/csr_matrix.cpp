#include "rdecomp/csr_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "rdecomp/errors.hpp"

namespace rdecomp {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {
  if (rows == 0 || cols == 0) {
    throw DimensionError("sparse matrix dimensions must be positive, got " + shape_string(rows, cols));
  }
}

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                     std::vector<std::size_t> col_indices, std::vector<double> values)
    : CsrMatrix(rows, cols) {
  if (row_offsets.size() != rows + 1 || row_offsets.front() != 0 ||
      row_offsets.back() != col_indices.size() || col_indices.size() != values.size()) {
    throw InvalidArgument("inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_offsets[i] > row_offsets[i + 1]) throw InvalidArgument("CSR row offsets must be nondecreasing");
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] >= cols) throw InvalidArgument("CSR column index out of range");
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1]) {
        throw InvalidArgument("CSR column indices must be strictly increasing within a row");
      }
      if (!std::isfinite(values[k])) throw InvalidArgument("CSR values must be finite");
    }
  }
  // Prune stored zeros while compacting.
  col_indices_.reserve(values.size());
  values_.reserve(values.size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (values[k] != 0.0) {
        col_indices_.push_back(col_indices[k]);
        values_.push_back(values[k]);
      }
    }
    row_offsets_[i + 1] = values_.size();
  }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  CsrMatrix out(rows, cols);
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw InvalidArgument("triplet index out of range");
    if (!std::isfinite(t.value)) throw InvalidArgument("triplet value must be finite");
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::size_t k = 0;
  while (k < triplets.size()) {
    const std::size_t r = triplets[k].row;
    const std::size_t c = triplets[k].col;
    double sum = 0.0;
    for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k) sum += triplets[k].value;
    if (sum != 0.0) {
      out.col_indices_.push_back(c);
      out.values_.push_back(sum);
      ++out.row_offsets_[r + 1];
    }
  }
  for (std::size_t i = 0; i < rows; ++i) out.row_offsets_[i + 1] += out.row_offsets_[i];
  return out;
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& a) {
  CsrMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) != 0.0) {
        out.col_indices_.push_back(j);
        out.values_.push_back(a(i, j));
      }
    }
    out.row_offsets_[i + 1] = out.values_.size();
  }
  return out;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  CsrMatrix out(n, n);
  out.col_indices_.resize(n);
  out.values_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.col_indices_[i] = i;
    out.row_offsets_[i + 1] = i + 1;
  }
  return out;
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) out(i, col_indices_[k]) = values_[k];
  }
  return out;
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t(cols_, rows_);
  t.col_indices_.resize(nnz());
  t.values_.resize(nnz());
  for (std::size_t c : col_indices_) ++t.row_offsets_[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) t.row_offsets_[j + 1] += t.row_offsets_[j];
  std::vector<std::size_t> cursor(t.row_offsets_.begin(), t.row_offsets_.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t dst = cursor[col_indices_[k]]++;
      t.col_indices_[dst] = i;
      t.values_[dst] = values_[k];
    }
  }
  return t;
}

CsrMatrix CsrMatrix::scaled(double factor) const {
  if (factor == 0.0) return CsrMatrix(rows_, cols_);
  CsrMatrix out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

}  // namespace rdecomp
