#include "rdecomp/permutation.hpp"

#include <algorithm>
#include <numeric>

#include "rdecomp/errors.hpp"

namespace rdecomp {

PermutationVector::PermutationVector(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  if (!is_valid(indices_)) throw InvalidArgument("permutation vector is not a bijection");
}

PermutationVector PermutationVector::identity(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return PermutationVector(std::move(idx));
}

bool PermutationVector::is_valid(const std::vector<std::size_t>& indices) {
  std::vector<bool> seen(indices.size(), false);
  for (std::size_t v : indices) {
    if (v >= indices.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

PermutationVector PermutationVector::inverse() const {
  std::vector<std::size_t> inv(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) inv[indices_[i]] = i;
  return PermutationVector(std::move(inv));
}

PermutationVector PermutationVector::compose(const PermutationVector& first) const {
  if (first.size() != size()) throw DimensionError("permutation sizes differ");
  // (this * first * M) row i = (first * M) row idx[i] = M row first[idx[i]].
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = first[indices_[i]];
  return PermutationVector(std::move(out));
}

DenseMatrix PermutationVector::permute_rows(const DenseMatrix& m) const {
  if (m.rows() != size()) throw DimensionError("row permutation size mismatch");
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < size(); ++i) {
    std::copy(m.row(indices_[i]).begin(), m.row(indices_[i]).end(), out.row(i).begin());
  }
  return out;
}

DenseMatrix PermutationVector::permute_cols(const DenseMatrix& m) const {
  if (m.cols() != size()) throw DimensionError("column permutation size mismatch");
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto src = m.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < size(); ++j) dst[j] = src[indices_[j]];
  }
  return out;
}

}  // namespace rdecomp
