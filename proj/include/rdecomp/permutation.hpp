#pragma once

#include <cstddef>
#include <vector>

#include "rdecomp/dense_matrix.hpp"

namespace rdecomp {

/// Bijection on [0, n).
///
/// Used as a row permutation, (P * M) row i is M row perm[i]; used as a
/// column permutation, (M * Q) column j is M column perm[j].
class PermutationVector {
 public:
  PermutationVector() = default;
  explicit PermutationVector(std::vector<std::size_t> indices);

  static PermutationVector identity(std::size_t n);

  std::size_t size() const noexcept { return indices_.size(); }
  std::size_t operator[](std::size_t i) const noexcept { return indices_[i]; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

  PermutationVector inverse() const;
  /// (*this) applied after `first` as row permutations: this * first.
  PermutationVector compose(const PermutationVector& first) const;

  DenseMatrix permute_rows(const DenseMatrix& m) const;
  DenseMatrix permute_cols(const DenseMatrix& m) const;

  static bool is_valid(const std::vector<std::size_t>& indices);

  friend bool operator==(const PermutationVector&, const PermutationVector&) = default;

 private:
  std::vector<std::size_t> indices_;
};

}  // namespace rdecomp
