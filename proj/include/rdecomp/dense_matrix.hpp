#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rdecomp {

/// Row-major matrix of doubles.
///
/// A default-constructed matrix is empty (0 x 0) and only serves as a
/// placeholder; every sized constructor requires positive dimensions.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// Zero matrix.
  DenseMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of row-major `data`; rejects non-finite entries.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix diagonal(std::span<const double> values, std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> column(std::size_t j) const;

  /// Leading `cols` columns.
  DenseMatrix left_columns(std::size_t cols) const;
  /// Leading `rows` rows.
  DenseMatrix top_rows(std::size_t rows) const;

  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix transpose(const DenseMatrix& a);

}  // namespace rdecomp
