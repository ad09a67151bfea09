#pragma once

#include <filesystem>

#include "rdecomp/csr_matrix.hpp"
#include "rdecomp/dense_matrix.hpp"

namespace rdecomp::io {

/// MatrixMarket "coordinate real general", 1-based indices.
CsrMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a);

/// Text: first line "rows cols", then row-major entries.
DenseMatrix read_dense_text(const std::filesystem::path& path);
void write_dense_text(const std::filesystem::path& path, const DenseMatrix& a);

/// Binary: u64 rows, u64 cols, then row-major f64, all little-endian.
DenseMatrix read_dense_binary(const std::filesystem::path& path);
void write_dense_binary(const std::filesystem::path& path, const DenseMatrix& a);

}  // namespace rdecomp::io
