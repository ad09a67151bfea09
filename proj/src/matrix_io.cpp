#include "rdecomp/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

#include "rdecomp/errors.hpp"

namespace rdecomp::io {

namespace {

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open for reading", path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot open for writing", path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint64_t get_u64(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw IoError("truncated binary matrix", path.string());
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty MatrixMarket file", path.string());
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate") {
    throw IoError("expected a MatrixMarket coordinate header", path.string());
  }
  if (field != "real" && field != "integer") throw IoError("only real MatrixMarket data is supported", path.string());
  if (symmetry != "general") throw IoError("only general MatrixMarket symmetry is supported", path.string());

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream size_line(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz)) throw IoError("malformed MatrixMarket size line", path.string());

  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw IoError("truncated MatrixMarket entries", path.string());
    if (i == 0 || j == 0 || i > rows || j > cols) throw IoError("MatrixMarket index out of range", path.string());
    triplets.push_back({i - 1, j - 1, v});
  }
  return CsrMatrix::from_triplets(rows, cols, std::move(triplets));
}

void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& a) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  const auto& off = a.row_offsets();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      out << i + 1 << ' ' << a.col_indices()[k] + 1 << ' ' << a.values()[k] << '\n';
    }
  }
  if (!out) throw IoError("write failed", path.string());
}

DenseMatrix read_dense_text(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw IoError("missing 'rows cols' header", path.string());
  std::vector<double> data(rows * cols);
  for (double& v : data) {
    if (!(in >> v)) throw IoError("truncated dense matrix", path.string());
  }
  return DenseMatrix(rows, cols, std::move(data));
}

void write_dense_text(const std::filesystem::path& path, const DenseMatrix& a) {
  auto out = open_out(path);
  out << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out << (j ? " " : "") << a(i, j);
    out << '\n';
  }
  if (!out) throw IoError("write failed", path.string());
}

DenseMatrix read_dense_binary(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  const std::uint64_t rows = get_u64(in, path);
  const std::uint64_t cols = get_u64(in, path);
  std::vector<double> data(rows * cols);
  for (double& v : data) v = std::bit_cast<double>(get_u64(in, path));
  return DenseMatrix(rows, cols, std::move(data));
}

void write_dense_binary(const std::filesystem::path& path, const DenseMatrix& a) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  put_u64(out, a.rows());
  put_u64(out, a.cols());
  for (double v : a.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw IoError("write failed", path.string());
}

}  // namespace rdecomp::io
