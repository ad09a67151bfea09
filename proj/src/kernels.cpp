#include "rdecomp/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "rdecomp/errors.hpp"

namespace rdecomp {

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": shapes " + shape_string(a.rows(), a.cols()) + " and " +
                         shape_string(b.rows(), b.cols()) + " differ");
  }
}

void require_inner(std::size_t left_cols, std::size_t right_rows, std::size_t ar, std::size_t ac,
                   std::size_t br, std::size_t bc, const char* what) {
  if (left_cols != right_rows) {
    throw DimensionError(std::string(what) + ": cannot multiply " + shape_string(ar, ac) + " by " +
                         shape_string(br, bc));
  }
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  require_inner(a.cols(), b.rows(), a.rows(), a.cols(), b.rows(), b.cols(), "gemm");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  DenseMatrix c(m, n);
  constexpr std::size_t kColBlock = 512;
  constexpr std::size_t kInnerBlock = 128;
  for (std::size_t j0 = 0; j0 < n; j0 += kColBlock) {
    const std::size_t jw = std::min(kColBlock, n - j0);
    for (std::size_t p0 = 0; p0 < k; p0 += kInnerBlock) {
      const std::size_t p1 = std::min(k, p0 + kInnerBlock);
      for (std::size_t i = 0; i < m; ++i) {
        double* crow = c.row(i).data() + j0;
        const double* arow = a.row(i).data();
        for (std::size_t p = p0; p < p1; ++p) {
          const double aip = arow[p];
          if (aip == 0.0) continue;
          const double* brow = b.row(p).data() + j0;
          for (std::size_t j = 0; j < jw; ++j) crow[j] += aip * brow[j];
        }
      }
    }
  }
  return c;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require_inner(a.rows(), b.rows(), a.cols(), a.rows(), b.rows(), b.cols(), "gemm_tn");
  return gemm(transpose(a), b);
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require_inner(a.cols(), b.cols(), a.rows(), a.cols(), b.cols(), b.rows(), "gemm_nt");
  return gemm(a, transpose(b));
}

DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& b, Side side, bool transpose_s) {
  const auto& offsets = s.row_offsets();
  const auto& cols = s.col_indices();
  const auto& vals = s.values();
  const std::size_t op_rows = transpose_s ? s.cols() : s.rows();
  const std::size_t op_cols = transpose_s ? s.rows() : s.cols();

  if (side == Side::Left) {
    require_inner(op_cols, b.rows(), op_rows, op_cols, b.rows(), b.cols(), "spmm");
    const std::size_t w = b.cols();
    DenseMatrix out(op_rows, w);
    for (std::size_t i = 0; i < s.rows(); ++i) {
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        const double v = vals[k];
        // S * B: out row i += v * B row col;  S^T * B: out row col += v * B row i.
        const double* src = b.row(transpose_s ? i : cols[k]).data();
        double* dst = out.row(transpose_s ? cols[k] : i).data();
        for (std::size_t j = 0; j < w; ++j) dst[j] += v * src[j];
      }
    }
    return out;
  }

  require_inner(b.cols(), op_rows, b.rows(), b.cols(), op_rows, op_cols, "spmm");
  DenseMatrix out(b.rows(), op_cols);
  for (std::size_t r = 0; r < b.rows(); ++r) {
    const double* brow = b.row(r).data();
    double* orow = out.row(r).data();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      if (transpose_s) {
        // (B S^T)(r, i) = <B row r, S row i>.
        double acc = 0.0;
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) acc += brow[cols[k]] * vals[k];
        orow[i] = acc;
      } else {
        // (B S) row r += B(r, i) * S row i.
        const double bri = brow[i];
        if (bri == 0.0) continue;
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) orow[cols[k]] += bri * vals[k];
      }
    }
  }
  return out;
}

DenseMatrix spgemm_dense(const CsrMatrix& a, const CsrMatrix& b) {
  require_inner(a.cols(), b.rows(), a.rows(), a.cols(), b.rows(), b.cols(), "spgemm_dense");
  DenseMatrix out(a.rows(), b.cols());
  const auto& ao = a.row_offsets();
  const auto& ac = a.col_indices();
  const auto& av = a.values();
  const auto& bo = b.row_offsets();
  const auto& bc = b.col_indices();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* orow = out.row(i).data();
    for (std::size_t k = ao[i]; k < ao[i + 1]; ++k) {
      const std::size_t j = ac[k];
      const double v = av[k];
      for (std::size_t t = bo[j]; t < bo[j + 1]; ++t) orow[bc[t]] += v * bv[t];
    }
  }
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix out = a;
  auto o = out.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += y[i];
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "subtract");
  DenseMatrix out = a;
  auto o = out.data();
  auto y = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= y[i];
  return out;
}

DenseMatrix scale(const DenseMatrix& a, double factor) {
  DenseMatrix out = a;
  for (double& x : out.data()) x *= factor;
  return out;
}

DenseMatrix scale_columns(const DenseMatrix& a, std::span<const double> d) {
  if (d.size() != a.cols()) throw DimensionError("scale_columns: diagonal length mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) row[j] *= d[j];
  }
  return out;
}

double frobenius_norm(const DenseMatrix& a) {
  CompensatedSum acc;
  for (double x : a.data()) acc.add(x * x);
  return std::sqrt(acc.value());
}

double frobenius_norm(const CsrMatrix& a) {
  CompensatedSum acc;
  for (double x : a.values()) acc.add(x * x);
  return std::sqrt(acc.value());
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

double orthonormality_error(const DenseMatrix& q) {
  const DenseMatrix g = gemm_tn(q, q);
  double m = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) m = std::max(m, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  }
  return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double norm2(std::span<const double> x) {
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += (v / scale) * (v / scale);
  return scale * std::sqrt(acc);
}

}  // namespace rdecomp
