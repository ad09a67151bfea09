#include <cmath>

#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"

namespace rdecomp {

// Reflectors are stored LAPACK-style: H = I - tau v v^T with v(0) = 1.
// The working copy holds B^T so every column of B is a contiguous row.
QrFactors thin_qr(const DenseMatrix& b) {
  const std::size_t m = b.rows();
  const std::size_t n = b.cols();
  if (m < n) {
    throw DimensionError("thin_qr requires rows >= cols, got " + shape_string(m, n));
  }
  DenseMatrix work = transpose(b);  // n x m
  std::vector<double> tau(n, 0.0);
  std::vector<double> diag(n, 0.0);

  for (std::size_t k = 0; k < n; ++k) {
    double* x = work.row(k).data() + k;
    const std::size_t len = m - k;
    const double alpha = norm2({x, len});
    if (alpha == 0.0) {
      diag[k] = 0.0;
      tau[k] = 0.0;
      continue;
    }
    const double beta = x[0] >= 0.0 ? -alpha : alpha;
    const double v0 = x[0] - beta;
    for (std::size_t i = 1; i < len; ++i) x[i] /= v0;
    tau[k] = (beta - x[0]) / beta;
    x[0] = 1.0;
    diag[k] = beta;
    for (std::size_t j = k + 1; j < n; ++j) {
      double* y = work.row(j).data() + k;
      double w = 0.0;
      for (std::size_t i = 0; i < len; ++i) w += x[i] * y[i];
      w *= tau[k];
      for (std::size_t i = 0; i < len; ++i) y[i] -= w * x[i];
    }
  }

  DenseMatrix r(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) r(i, j) = work(j, i);
    r(j, j) = diag[j];
  }

  // Backward accumulation of the first n columns of H_0 ... H_{n-1}.
  DenseMatrix qt(n, m);
  for (std::size_t j = 0; j < n; ++j) qt(j, j) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    if (tau[kk] == 0.0) continue;
    const double* v = work.row(kk).data() + kk;
    const std::size_t len = m - kk;
    for (std::size_t j = kk; j < n; ++j) {
      double* y = qt.row(j).data() + kk;
      double w = 0.0;
      for (std::size_t i = 0; i < len; ++i) w += v[i] * y[i];
      w *= tau[kk];
      for (std::size_t i = 0; i < len; ++i) y[i] -= w * v[i];
    }
  }

  // Nonnegative diagonal of R.
  for (std::size_t k = 0; k < n; ++k) {
    if (r(k, k) < 0.0) {
      for (std::size_t j = k; j < n; ++j) r(k, j) = -r(k, j);
      for (double& q : qt.row(k)) q = -q;
    }
  }
  return {transpose(qt), std::move(r)};
}

}  // namespace rdecomp
