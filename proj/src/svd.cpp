#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/rng.hpp"

namespace rdecomp {

namespace {

constexpr int kMaxSweeps = 80;

struct JacobiResult {
  DenseMatrix u;
  std::vector<double> s;
  DenseMatrix v;
};

// Replaces each listed column of `ut` (stored as rows) by a unit vector
// orthogonal to all other rows. Candidates are Gaussian with a fixed seed: a
// canonical basis vector can lie almost entirely inside the known span.
void complete_basis(DenseMatrix& ut, const std::vector<std::size_t>& missing) {
  const std::size_t n = ut.cols();
  std::vector<bool> is_missing(ut.rows(), false);
  for (std::size_t j : missing) is_missing[j] = true;
  RandomStream rng(0x636f6d706c657465ull);
  for (std::size_t j : missing) {
    auto target = ut.row(j);
    for (int attempt = 0; attempt < 8 && is_missing[j]; ++attempt) {
      for (double& x : target) x = rng.normal();
      const double start = norm2(target);
      for (int pass = 0; pass < 3; ++pass) {
        for (std::size_t other = 0; other < ut.rows(); ++other) {
          if (other == j || is_missing[other]) continue;
          const double proj = dot(ut.row(other), target);
          for (std::size_t i = 0; i < n; ++i) target[i] -= proj * ut(other, i);
        }
      }
      const double nrm = norm2(target);
      if (nrm > 1e-6 * start) {
        for (double& x : target) x /= nrm;
        is_missing[j] = false;
      }
    }
    if (is_missing[j]) throw ConvergenceError("dense_svd: failed to complete the left singular basis");
  }
}

// One-sided Jacobi on a square matrix given as its transpose (each row of
// `gt` is a column of the matrix).
JacobiResult jacobi_svd_square(DenseMatrix gt, bool want_vectors) {
  const std::size_t n = gt.rows();
  const std::size_t len = gt.cols();
  DenseMatrix vt = want_vectors ? DenseMatrix::identity(n) : DenseMatrix();
  const double tol = static_cast<double>(std::max<std::size_t>(len, 1)) * std::numeric_limits<double>::epsilon();

  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    // A column below eps relative to the largest is numerical noise; left in
    // place it keeps shrinking under rotations without ever converging.
    double largest = 0.0;
    for (std::size_t j = 0; j < n; ++j) largest = std::max(largest, norm2(gt.row(j)));
    for (std::size_t j = 0; j < n; ++j) {
      auto col = gt.row(j);
      if (norm2(col) <= std::numeric_limits<double>::epsilon() * largest) std::fill(col.begin(), col.end(), 0.0);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      double* gp = gt.row(p).data();
      for (std::size_t q = p + 1; q < n; ++q) {
        double* gq = gt.row(q).data();
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
          alpha += gp[i] * gp[i];
          beta += gq[i] * gq[i];
          gamma += gp[i] * gq[i];
        }
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < len; ++i) {
          const double a = gp[i];
          const double b = gq[i];
          gp[i] = c * a - s * b;
          gq[i] = s * a + c * b;
        }
        if (want_vectors) {
          double* vp = vt.row(p).data();
          double* vq = vt.row(q).data();
          for (std::size_t i = 0; i < n; ++i) {
            const double a = vp[i];
            const double b = vq[i];
            vp[i] = c * a - s * b;
            vq[i] = s * a + c * b;
          }
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw ConvergenceError("dense_svd: Jacobi sweeps did not converge within " + std::to_string(kMaxSweeps));
  }

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(gt.row(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  JacobiResult out;
  out.s.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.s[j] = norms[order[j]];
  if (!want_vectors) return out;

  DenseMatrix ut(n, len);
  DenseMatrix vt_sorted(n, n);
  std::vector<std::size_t> missing;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    std::copy(vt.row(src).begin(), vt.row(src).end(), vt_sorted.row(j).begin());
    if (out.s[j] == 0.0) {
      missing.push_back(j);
      continue;
    }
    auto dst = ut.row(j);
    auto g = gt.row(src);
    for (std::size_t i = 0; i < len; ++i) dst[i] = g[i] / out.s[j];
  }
  if (!missing.empty()) complete_basis(ut, missing);
  out.u = transpose(ut);
  out.v = transpose(vt_sorted);
  return out;
}

SvdResult svd_tall(const DenseMatrix& m, bool want_vectors) {
  if (m.rows() == m.cols()) {
    auto j = jacobi_svd_square(transpose(m), want_vectors);
    return {std::move(j.u), std::move(j.s), std::move(j.v)};
  }
  QrFactors qr = thin_qr(m);
  auto j = jacobi_svd_square(transpose(qr.r), want_vectors);
  if (!want_vectors) return {DenseMatrix(), std::move(j.s), DenseMatrix()};
  return {gemm(qr.q, j.u), std::move(j.s), std::move(j.v)};
}

}  // namespace

SvdResult dense_svd(const DenseMatrix& m) {
  if (m.empty()) throw DimensionError("dense_svd of an empty matrix");
  if (m.rows() >= m.cols()) return svd_tall(m, true);
  SvdResult t = svd_tall(transpose(m), true);
  return {std::move(t.v), std::move(t.s), std::move(t.u)};
}

std::vector<double> singular_values(const DenseMatrix& m) {
  if (m.empty()) throw DimensionError("singular_values of an empty matrix");
  if (m.rows() >= m.cols()) return svd_tall(m, false).s;
  return svd_tall(transpose(m), false).s;
}

double default_rank_tolerance(std::size_t rows, std::size_t cols) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

DenseMatrix pseudo_inverse(const DenseMatrix& m, std::optional<double> rank_tol) {
  const SvdResult svd = dense_svd(m);
  const double tol = rank_tol.value_or(default_rank_tolerance(m.rows(), m.cols()));
  const double cutoff = tol * (svd.s.empty() ? 0.0 : svd.s.front());
  std::vector<double> inv(svd.s.size(), 0.0);
  for (std::size_t i = 0; i < svd.s.size(); ++i) {
    if (svd.s[i] > cutoff && svd.s[i] > 0.0) inv[i] = 1.0 / svd.s[i];
  }
  // V * diag(inv) * U^T
  return gemm_nt(scale_columns(svd.v, inv), svd.u);
}

}  // namespace rdecomp
