#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "rdecomp/dense_matrix.hpp"
#include "rdecomp/linear_operator.hpp"
#include "rdecomp/matrix_ref.hpp"
#include "rdecomp/sketch.hpp"

namespace rdecomp {

/// Parameters of the two-sketch randomized SVD.
///
/// Must satisfy rank <= l <= k1, l <= k2, and all of them <= min(m, n).
/// p1 and p2 are the densities of the first and second sketch and only
/// matter for the sparse sub-Gaussian ensemble.
struct RsvdParams {
  std::size_t rank = 0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t l = 0;
  double p1 = 1.0;
  double p2 = 1.0;
  std::uint64_t seed = 0;
  SketchKind sketch = SketchKind::SparseSubGaussian;
  SubGaussianLaw law{};

  /// k1 = ceil(2.5 r), k2 = ceil(3.5 r), l = ceil(1.25 r) + 8, clamped to
  /// min(m, n); p1 = 3/n, p2 = 3/m.
  static RsvdParams defaults(std::size_t m, std::size_t n, std::size_t rank, std::uint64_t seed = 0);

  void validate(std::size_t m, std::size_t n) const;
};

nlohmann::json to_json(const RsvdParams& params);

struct SvdFactors {
  DenseMatrix u;           // m x r
  std::vector<double> s;   // r values, nonincreasing
  DenseMatrix v;           // n x r
};

/// Wall time of each stage in milliseconds.
struct RsvdTimings {
  double sketch_ms = 0.0;         // draw the first sketches, B = A * Omega1^T * Omega1'^T
  double qr_ms = 0.0;             // B = QR
  double second_sketch_ms = 0.0;  // draw Omega2, Omega2 Q, Omega2 A, pinv(Omega2 Q)
  double small_svd_ms = 0.0;      // SVD of pinv(Omega2 Q) Omega2 A, truncation, U = Q U~
  double total_ms = 0.0;
};

struct RsvdOptions {
  bool estimate_residual = true;
  int residual_iters = 100;
};

struct RsvdResult {
  SvdFactors factors;
  RsvdTimings timings;
  std::optional<double> residual_spectral;
  std::optional<double> residual_frobenius;  // only when A is materialized
};

/// Rank-r SVD from one sparse range sketch, a Gaussian re-compression and a
/// second sketch used to solve for the row space:
///   B = A Omega1^T Omega1'^T,  Q R = B,
///   T = pinv(Omega2 Q) (Omega2 A) = U1 S1 V1^T,
///   U = Q U1(:, 1:r), S = S1(1:r), V = V1(:, 1:r).
/// Throws RankDeficiencyError if Omega2 Q is numerically rank deficient.
RsvdResult randomized_svd(MatrixRef a, const RsvdParams& params, const RsvdOptions& options = {});

/// Keeps the leading r singular triplets.
SvdFactors truncate_rank(const SvdFactors& f, std::size_t r);
SvdFactors truncate_rank(const DenseMatrix& u, const std::vector<double>& s, const DenseMatrix& v, std::size_t r);

/// x -> A x - U (S (V^T x)); the referenced A must outlive the operator.
LinearOperator residual_operator(MatrixRef a, const SvdFactors& f);

double spectral_residual(MatrixRef a, const SvdFactors& f, int iters = 100, std::uint64_t seed = 0);
/// Requires a materialized A.
double frobenius_residual(MatrixRef a, const SvdFactors& f);

struct WeylReport {
  double perturbation_norm = 0.0;  // |A - B|_2
  std::vector<double> gaps;        // |sigma_k(A) - sigma_k(B)|
  double max_gap = 0.0;
  double tolerance = 0.0;          // |A - B|_2 + 1e-10 |A|_2
  bool holds = false;
};

/// Checks the singular value perturbation bound for a pair of equally
/// shaped matrices using exact dense SVDs.
WeylReport weyl_check(const DenseMatrix& a, const DenseMatrix& b);

nlohmann::json to_json(const RsvdResult& result, const RsvdParams& params);

}  // namespace rdecomp
