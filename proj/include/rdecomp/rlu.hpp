#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "rdecomp/dense_matrix.hpp"
#include "rdecomp/linear_operator.hpp"
#include "rdecomp/matrix_ref.hpp"
#include "rdecomp/permutation.hpp"
#include "rdecomp/sketch.hpp"

namespace rdecomp {

/// Parameters of the randomized LU. Requires rank <= min(m, n, k).
struct RluParams {
  std::size_t rank = 0;
  std::size_t k = 0;  // sketch width
  double p = 1.0;     // sketch density
  std::uint64_t seed = 0;
  SketchKind sketch = SketchKind::SparseSubGaussian;
  SubGaussianLaw law{};

  /// k = ceil(2.5 r) clamped to n, p = 3/n.
  static RluParams defaults(std::size_t m, std::size_t n, std::size_t rank, std::uint64_t seed = 0);

  void validate(std::size_t m, std::size_t n) const;
};

nlohmann::json to_json(const RluParams& params);

/// P A Qc ~= L U.
struct LuFactors {
  PermutationVector p;   // rows of A
  PermutationVector qc;  // columns of A
  DenseMatrix l;         // m x r, unit lower trapezoidal, |l| <= 1
  DenseMatrix u;         // r x n, upper trapezoidal
};

struct RluTimings {
  double sketch_ms = 0.0;   // Y = A Omega
  double lu_y_ms = 0.0;     // complete-pivot LU of Y
  double project_ms = 0.0;  // B = pinv(L_y) P A
  double lu_b_ms = 0.0;     // column-pivot LU of B, products, final row pivot
  double total_ms = 0.0;
};

struct RluOptions {
  bool estimate_residual = true;
  int residual_iters = 100;
};

struct RluResult {
  LuFactors factors;
  RluTimings timings;
  std::optional<double> residual_spectral;
  std::optional<double> residual_frobenius;  // only when A is materialized
};

/// Rank-r LU from one sparse sketch of the column space:
///   Y = A Omega,          P_y Y Q_y = L U (complete pivoting), L_y = L(:, 1:r),
///   B = pinv(L_y) P_y A,  B Qc = L_b U_b,
///   L_y L_b = P' L' U'    (row pivoting, keeps |L| <= 1),
///   P = P' P_y, L = L', U = U' U_b.
/// Throws RankDeficiencyError if Y has numerical rank below r.
RluResult randomized_lu(MatrixRef a, const RluParams& params, const RluOptions& options = {});

/// x -> A x - P^T L U Qc^T x.
LinearOperator lu_residual_operator(MatrixRef a, const LuFactors& f);

double lu_spectral_residual(MatrixRef a, const LuFactors& f, int iters = 100, std::uint64_t seed = 0);
/// Requires a materialized A.
double lu_frobenius_residual(MatrixRef a, const LuFactors& f);

/// Structural checks on a factorization.
struct LuDiagnostics {
  bool permutations_valid = false;
  bool l_unit_lower = false;
  bool u_upper = false;
  double max_abs_l = 0.0;
};

LuDiagnostics diagnose(const LuFactors& f);

nlohmann::json to_json(const RluResult& result, const RluParams& params);

}  // namespace rdecomp
