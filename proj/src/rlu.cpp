#include "rdecomp/rlu.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/norms.hpp"
#include "rdecomp/rng.hpp"

namespace rdecomp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

enum SeedSlot : std::uint64_t { kSketch = 1, kResidual = 2 };

std::uint64_t slot_seed(std::uint64_t seed, SeedSlot slot) { return derive_seed(seed, 0x524c55, slot); }

// Row i of the result is row perm[i] of x, i.e. P x.
DenseMatrix apply_rows(const PermutationVector& perm, const DenseMatrix& x) { return perm.permute_rows(x); }

// P^T x: row perm[i] of the result is row i of x.
DenseMatrix apply_rows_transposed(const PermutationVector& perm, const DenseMatrix& x) {
  return perm.inverse().permute_rows(x);
}

}  // namespace

RluParams RluParams::defaults(std::size_t m, std::size_t n, std::size_t rank, std::uint64_t seed) {
  (void)m;
  RluParams p;
  p.rank = rank;
  p.k = std::min(n, static_cast<std::size_t>(std::ceil(2.5 * static_cast<double>(rank))));
  p.p = std::min(1.0, 3.0 / static_cast<double>(n));
  p.seed = seed;
  return p;
}

void RluParams::validate(std::size_t m, std::size_t n) const {
  if (rank == 0) throw InvalidArgument("target rank must be positive");
  if (rank > std::min(m, n)) {
    throw InvalidArgument("rank " + std::to_string(rank) + " exceeds min(m, n) = " + std::to_string(std::min(m, n)));
  }
  if (k < rank) throw InvalidArgument("sketch width k = " + std::to_string(k) + " is below the rank");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("sketch density must lie in (0, 1]");
}

nlohmann::json to_json(const RluParams& p) {
  return {{"r", p.rank}, {"k", p.k}, {"p", p.p}, {"seed", p.seed}, {"sketch", to_string(p.sketch)},
          {"law", to_string(p.law.base)}, {"scaled", p.law.scaled}};
}

RluResult randomized_lu(MatrixRef a, const RluParams& params, const RluOptions& options) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  params.validate(m, n);
  const std::size_t r = params.rank;
  RluResult result;
  const auto t0 = Clock::now();

  // Omega is stored transposed (k x n) so that Y = A Omega^T.
  const Sketch omega = make_sketch({params.sketch, params.k, n, params.p, slot_seed(params.seed, kSketch)}, params.law);
  const DenseMatrix y = sketch_matrix(omega.ref(), a, SketchMode::RightTranspose);
  const auto t1 = Clock::now();

  // Complete pivoting: with a very sparse Omega many columns of Y are empty
  // or nearly parallel, and row pivoting alone picks poor bases.
  const CompletePivotLu ly = lu_complete_pivot(y);
  const double lead = std::abs(ly.u(0, 0));
  const double cutoff = default_rank_tolerance(m, params.k) * lead;
  std::size_t found = 0;
  while (found < ly.u.rows() && std::abs(ly.u(found, found)) > cutoff) ++found;
  if (found < r) {
    throw RankDeficiencyError("sketch A * Omega is numerically rank deficient; retry with a new seed or a larger k", r,
                              found);
  }
  const DenseMatrix l_y = ly.l.left_columns(r);
  const auto t2 = Clock::now();

  // W = pinv(L_y) P_y, so B = W A. Column perm[i] of W is column i of pinv(L_y).
  const DenseMatrix l_pinv = pseudo_inverse(l_y);
  DenseMatrix w(r, m);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < m; ++j) w(i, ly.p[j]) = l_pinv(i, j);
  const DenseMatrix b = a.left_times(w);
  const auto t3 = Clock::now();

  const ColumnPivotLu lb = lu_column_pivot(b);
  const PartialPivotLu repivot = lu_partial_pivot(gemm(l_y, lb.l));
  result.factors.p = repivot.p.compose(ly.p);
  result.factors.qc = lb.qc;
  result.factors.l = repivot.l;
  result.factors.u = gemm(repivot.u, lb.u);
  const auto t4 = Clock::now();

  result.timings = {elapsed_ms(t0, t1), elapsed_ms(t1, t2), elapsed_ms(t2, t3), elapsed_ms(t3, t4), elapsed_ms(t0, t4)};

  if (options.estimate_residual) {
    result.residual_spectral =
        lu_spectral_residual(a, result.factors, options.residual_iters, slot_seed(params.seed, kResidual));
    if (a.materialized()) result.residual_frobenius = lu_frobenius_residual(a, result.factors);
  }
  return result;
}

LinearOperator lu_residual_operator(MatrixRef a, const LuFactors& f) {
  if (f.l.rows() != a.rows() || f.u.cols() != a.cols()) throw DimensionError("LU factors do not match the matrix");
  auto factors = std::make_shared<const LuFactors>(f);
  auto apply = [a, factors](const DenseMatrix& x) {
    // Qc^T x picks rows qc[j] of x.
    const DenseMatrix lu_x = gemm(factors->l, gemm(factors->u, factors->qc.permute_rows(x)));
    return subtract(a.times(x), apply_rows_transposed(factors->p, lu_x));
  };
  auto adjoint = [a, factors](const DenseMatrix& y) {
    const DenseMatrix ut_lt_py = gemm_tn(factors->u, gemm_tn(factors->l, apply_rows(factors->p, y)));
    return subtract(a.adjoint_times(y), apply_rows_transposed(factors->qc, ut_lt_py));
  };
  return LinearOperator(a.rows(), a.cols(), apply, adjoint);
}

double lu_spectral_residual(MatrixRef a, const LuFactors& f, int iters, std::uint64_t seed) {
  return spectral_norm_estimate(lu_residual_operator(a, f), iters, seed);
}

double lu_frobenius_residual(MatrixRef a, const LuFactors& f) {
  if (!a.materialized()) throw InvalidArgument("Frobenius residual needs a materialized matrix");
  const DenseMatrix paq = f.qc.permute_cols(f.p.permute_rows(a.to_dense()));
  return frobenius_norm(subtract(paq, gemm(f.l, f.u)));
}

LuDiagnostics diagnose(const LuFactors& f) {
  LuDiagnostics d;
  d.permutations_valid = PermutationVector::is_valid(f.p.indices()) && PermutationVector::is_valid(f.qc.indices()) &&
                         f.p.size() == f.l.rows() && f.qc.size() == f.u.cols();
  d.l_unit_lower = true;
  for (std::size_t i = 0; i < f.l.rows(); ++i)
    for (std::size_t j = i; j < f.l.cols(); ++j)
      if (f.l(i, j) != (i == j ? 1.0 : 0.0)) d.l_unit_lower = false;
  d.u_upper = true;
  for (std::size_t i = 0; i < f.u.rows(); ++i)
    for (std::size_t j = 0; j < std::min(i, f.u.cols()); ++j)
      if (f.u(i, j) != 0.0) d.u_upper = false;
  d.max_abs_l = max_abs(f.l);
  return d;
}

nlohmann::json to_json(const RluResult& result, const RluParams& params) {
  const LuDiagnostics d = diagnose(result.factors);
  nlohmann::json j;
  j["params"] = to_json(params);
  j["timings_ms"] = {{"sketch", result.timings.sketch_ms},
                     {"lu_y", result.timings.lu_y_ms},
                     {"project", result.timings.project_ms},
                     {"lu_b", result.timings.lu_b_ms},
                     {"total", result.timings.total_ms}};
  j["residual"] = {{"spectral", result.residual_spectral ? nlohmann::json(*result.residual_spectral) : nlohmann::json()},
                   {"frobenius",
                    result.residual_frobenius ? nlohmann::json(*result.residual_frobenius) : nlohmann::json()}};
  j["diagnostics"] = {{"permutations_valid", d.permutations_valid},
                      {"l_unit_lower", d.l_unit_lower},
                      {"u_upper", d.u_upper},
                      {"max_abs_l", d.max_abs_l}};
  return j;
}

}  // namespace rdecomp
