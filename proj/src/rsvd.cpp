#include "rdecomp/rsvd.hpp"

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

std::size_t ceil_mul(double factor, std::size_t r) {
  return static_cast<std::size_t>(std::ceil(factor * static_cast<double>(r)));
}

// Independent sub-seeds for the three random matrices of one run.
enum SeedSlot : std::uint64_t { kFirstSketch = 1, kRecompression = 2, kSecondSketch = 3, kResidual = 4 };

std::uint64_t slot_seed(std::uint64_t seed, SeedSlot slot) { return derive_seed(seed, 0x52535644, slot); }

}  // namespace

RsvdParams RsvdParams::defaults(std::size_t m, std::size_t n, std::size_t rank, std::uint64_t seed) {
  const std::size_t cap = std::min(m, n);
  RsvdParams p;
  p.rank = rank;
  p.k1 = std::min(cap, ceil_mul(2.5, rank));
  p.k2 = std::min(cap, ceil_mul(3.5, rank));
  p.l = std::min({cap, p.k1, p.k2, ceil_mul(1.25, rank) + 8});
  p.p1 = std::min(1.0, 3.0 / static_cast<double>(n));
  p.p2 = std::min(1.0, 3.0 / static_cast<double>(m));
  p.seed = seed;
  return p;
}

void RsvdParams::validate(std::size_t m, std::size_t n) const {
  const std::size_t cap = std::min(m, n);
  if (rank == 0) throw InvalidArgument("target rank must be positive");
  if (!(rank <= l && l <= k1 && l <= k2)) {
    throw InvalidArgument("need r <= l <= k1 and l <= k2, got r=" + std::to_string(rank) + " l=" + std::to_string(l) +
                          " k1=" + std::to_string(k1) + " k2=" + std::to_string(k2));
  }
  if (k1 > cap || k2 > cap) {
    throw InvalidArgument("sketch sizes must not exceed min(m, n) = " + std::to_string(cap));
  }
  if (!(p1 > 0.0 && p1 <= 1.0) || !(p2 > 0.0 && p2 <= 1.0)) {
    throw InvalidArgument("sketch densities must lie in (0, 1]");
  }
}

nlohmann::json to_json(const RsvdParams& p) {
  return {{"r", p.rank},   {"k1", p.k1},     {"k2", p.k2},
          {"l", p.l},      {"p1", p.p1},     {"p2", p.p2},
          {"seed", p.seed}, {"sketch", to_string(p.sketch)},
          {"law", to_string(p.law.base)},    {"scaled", p.law.scaled}};
}

RsvdResult randomized_svd(MatrixRef a, const RsvdParams& params, const RsvdOptions& options) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  params.validate(m, n);
  RsvdResult result;
  const auto t0 = Clock::now();

  // Range sketch B = A Omega1^T Omega1'^T (m x l).
  const Sketch omega1 = make_sketch(
      {params.sketch, params.k1, n, params.p1, slot_seed(params.seed, kFirstSketch)}, params.law);
  const DenseMatrix recompress = sample_dense_gaussian(params.l, params.k1, slot_seed(params.seed, kRecompression));
  DenseMatrix b;
  if (a.materialized()) {
    b = gemm_nt(sketch_matrix(omega1.ref(), a, SketchMode::RightTranspose), recompress);
  } else {
    // Each operator application is expensive, so apply it to the l columns
    // of the composite sketch instead of the k1 columns of Omega1^T.
    b = a.times(transpose(omega1.ref().left_times(recompress)));
  }
  const auto t1 = Clock::now();

  DenseMatrix q = thin_qr(b).q;
  const auto t2 = Clock::now();

  const Sketch omega2 = make_sketch(
      {params.sketch, params.k2, m, params.p2, slot_seed(params.seed, kSecondSketch)}, params.law);
  const DenseMatrix omega2_q = sketch_matrix(omega2.ref(), q, SketchMode::Left);
  const DenseMatrix omega2_a = sketch_matrix(omega2.ref(), a, SketchMode::Left);
  const SvdResult small = dense_svd(omega2_q);
  const double cutoff = default_rank_tolerance(omega2_q.rows(), omega2_q.cols()) * small.s.front();
  const auto rank = static_cast<std::size_t>(
      std::count_if(small.s.begin(), small.s.end(), [&](double s) { return s > cutoff; }));
  if (rank < params.l) {
    throw RankDeficiencyError("Omega2 * Q is numerically rank deficient; retry with a new seed or a larger k2",
                              params.l, rank);
  }
  std::vector<double> inv(small.s.size());
  std::transform(small.s.begin(), small.s.end(), inv.begin(), [](double s) { return 1.0 / s; });
  const DenseMatrix pinv = gemm_nt(scale_columns(small.v, inv), small.u);  // l x k2
  const auto t3 = Clock::now();

  const SvdResult core = dense_svd(gemm(pinv, omega2_a));  // l x n
  const std::size_t r = params.rank;
  result.factors.u = gemm(q, core.u.left_columns(r));
  result.factors.s.assign(core.s.begin(), core.s.begin() + static_cast<std::ptrdiff_t>(r));
  result.factors.v = core.v.left_columns(r);
  const auto t4 = Clock::now();

  result.timings = {elapsed_ms(t0, t1), elapsed_ms(t1, t2), elapsed_ms(t2, t3), elapsed_ms(t3, t4), elapsed_ms(t0, t4)};

  if (options.estimate_residual) {
    result.residual_spectral =
        spectral_residual(a, result.factors, options.residual_iters, slot_seed(params.seed, kResidual));
    if (a.materialized()) result.residual_frobenius = frobenius_residual(a, result.factors);
  }
  return result;
}

SvdFactors truncate_rank(const DenseMatrix& u, const std::vector<double>& s, const DenseMatrix& v, std::size_t r) {
  if (r == 0 || r > s.size()) {
    throw InvalidArgument("truncation rank " + std::to_string(r) + " outside [1, " + std::to_string(s.size()) + "]");
  }
  if (u.cols() != s.size() || v.cols() != s.size()) throw DimensionError("factor widths disagree with s");
  return {u.left_columns(r), std::vector<double>(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(r)),
          v.left_columns(r)};
}

SvdFactors truncate_rank(const SvdFactors& f, std::size_t r) { return truncate_rank(f.u, f.s, f.v, r); }

LinearOperator residual_operator(MatrixRef a, const SvdFactors& f) {
  if (f.u.rows() != a.rows() || f.v.rows() != a.cols()) throw DimensionError("factors do not match the matrix");
  auto factors = std::make_shared<const SvdFactors>(f);
  auto apply = [a, factors](const DenseMatrix& x) {
    const DenseMatrix coeff = scale_columns(transpose(gemm_tn(factors->v, x)), factors->s);  // w x r
    return subtract(a.times(x), gemm_nt(factors->u, coeff));
  };
  auto adjoint = [a, factors](const DenseMatrix& y) {
    const DenseMatrix coeff = scale_columns(transpose(gemm_tn(factors->u, y)), factors->s);
    return subtract(a.adjoint_times(y), gemm_nt(factors->v, coeff));
  };
  return LinearOperator(a.rows(), a.cols(), apply, adjoint);
}

double spectral_residual(MatrixRef a, const SvdFactors& f, int iters, std::uint64_t seed) {
  return spectral_norm_estimate(residual_operator(a, f), iters, seed);
}

double frobenius_residual(MatrixRef a, const SvdFactors& f) {
  if (!a.materialized()) throw InvalidArgument("Frobenius residual needs a materialized matrix");
  const DenseMatrix approx = gemm_nt(scale_columns(f.u, f.s), f.v);
  return frobenius_norm(subtract(a.to_dense(), approx));
}

WeylReport weyl_check(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("weyl_check: shapes " + shape_string(a.rows(), a.cols()) + " and " +
                         shape_string(b.rows(), b.cols()) + " differ");
  }
  WeylReport report;
  report.perturbation_norm = singular_values(subtract(a, b)).front();
  const auto sa = singular_values(a);
  const auto sb = singular_values(b);
  report.gaps.resize(sa.size());
  for (std::size_t k = 0; k < sa.size(); ++k) {
    report.gaps[k] = std::abs(sa[k] - sb[k]);
    report.max_gap = std::max(report.max_gap, report.gaps[k]);
  }
  report.tolerance = report.perturbation_norm + 1e-10 * sa.front();
  report.holds = report.max_gap <= report.tolerance;
  return report;
}

nlohmann::json to_json(const RsvdResult& result, const RsvdParams& params) {
  nlohmann::json j;
  j["params"] = to_json(params);
  j["timings_ms"] = {{"sketch", result.timings.sketch_ms},
                     {"qr", result.timings.qr_ms},
                     {"second_sketch", result.timings.second_sketch_ms},
                     {"small_svd", result.timings.small_svd_ms},
                     {"total", result.timings.total_ms}};
  j["residual"] = {{"spectral", result.residual_spectral ? nlohmann::json(*result.residual_spectral) : nlohmann::json()},
                   {"frobenius",
                    result.residual_frobenius ? nlohmann::json(*result.residual_frobenius) : nlohmann::json()}};
  j["s"] = result.factors.s;
  return j;
}

}  // namespace rdecomp
