// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any hard criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rdecomp/bench.hpp"
#include "rdecomp/conservation.hpp"
#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/rlu.hpp"
#include "rdecomp/rsvd.hpp"

using namespace rdecomp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  bool soft;
  std::function<Outcome()> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double max_orthonormality_error(const DenseMatrix& q) {
  const DenseMatrix g = gemm_tn(q, q);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

Outcome table2_errors() {
  const auto t0 = std::chrono::steady_clock::now();
  bench::ExperimentConfig cfg;
  for (std::size_t n : {1024, 2048, 4096})
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      cfg.matrices.push_back(
          {bench::MatrixConfig::Kind::DftSandwich, n, n, bench::SpectrumSpec::linear_then_exp(200), seed});
  cfg.methods = {bench::Method::SparseSubGaussian};
  cfg.ranks = {200};
  cfg.params.k1 = 500;
  cfg.params.k2 = 700;
  cfg.repeats = 1;
  cfg.warmup = false;
  const auto run = bench::run_experiment(cfg);
  const double elapsed = seconds_since(t0);

  Outcome out{run.failures.empty() && elapsed < 120.0, ""};
  for (std::size_t n : {1024, 2048, 4096}) {
    std::vector<double> errs;
    for (const auto& r : run.records)
      if (r.n == n) errs.push_back(r.rel_err);
    const double med = errs.size() == 5 ? median(errs) : NAN;
    out.pass = out.pass && med >= 1.0 && med <= 3.0;
    out.detail += "n=" + std::to_string(n) + " median " + fmt("%.4f", med) + "; ";
  }
  out.detail += fmt("%.1f s", elapsed);
  if (!run.failures.empty()) out.detail += "; first failure: " + run.failures.front().message;
  return out;
}

Outcome exact_low_rank() {
  std::size_t ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DenseMatrix a = fixture::with_spectrum(500, 400, fixture::geometric(20, 1.0, 0.1), 1000 + 2 * seed);
    try {
      const auto res = randomized_svd(a, RsvdParams::defaults(500, 400, 20, seed));
      const double rel = *res.residual_frobenius / oracle::frobenius(a);
      worst = std::max(worst, rel);
      if (rel <= 1e-8) ++ok;
    } catch (const Error&) {
      worst = INFINITY;
    }
  }
  return {ok == 20, std::to_string(ok) + "/20 seeds, worst relative residual " + fmt("%.2e", worst)};
}

Outcome factor_invariants() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t monotone = 0, completed = 0;
  std::string first_error;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::size_t m = 80 + 7 * (i % 13);
    const std::size_t n = 60 + 11 * (i % 7);
    const std::size_t r = 3 + i % 12;
    bench::SpectrumSpec spec;
    switch (i % 3) {
      case 0: spec = bench::SpectrumSpec::exp_decay(1.0, std::exp(-20.0)); break;
      case 1: spec = bench::SpectrumSpec::step(r, 1.0, std::exp(-5.0), std::exp(-30.0)); break;
      default: spec = bench::SpectrumSpec::linear_then_exp(r + 2); break;
    }
    const auto synth = bench::synth_matrix(m, n, spec, 500 + i);
    try {
      const auto res = randomized_svd(synth.a, RsvdParams::defaults(m, n, r, i), {false, 100});
      ++completed;
      worst = std::max({worst, max_orthonormality_error(res.factors.u), max_orthonormality_error(res.factors.v)});
      if (std::is_sorted(res.factors.s.rbegin(), res.factors.s.rend())) ++monotone;
    } catch (const Error& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome out{completed == 100 && monotone == 100 && worst <= 1e-10 && elapsed < 60.0,
              std::to_string(completed) + "/100 runs, max |Q^T Q - I| " + fmt("%.2e", worst) + ", " +
                  std::to_string(monotone) + " nonincreasing, " + fmt("%.1f s", elapsed)};
  if (!first_error.empty()) out.detail += "; first error: " + first_error;
  return out;
}

Outcome weyl_suite() {
  std::size_t ok = 0;
  double tightest = INFINITY;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DenseMatrix a = oracle::random_dense(10, 8, 3000 + seed);
    DenseMatrix b = oracle::random_dense(10, 8, 4000 + seed);
    const double scale = std::pow(10.0, -static_cast<double>(seed % 8));
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 8; ++j) b(i, j) = a(i, j) + scale * b(i, j);
    const auto rep = weyl_check(a, b);
    // Recompute the bound with the independent oracle.
    DenseMatrix delta(10, 8);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 8; ++j) delta(i, j) = a(i, j) - b(i, j);
    const auto sa = oracle::singular_values(a);
    const auto sb = oracle::singular_values(b);
    double gap = 0.0;
    for (std::size_t k = 0; k < 8; ++k) gap = std::max(gap, std::abs(sa[k] - sb[k]));
    const double bound = oracle::spectral_norm(delta) + 1e-10 * sa.front();
    if (rep.holds && gap <= bound) ++ok;
    tightest = std::min(tightest, (bound - gap) / bound);
  }
  return {ok == 50, std::to_string(ok) + "/50 pairs, smallest relative slack " + fmt("%.3f", tightest)};
}

Outcome truncation_identity() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t m = 24 + seed % 5, n = 18 + seed % 4, q = 12;
    const std::size_t r = 1 + seed % 10;
    const DenseMatrix u = thin_qr(oracle::random_dense(m, q, 5000 + seed)).q;
    const DenseMatrix v = thin_qr(oracle::random_dense(n, q, 6000 + seed)).q;
    std::vector<double> s = fixture::geometric(q, 2.0, 0.05);
    const SvdFactors full{u, s, v};
    const SvdFactors cut = truncate_rank(full, r);
    const DenseMatrix a = gemm_nt(scale_columns(u, s), v);
    const DenseMatrix ar = gemm_nt(scale_columns(cut.u, cut.s), cut.v);
    DenseMatrix diff(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) diff(i, j) = a(i, j) - ar(i, j);
    worst = std::max(worst, std::abs(oracle::spectral_norm(diff) - s[r]));
  }
  return {worst <= 1e-12, "20 factor sets, max deviation " + fmt("%.2e", worst)};
}

Outcome randomized_lu_criterion() {
  const DenseMatrix a = fixture::with_spectrum(500, 500, fixture::step(500, 30), 7100);
  const double sigma31 = std::exp(-5.0);
  std::size_t ok = 0, structure_ok = 0;
  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    try {
      const auto res = randomized_lu(a, RluParams::defaults(500, 500, 30, seed));
      const double ratio = *res.residual_spectral / sigma31;
      ratios.push_back(ratio);
      if (ratio <= 3.0) ++ok;
      const auto d = diagnose(res.factors);
      if (d.permutations_valid && d.l_unit_lower && d.u_upper && d.max_abs_l <= 1.0 + 1e-14) ++structure_ok;
    } catch (const Error&) {
      ratios.push_back(INFINITY);
    }
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  return {ok >= 18 && structure_ok == 20,
          std::to_string(ok) + "/20 seeds with ratio <= 3 (range " + fmt("%.2f", *lo) + " to " + fmt("%.2f", *hi) +
              "), factor structure valid in " + std::to_string(structure_ok) + "/20"};
}

Outcome conservation_tails() {
  const auto t0 = std::chrono::steady_clock::now();
  ConservationConfig cfg;
  cfg.n = 2000;
  cfg.r = 20;
  cfg.k = 200;
  cfg.p = 0.1;
  cfg.trials = 500;
  cfg.seed = 2024;
  cfg.law = {BaseLaw::StandardNormal, true};
  const auto lower = min_singval_tail(cfg, 0.1);
  const auto upper = max_singval_tail(cfg, 3.0);
  const double elapsed = seconds_since(t0);
  return {lower.failure_fraction <= 0.01 && upper.failure_fraction <= 0.01 && elapsed < 120.0,
          "P(min <= 0.1 sqrt k) = " + fmt("%.4f", lower.failure_fraction) + ", P(max > 3 sqrt k) = " +
              fmt("%.4f", upper.failure_fraction) + ", " + fmt("%.1f s", elapsed)};
}

Outcome moment_and_small_ball() {
  const std::vector<double> flat(100, 0.1);
  const SubGaussianLaw law{BaseLaw::StandardNormal, true};
  const double z4 = 3.0;
  bool pass = true;
  std::string detail;
  for (double p : {0.1, 0.5}) {
    const auto mom = moment_bound_estimate(flat, law, p, 1'000'000, 77);
    const auto ball = small_ball_estimate(flat, law, p, 0.5, 1'000'000, 78);
    const bool m_ok = mom.m4 <= (z4 + 1.0) / p + 3.0 * mom.se4;
    const bool b_ok = ball.estimate <= 1.0 - 9.0 / (16.0 * z4) * p + 3.0 * ball.standard_error;
    pass = pass && m_ok && b_ok;
    detail += "p=" + fmt("%.1f", p) + ": m4 " + fmt("%.3f", mom.m4) + " vs " + fmt("%.3f", (z4 + 1.0) / p) +
              ", P(|S|<1/2) " + fmt("%.4f", ball.estimate) + " vs " + fmt("%.4f", 1.0 - 9.0 / (16.0 * z4) * p) + "; ";
  }
  return {pass, detail};
}

Outcome method_parity() {
  bench::ExperimentConfig cfg;
  cfg.matrices.push_back({bench::MatrixConfig::Kind::Dense, 600, 600, bench::SpectrumSpec::exp_decay(1.0, std::exp(-50.0)), 1});
  cfg.methods = {bench::Method::SparseSubGaussian, bench::Method::CountSketch, bench::Method::Srft};
  cfg.ranks = {20, 40, 80};
  cfg.repeats = 1;
  cfg.warmup = false;
  const auto run = bench::run_experiment(cfg);
  bool pass = run.failures.empty() && run.records.size() == 9;
  std::string detail;
  for (std::size_t r : cfg.ranks) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& rec : run.records) {
      if (rec.r != r) continue;
      lo = std::min(lo, rec.rel_err);
      hi = std::max(hi, rec.rel_err);
    }
    pass = pass && hi <= 2.0 * lo;
    detail += "r=" + std::to_string(r) + " errors in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]; ";
  }
  return {pass, detail};
}

Outcome nnz_scaling() {
  const std::size_t n = 4000, k = 100;
  const double d = 0.01;
  const auto a1 = bench::random_sparse(n, n, d, 1);
  const auto a2 = bench::random_sparse(n, n, 2 * d, 2);
  const double p = 3.0 / static_cast<double>(n);
  const double t1 = bench::time_sparse_sketch(a1, k, p, 11, 3);
  const double t2 = bench::time_sparse_sketch(a2, k, p, 11, 3);
  const double ratio = t2 / t1;
  return {ratio >= 1.4 && ratio <= 3.0, "median sketch time " + fmt("%.3f", t1) + " ms vs " + fmt("%.3f", t2) +
                                            " ms, ratio " + fmt("%.2f", ratio)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "matrix-free DFT relative errors", false, table2_errors},
      {2, "exact low-rank recovery", false, exact_low_rank},
      {3, "factor invariants", false, factor_invariants},
      {4, "singular value perturbation bound", false, weyl_suite},
      {5, "truncation identity", false, truncation_identity},
      {6, "randomized LU error and structure", false, randomized_lu_criterion},
      {7, "subspace embedding tails", false, conservation_tails},
      {8, "moment and small-ball bounds", false, moment_and_small_ball},
      {9, "sketch method error parity", false, method_parity},
      {10, "sketch time scales with nnz", true, nnz_scaling},
  };
  int hard_failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass && !c.soft) ++hard_failures;
    std::printf("criterion %2d: %s%s  %s  (%s)\n", c.id, out.pass ? "PASS" : "FAIL", c.soft && !out.pass ? " [soft]" : "",
                c.name.c_str(), out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d hard criteria failed\n", hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
