#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/rsvd.hpp"

using namespace rdecomp;

namespace {

RsvdParams explicit_params(std::size_t r, std::size_t l, std::size_t k1, std::size_t k2, double p, std::uint64_t seed) {
  RsvdParams params;
  params.rank = r;
  params.l = l;
  params.k1 = k1;
  params.k2 = k2;
  params.p1 = p;
  params.p2 = p;
  params.seed = seed;
  return params;
}

}  // namespace

TEST_CASE("default parameters") {
  const auto p = RsvdParams::defaults(3000, 2000, 200, 9);
  CHECK(p.k1 == 500);
  CHECK(p.k2 == 700);
  CHECK(p.l == 258);
  CHECK(p.p1 == doctest::Approx(3.0 / 2000));
  CHECK(p.p2 == doctest::Approx(3.0 / 3000));
  CHECK(p.seed == 9);
  CHECK_NOTHROW(p.validate(3000, 2000));

  const auto small = RsvdParams::defaults(30, 20, 10, 0);
  CHECK(small.k1 == 20);
  CHECK(small.k2 == 20);
  CHECK(small.l == 20);
  CHECK_NOTHROW(small.validate(30, 20));
}

TEST_CASE("parameter validation") {
  auto p = explicit_params(3, 6, 12, 18, 0.5, 0);
  CHECK_NOTHROW(p.validate(50, 40));
  CHECK_THROWS_AS(p.validate(50, 10), InvalidArgument);
  p.l = 2;
  CHECK_THROWS_AS(p.validate(50, 40), InvalidArgument);
  p = explicit_params(3, 13, 12, 18, 0.5, 0);
  CHECK_THROWS_AS(p.validate(50, 40), InvalidArgument);
  p = explicit_params(3, 6, 12, 5, 0.5, 0);
  CHECK_THROWS_AS(p.validate(50, 40), InvalidArgument);
  p = explicit_params(3, 6, 12, 18, 0.0, 0);
  CHECK_THROWS_AS(p.validate(50, 40), InvalidArgument);
  p = explicit_params(0, 6, 12, 18, 0.5, 0);
  CHECK_THROWS_AS(p.validate(50, 40), InvalidArgument);
}

TEST_CASE("captures a diagonal matrix with a five dimensional range") {
  const std::vector<double> d{5, 4, 3, 2, 1};
  const auto a = DenseMatrix::diagonal(d, 50, 40);
  // A density high enough that every column of the dominant block is hit.
  const auto result = randomized_svd(a, explicit_params(3, 6, 12, 18, 1.0, 1));
  REQUIRE(result.factors.s.size() == 3);
  CHECK(result.factors.s[0] == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(result.factors.s[1] == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(result.factors.s[2] == doctest::Approx(3.0).epsilon(1e-8));
  REQUIRE(result.residual_spectral);
  CHECK(std::abs(*result.residual_spectral - 2.0) <= 1e-8);
  REQUIRE(result.residual_frobenius);
  CHECK(*result.residual_frobenius == doctest::Approx(std::sqrt(5.0)).epsilon(1e-8));
}

TEST_CASE("exact low-rank recovery with default parameters") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = gemm_nt(oracle::random_dense(120, 3, seed), oracle::random_dense(90, 3, seed + 50));
    const auto result = randomized_svd(a, RsvdParams::defaults(120, 90, 3, seed));
    CHECK(*result.residual_frobenius / oracle::frobenius(a) <= 1e-8);
    const auto ref = oracle::singular_values(a);
    for (std::size_t i = 0; i < 3; ++i) CHECK(result.factors.s[i] == doctest::Approx(ref[i]).epsilon(1e-8));
  }
}

TEST_CASE("factor invariants, determinism and the Eckart-Young floor") {
  const auto sigma = fixture::geometric(60, 1.0, 1e-6);
  const auto a = fixture::with_spectrum(80, 60, sigma, 3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::size_t r : {1u, 5u, 10u}) {
      const auto params = RsvdParams::defaults(80, 60, r, seed);
      const auto result = randomized_svd(a, params);
      const auto& f = result.factors;
      CHECK(orthonormality_error(f.u) <= 1e-10);
      CHECK(orthonormality_error(f.v) <= 1e-10);
      CHECK(std::is_sorted(f.s.rbegin(), f.s.rend()));
      CHECK(f.s.back() >= 0.0);
      CHECK(*result.residual_spectral / sigma[r] >= 1.0 - 1e-6);
      const auto again = randomized_svd(a, params);
      CHECK(again.factors.u == f.u);
      CHECK(again.factors.s == f.s);
      CHECK(again.factors.v == f.v);
    }
  }
}

TEST_CASE("sparse and matrix-free inputs agree with the dense path") {
  const auto a_sparse = oracle::random_csr(90, 70, 0.1, 4);
  const auto a_dense = a_sparse.to_dense();
  const auto a_op = LinearOperator::from_csr(a_sparse);
  const auto params = RsvdParams::defaults(90, 70, 8, 5);
  const auto dense = randomized_svd(a_dense, params);
  const auto sparse = randomized_svd(a_sparse, params);
  const auto op = randomized_svd(a_op, params);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(sparse.factors.s[i] == doctest::Approx(dense.factors.s[i]).epsilon(1e-10));
    // The operator path applies the composite sketch in one product.
    CHECK(op.factors.s[i] == doctest::Approx(dense.factors.s[i]).epsilon(1e-10));
  }
  CHECK(*op.residual_spectral == doctest::Approx(*dense.residual_spectral).epsilon(1e-8));
  CHECK_FALSE(op.residual_frobenius.has_value());
  CHECK(*sparse.residual_frobenius == doctest::Approx(*dense.residual_frobenius).epsilon(1e-10));
}

TEST_CASE("every sketch family yields a near-optimal approximation") {
  const auto sigma = fixture::geometric(100, 1.0, 1e-8);
  const auto a = fixture::with_spectrum(100, 100, sigma, 6);
  for (auto kind : {SketchKind::SparseSubGaussian, SketchKind::DenseGaussian, SketchKind::CountSketch, SketchKind::Srft}) {
    auto params = RsvdParams::defaults(100, 100, 10, 7);
    params.sketch = kind;
    const auto result = randomized_svd(a, params);
    const double rel = *result.residual_spectral / sigma[10];
    CHECK(rel >= 1.0 - 1e-6);
    CHECK(rel <= 10.0);
  }
}

TEST_CASE("residual shrinks as more of the same core is kept") {
  const auto sigma = fixture::geometric(60, 1.0, 1e-4);
  const auto a = fixture::with_spectrum(70, 60, sigma, 8);
  double prev = 1e300;
  for (std::size_t r = 2; r <= 12; r += 2) {
    const auto result = randomized_svd(a, explicit_params(r, 16, 24, 30, 0.2, 9));
    CHECK(*result.residual_frobenius <= prev * (1 + 1e-12));
    prev = *result.residual_frobenius;
  }
}

TEST_CASE("rank deficiency of the second sketch is reported") {
  const auto a = oracle::random_dense(400, 300, 10);
  auto params = explicit_params(2, 4, 6, 6, 1e-7, 11);
  try {
    (void)randomized_svd(a, params);
    FAIL("expected a rank deficiency error");
  } catch (const RankDeficiencyError& e) {
    CHECK(e.required_rank == 4);
    CHECK(e.numerical_rank < 4);
  }
}

TEST_CASE("truncate_rank") {
  const auto u = thin_qr(oracle::random_dense(9, 3, 12)).q;
  const auto v = thin_qr(oracle::random_dense(7, 3, 13)).q;
  const std::vector<double> s{3, 2, 1};
  const auto same = truncate_rank(u, s, v, 3);
  CHECK(same.u == u);
  CHECK(same.s == s);
  CHECK(same.v == v);

  const auto cut = truncate_rank(u, s, v, 2);
  CHECK(cut.s == std::vector<double>{3, 2});
  const auto full = gemm_nt(scale_columns(u, s), v);
  const auto kept = gemm_nt(scale_columns(cut.u, cut.s), cut.v);
  CHECK(oracle::spectral_norm(subtract(full, kept)) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(truncate_rank(u, s, v, 0), InvalidArgument);
  CHECK_THROWS_AS(truncate_rank(u, s, v, 4), InvalidArgument);
}

TEST_CASE("Weyl check") {
  const auto a = oracle::random_dense(10, 8, 14);
  const auto same = weyl_check(a, a);
  CHECK(same.max_gap == 0.0);
  CHECK(same.holds);

  const double eps = 0.3;
  auto x = oracle::random_dense(10, 1, 15);
  auto y = oracle::random_dense(8, 1, 16);
  x = scale(x, 1.0 / norm2(x.data()));
  y = scale(y, 1.0 / norm2(y.data()));
  const auto b = add(a, scale(gemm_nt(x, y), eps));
  const auto report = weyl_check(a, b);
  CHECK(report.perturbation_norm == doctest::Approx(eps).epsilon(1e-12));
  for (double g : report.gaps) CHECK(g <= eps + 1e-12);
  CHECK(report.holds);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto base = oracle::random_dense(10, 8, 100 + seed);
    const auto pert = scale(oracle::random_dense(10, 8, 300 + seed), 0.01 * static_cast<double>(seed % 10 + 1));
    CHECK(weyl_check(base, add(base, pert)).holds);
  }
  CHECK_THROWS_AS(weyl_check(a, oracle::random_dense(8, 10, 1)), DimensionError);
}

TEST_CASE("result JSON") {
  const auto a = oracle::random_dense(30, 20, 17);
  const auto params = RsvdParams::defaults(30, 20, 4, 18);
  const auto j = to_json(randomized_svd(a, params), params);
  for (const char* key : {"params", "timings_ms", "residual", "s"}) CHECK(j.contains(key));
  for (const char* key : {"sketch", "qr", "second_sketch", "small_svd", "total"}) CHECK(j["timings_ms"].contains(key));
  CHECK(j["params"]["k1"] == params.k1);
  CHECK(j["s"].size() == 4);
}
