#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/linear_operator.hpp"
#include "rdecomp/matrix_io.hpp"
#include "rdecomp/norms.hpp"

using namespace rdecomp;

namespace {

bool is_upper(const DenseMatrix& u) {
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < std::min(i, u.cols()); ++j)
      if (u(i, j) != 0.0) return false;
  return true;
}

bool is_unit_lower(const DenseMatrix& l) {
  for (std::size_t i = 0; i < l.rows(); ++i)
    for (std::size_t j = i; j < l.cols(); ++j)
      if (l(i, j) != (i == j ? 1.0 : 0.0)) return false;
  return true;
}

}  // namespace

TEST_CASE("dense matrix construction rejects bad input") {
  CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), DimensionError);
  CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, std::nan("")}), InvalidArgument);
  CHECK_THROWS_AS(DenseMatrix(0, 3), DimensionError);
  const auto m = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(m(1, 2) == 6.0);
  CHECK(transpose(m) == oracle::naive_transpose(m));
}

TEST_CASE("csr construction prunes zeros and validates structure") {
  auto s = CsrMatrix::from_triplets(3, 3, {{0, 1, 2.0}, {0, 1, -2.0}, {2, 0, 1.0}, {1, 2, 0.0}, {2, 0, 1.0}});
  CHECK(s.nnz() == 1);
  CHECK(s.to_dense()(2, 0) == 2.0);
  CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 1, 1}, {5}, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(CsrMatrix(1, 3, {0, 2}, {2, 1}, {1.0, 1.0}), InvalidArgument);
  const auto r = oracle::random_csr(30, 20, 0.1, 3);
  CHECK(r.transposed().to_dense() == transpose(oracle::densify(r)));
  CHECK(CsrMatrix::from_dense(oracle::densify(r)) == r);
}

TEST_CASE("gemm") {
  const auto m = oracle::random_dense(3, 4, 1);
  CHECK(gemm(DenseMatrix::identity(3), m) == m);
  CHECK(gemm(DenseMatrix::from_rows({{1, 2}, {3, 4}}), DenseMatrix::from_rows({{0, 1}, {1, 0}})) ==
        DenseMatrix::from_rows({{2, 1}, {4, 3}}));
  const auto a = oracle::random_dense(7, 5, 2);
  const auto b = oracle::random_dense(5, 3, 3);
  CHECK(max_abs_diff(gemm(a, b), oracle::naive_gemm(a, b)) <= 1e-13);
  CHECK(max_abs_diff(gemm_tn(b, b), oracle::naive_gemm(oracle::naive_transpose(b), b)) <= 1e-13);
  CHECK(max_abs_diff(gemm_nt(a, a), oracle::naive_gemm(a, oracle::naive_transpose(a))) <= 1e-13);

  try {
    (void)gemm(a, a);
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("7x5") != std::string::npos);
  }
}

TEST_CASE("gemm is deterministic across calls and large blocks") {
  const auto a = oracle::random_dense(70, 700, 4);
  const auto b = oracle::random_dense(700, 600, 5);
  const auto c1 = gemm(a, b);
  CHECK(c1 == gemm(a, b));
  CHECK(max_abs_diff(c1, oracle::naive_gemm(a, b)) <= 1e-12);
}

TEST_CASE("spmm in all four orientations") {
  const auto id = CsrMatrix::identity(6);
  const auto m = oracle::random_dense(6, 4, 6);
  CHECK(spmm(id, m, Side::Left) == m);
  const CsrMatrix zero(5, 6);
  CHECK(max_abs(spmm(zero, m, Side::Left)) == 0.0);

  const auto s = oracle::random_csr(50, 40, 0.05, 7);
  const auto sd = oracle::densify(s);
  const auto tol = [](const DenseMatrix& ref) { return 1e-12 * std::max(1.0, max_abs(ref)); };

  const auto b = oracle::random_dense(40, 8, 8);
  auto ref = oracle::naive_gemm(sd, b);
  CHECK(max_abs_diff(spmm(s, b, Side::Left), ref) <= tol(ref));

  const auto bt = oracle::random_dense(50, 8, 9);
  ref = oracle::naive_gemm(oracle::naive_transpose(sd), bt);
  CHECK(max_abs_diff(spmm(s, bt, Side::Left, true), ref) <= tol(ref));

  const auto br = oracle::random_dense(9, 50, 10);
  ref = oracle::naive_gemm(br, sd);
  CHECK(max_abs_diff(spmm(s, br, Side::Right), ref) <= tol(ref));

  const auto brt = oracle::random_dense(9, 40, 11);
  ref = oracle::naive_gemm(brt, oracle::naive_transpose(sd));
  CHECK(max_abs_diff(spmm(s, brt, Side::Right, true), ref) <= tol(ref));

  CHECK_THROWS_AS(spmm(s, bt, Side::Left), DimensionError);
}

TEST_CASE("sparse times sparse") {
  const auto a = oracle::random_csr(30, 25, 0.1, 12);
  const auto b = oracle::random_csr(25, 35, 0.1, 13);
  const auto ref = oracle::naive_gemm(oracle::densify(a), oracle::densify(b));
  CHECK(max_abs_diff(spgemm_dense(a, b), ref) <= 1e-12);
}

TEST_CASE("thin_qr") {
  SUBCASE("identity") {
    const auto f = thin_qr(DenseMatrix::identity(4));
    CHECK(f.q == DenseMatrix::identity(4));
    CHECK(f.r == DenseMatrix::identity(4));
  }
  SUBCASE("orthonormal columns are returned with R = I") {
    const auto q0 = thin_qr(oracle::random_dense(9, 4, 14)).q;
    const auto f = thin_qr(q0);
    CHECK(max_abs_diff(f.q, q0) <= 1e-13);
    CHECK(max_abs_diff(f.r, DenseMatrix::identity(4)) <= 1e-13);
  }
  SUBCASE("random tall") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto b = oracle::random_dense(20 + seed, 6, 100 + seed);
      const auto f = thin_qr(b);
      CHECK(is_upper(f.r));
      for (std::size_t i = 0; i < 6; ++i) CHECK(f.r(i, i) >= 0.0);
      CHECK(oracle::frobenius(subtract(gemm(f.q, f.r), b)) <= 1e-12 * oracle::frobenius(b));
      CHECK(orthonormality_error(f.q) <= 1e-12 * static_cast<double>(b.rows()));
    }
  }
  SUBCASE("rank deficient input keeps Q orthonormal") {
    auto b = oracle::random_dense(10, 4, 15);
    for (std::size_t i = 0; i < 10; ++i) b(i, 2) = b(i, 0);
    const auto f = thin_qr(b);
    CHECK(std::abs(f.r(2, 2)) <= 1e-13);
    CHECK(orthonormality_error(f.q) <= 1e-12);
    CHECK(oracle::frobenius(subtract(gemm(f.q, f.r), b)) <= 1e-12 * oracle::frobenius(b));
  }
  CHECK_THROWS_AS(thin_qr(DenseMatrix(2, 3)), DimensionError);
}

TEST_CASE("dense_svd") {
  SUBCASE("diagonal") {
    const std::vector<double> d{3, 2, 1};
    CHECK(singular_values(DenseMatrix::diagonal(d, 3, 3)) == d);
    const std::vector<double> mixed{1, 3, 2};
    CHECK(singular_values(DenseMatrix::diagonal(mixed, 3, 3)) == d);
  }
  SUBCASE("zero matrix") {
    const auto f = dense_svd(DenseMatrix(4, 3));
    for (double s : f.s) CHECK(s == 0.0);
    CHECK(orthonormality_error(f.u) <= 1e-14);
    CHECK(orthonormality_error(f.v) <= 1e-14);
  }
  SUBCASE("matches the Gram eigenvalue oracle on small shapes") {
    for (std::size_t m = 1; m <= 8; ++m) {
      for (std::size_t n = 1; n <= 8; ++n) {
        const auto a = oracle::random_dense(m, n, 1000 + 10 * m + n);
        const auto s = singular_values(a);
        const auto ref = oracle::singular_values(a);
        REQUIRE(s.size() == std::min(m, n));
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(ref[i]).epsilon(1e-9));
      }
    }
  }
  SUBCASE("reconstruction and orthonormality, tall and wide") {
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{6, 5}, {40, 12}, {12, 40}, {30, 30}}) {
      const auto a = oracle::random_dense(m, n, m * n);
      const auto f = dense_svd(a);
      CHECK(std::is_sorted(f.s.rbegin(), f.s.rend()));
      const auto rec = gemm_nt(scale_columns(f.u, f.s), f.v);
      CHECK(oracle::frobenius(subtract(rec, a)) <= 1e-10 * static_cast<double>(std::max(m, n)) * oracle::frobenius(a));
      CHECK(orthonormality_error(f.u) <= 1e-12);
      CHECK(orthonormality_error(f.v) <= 1e-12);
    }
  }
  SUBCASE("rank deficient input still yields orthonormal factors") {
    auto a = oracle::random_dense(8, 2, 16);
    const auto outer = gemm_nt(a, oracle::random_dense(6, 2, 17));  // 8 x 6 of rank 2
    const auto f = dense_svd(outer);
    CHECK(f.s[2] <= 1e-14 * f.s[0]);
    CHECK(orthonormality_error(f.u) <= 1e-12);
    CHECK(orthonormality_error(f.v) <= 1e-12);
  }
}

TEST_CASE("pseudo_inverse") {
  CHECK(max_abs_diff(pseudo_inverse(DenseMatrix::identity(3)), DenseMatrix::identity(3)) <= 1e-15);
  const std::vector<double> d{2.0, 0.0};
  const std::vector<double> dinv{0.5, 0.0};
  CHECK(max_abs_diff(pseudo_inverse(DenseMatrix::diagonal(d, 2, 2)), DenseMatrix::diagonal(dinv, 2, 2)) <= 1e-15);

  const auto m = oracle::random_dense(12, 5, 18);
  const auto p = pseudo_inverse(m);
  CHECK(max_abs_diff(gemm(p, m), DenseMatrix::identity(5)) <= 1e-9);
  // Penrose identities.
  CHECK(max_abs_diff(gemm(gemm(m, p), m), m) <= 1e-9 * max_abs(m));
  CHECK(max_abs_diff(gemm(gemm(p, m), p), p) <= 1e-9 * max_abs(p));
  const auto mp = gemm(m, p);
  CHECK(max_abs_diff(mp, transpose(mp)) <= 1e-9);
  const auto pm = gemm(p, m);
  CHECK(max_abs_diff(pm, transpose(pm)) <= 1e-9);
}

TEST_CASE("lu_partial_pivot") {
  SUBCASE("identity") {
    const auto f = lu_partial_pivot(DenseMatrix::identity(3));
    CHECK(f.p == PermutationVector::identity(3));
    CHECK(f.l == DenseMatrix::identity(3));
    CHECK(f.u == DenseMatrix::identity(3));
  }
  SUBCASE("swap") {
    const auto f = lu_partial_pivot(DenseMatrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(f.p.indices() == std::vector<std::size_t>{1, 0});
    CHECK(f.l == DenseMatrix::identity(2));
    CHECK(f.u == DenseMatrix::identity(2));
  }
  SUBCASE("random tall") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = oracle::random_dense(10, 4, 200 + seed);
      const auto f = lu_partial_pivot(m);
      CHECK(PermutationVector::is_valid(f.p.indices()));
      CHECK(is_unit_lower(f.l));
      CHECK(is_upper(f.u));
      CHECK(max_abs(f.l) <= 1.0 + 1e-14);
      CHECK(oracle::frobenius(subtract(f.p.permute_rows(m), gemm(f.l, f.u))) <= 1e-11 * oracle::frobenius(m));
    }
  }
  SUBCASE("zero column") {
    auto m = oracle::random_dense(5, 3, 19);
    for (std::size_t i = 0; i < 5; ++i) m(i, 1) = 0.0;
    const auto f = lu_partial_pivot(m);
    CHECK(oracle::frobenius(subtract(f.p.permute_rows(m), gemm(f.l, f.u))) <= 1e-12 * oracle::frobenius(m));
    CHECK(max_abs(f.l) <= 1.0);
  }
}

TEST_CASE("lu_column_pivot") {
  SUBCASE("identity") {
    const auto f = lu_column_pivot(DenseMatrix::identity(3));
    CHECK(f.qc == PermutationVector::identity(3));
    CHECK(f.l == DenseMatrix::identity(3));
    CHECK(f.u == DenseMatrix::identity(3));
  }
  SUBCASE("single row") {
    const auto f = lu_column_pivot(DenseMatrix::from_rows({{0, 5, 0}}));
    CHECK(f.qc[0] == 1);
    CHECK(f.l == DenseMatrix::from_rows({{1}}));
    CHECK(f.u == DenseMatrix::from_rows({{5, 0, 0}}));
  }
  SUBCASE("random wide") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = oracle::random_dense(4, 10, 300 + seed);
      const auto f = lu_column_pivot(m);
      CHECK(PermutationVector::is_valid(f.qc.indices()));
      CHECK(is_unit_lower(f.l));
      CHECK(is_upper(f.u));
      CHECK(oracle::frobenius(subtract(f.qc.permute_cols(m), gemm(f.l, f.u))) <= 1e-11 * oracle::frobenius(m));
    }
  }
}

TEST_CASE("lu_complete_pivot") {
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{12, 5}, {5, 12}, {8, 8}}) {
    const auto a = oracle::random_dense(m, n, 400 + m);
    const auto f = lu_complete_pivot(a);
    CHECK(max_abs(f.l) <= 1.0 + 1e-14);
    CHECK(is_unit_lower(f.l));
    CHECK(is_upper(f.u));
    const auto pa = f.qc.permute_cols(f.p.permute_rows(a));
    CHECK(oracle::frobenius(subtract(pa, gemm(f.l, f.u))) <= 1e-11 * oracle::frobenius(a));
  }
  const auto rank1 = gemm_nt(oracle::random_dense(6, 1, 20), oracle::random_dense(5, 1, 21));
  const auto f = lu_complete_pivot(rank1);
  CHECK(oracle::frobenius(subtract(f.qc.permute_cols(f.p.permute_rows(rank1)), gemm(f.l, f.u))) <=
        1e-12 * oracle::frobenius(rank1));
}

TEST_CASE("spectral_norm_estimate") {
  CHECK(spectral_norm_estimate(LinearOperator::zero(5, 4), 20, 1) == 0.0);
  const std::vector<double> d{5, 1, 1};
  CHECK(spectral_norm_estimate(LinearOperator::from_dense(DenseMatrix::diagonal(d, 3, 3)), 50, 2) ==
        doctest::Approx(5.0).epsilon(0.01));
  const auto a = oracle::random_dense(30, 20, 22);
  const double ref = oracle::spectral_norm(a);
  const auto op = LinearOperator::from_dense(a);
  CHECK(spectral_norm_estimate(op, 100, 3) == doctest::Approx(ref).epsilon(0.01));
  double prev = 0.0;
  for (int it = 20; it <= 60; it += 5) {
    const double est = spectral_norm_estimate(op, it, 4);
    CHECK(est >= prev);
    CHECK(est <= ref * (1 + 1e-12));
    prev = est;
  }
  CHECK_THROWS_AS(spectral_norm_estimate(op, 19, 0), InvalidArgument);
}

TEST_CASE("frobenius_norm") {
  CHECK(frobenius_norm(DenseMatrix(3, 3)) == 0.0);
  CHECK(frobenius_norm(DenseMatrix::from_rows({{3, 4}})) == 5.0);
  const auto m = oracle::random_dense(9, 9, 23);
  const auto g = oracle::naive_gemm(oracle::naive_transpose(m), m);
  double trace = 0.0;
  for (std::size_t i = 0; i < 9; ++i) trace += g(i, i);
  CHECK(frobenius_norm(m) == doctest::Approx(std::sqrt(trace)).epsilon(1e-12));
  const auto s = oracle::random_csr(20, 30, 0.2, 24);
  CHECK(frobenius_norm(s) == doctest::Approx(oracle::frobenius(oracle::densify(s))).epsilon(1e-12));
}

TEST_CASE("linear operators are adjoint consistent") {
  const auto a = oracle::random_dense(13, 9, 25);
  const auto s = oracle::random_csr(13, 9, 0.3, 26);
  std::mt19937_64 gen(27);
  std::normal_distribution<double> normal;
  for (const auto& op : {LinearOperator::from_dense(a), LinearOperator::from_csr(s)}) {
    for (int probe = 0; probe < 100; ++probe) {
      DenseMatrix x(9, 1), y(13, 1);
      for (double& v : x.data()) v = normal(gen);
      for (double& v : y.data()) v = normal(gen);
      const double lhs = dot(op.apply(x).data(), y.data());
      const double rhs = dot(x.data(), op.apply_adjoint(y).data());
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
  const auto op = LinearOperator::from_dense(a);
  CHECK_THROWS_AS(op.apply(DenseMatrix(8, 1)), DimensionError);
  CHECK(op.materialize() == a);
  CHECK(op.adjoint().materialize() == transpose(a));
}

TEST_CASE("permutations") {
  const PermutationVector p({2, 0, 1});
  CHECK(p.compose(p.inverse()) == PermutationVector::identity(3));
  const auto m = DenseMatrix::from_rows({{0, 0}, {1, 1}, {2, 2}});
  CHECK(p.permute_rows(m)(0, 0) == 2.0);
  const PermutationVector q({1, 2, 0});
  // (p * q) M = p (q M)
  CHECK(p.compose(q).permute_rows(m) == p.permute_rows(q.permute_rows(m)));
  CHECK_FALSE(PermutationVector::is_valid({0, 0, 1}));
  CHECK_THROWS_AS(PermutationVector({1, 1}), InvalidArgument);
}

TEST_CASE("matrix file round trips") {
  const auto dir = std::filesystem::temp_directory_path() / "rdecomp_io_test";
  std::filesystem::create_directories(dir);
  const auto s = oracle::random_csr(7, 5, 0.3, 28);
  io::write_matrix_market(dir / "a.mtx", s);
  CHECK(io::read_matrix_market(dir / "a.mtx") == s);
  const auto d = oracle::random_dense(4, 6, 29);
  io::write_dense_text(dir / "a.txt", d);
  CHECK(io::read_dense_text(dir / "a.txt") == d);
  io::write_dense_binary(dir / "a.bin", d);
  CHECK(io::read_dense_binary(dir / "a.bin") == d);
  CHECK(std::filesystem::file_size(dir / "a.bin") == 16 + 8 * 24);
  try {
    (void)io::read_dense_text(dir / "missing.txt");
    FAIL("expected an I/O error");
  } catch (const IoError& e) {
    CHECK(e.path.find("missing.txt") != std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("dense_svd completes the left basis when many singular values vanish") {
  std::vector<double> sigma(200);
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma[i] = std::exp(-50.0 * static_cast<double>(i) / 199.0);
  const DenseMatrix a = fixture::with_spectrum(200, 200, sigma, 17);
  const SvdResult svd = dense_svd(a);
  const DenseMatrix gram = oracle::naive_gemm(oracle::naive_transpose(svd.u), svd.u);
  CHECK(oracle::max_abs_diff(gram, DenseMatrix::identity(200)) < 1e-10);
}
