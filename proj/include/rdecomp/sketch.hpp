#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rdecomp/csr_matrix.hpp"
#include "rdecomp/dense_matrix.hpp"
#include "rdecomp/linear_operator.hpp"
#include "rdecomp/matrix_ref.hpp"

namespace rdecomp {

enum class SketchKind { SparseSubGaussian, DenseGaussian, CountSketch, Srft };

std::string_view to_string(SketchKind kind);
SketchKind parse_sketch_kind(std::string_view name);

enum class BaseLaw { StandardNormal, Rademacher };

std::string_view to_string(BaseLaw law);
BaseLaw parse_base_law(std::string_view name);

/// Entry law of a sparse sub-Gaussian sketch: zero with probability 1 - p,
/// otherwise a draw of Z, multiplied by 1/sqrt(p) when `scaled` (which
/// makes E X^2 = 1).
struct SubGaussianLaw {
  BaseLaw base = BaseLaw::StandardNormal;
  bool scaled = false;

  /// E Z^3
  double third_moment() const noexcept { return 0.0; }
  /// E Z^4
  double fourth_moment() const noexcept { return base == BaseLaw::StandardNormal ? 3.0 : 1.0; }
  /// E Z^4 + 1
  double z4() const noexcept { return fourth_moment() + 1.0; }

  friend bool operator==(const SubGaussianLaw&, const SubGaussianLaw&) = default;
};

struct SketchSpec {
  SketchKind kind = SketchKind::SparseSubGaussian;
  std::size_t rows = 0;  // k
  std::size_t cols = 0;  // n
  double p = 1.0;        // density, sparse-subgaussian only
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on empty dimensions or p outside (0, 1].
  void validate() const;
  /// Non-fatal findings, e.g. rows > cols for an embedding.
  std::vector<std::string> warnings() const;
};

nlohmann::json to_json(const SketchSpec& spec, const SubGaussianLaw& law);

/// k x n matrix with i.i.d. entries of the given law, generated row by row
/// from streams derived from (seed, row). Nonzero positions are found by
/// geometric skipping, so the cost is proportional to the number of
/// nonzeros.
CsrMatrix sample_sparse_subgaussian(const SketchSpec& spec, const SubGaussianLaw& law);

DenseMatrix sample_dense_gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// k x n sketch with exactly one +-1 per column in a uniformly random row.
CsrMatrix sample_countsketch(std::size_t k, std::size_t n, std::uint64_t seed);

/// k x n operator x -> sqrt(n/k) * R * F * D * x with D a random sign
/// diagonal, F the orthonormal real Fourier transform and R a uniform
/// choice of k of its n packed real/imaginary coordinates (sorted).
LinearOperator sample_srft_apply(std::size_t n, std::size_t k, std::uint64_t seed);

/// An owned sketch matrix of any kind.
class Sketch {
 public:
  explicit Sketch(CsrMatrix s) : storage_(std::move(s)) {}
  explicit Sketch(DenseMatrix s) : storage_(std::move(s)) {}
  explicit Sketch(LinearOperator s) : storage_(std::move(s)) {}

  MatrixRef ref() const;
  std::size_t rows() const { return ref().rows(); }
  std::size_t cols() const { return ref().cols(); }

 private:
  std::variant<CsrMatrix, DenseMatrix, LinearOperator> storage_;
};

/// Draws the sketch described by `spec`.
Sketch make_sketch(const SketchSpec& spec, const SubGaussianLaw& law = {});

enum class SketchMode {
  Left,            // S * A
  RightTranspose,  // A * S^T
};

/// Applies a sketch to A. When both operands are sparse the work is
/// proportional to the scalar products formed, i.e. nnz(A) * p * k.
DenseMatrix sketch_matrix(MatrixRef s, MatrixRef a, SketchMode mode);

}  // namespace rdecomp
