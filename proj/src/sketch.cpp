#include "rdecomp/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "rdecomp/errors.hpp"
#include "rdecomp/fourier.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/rng.hpp"

namespace rdecomp {

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::SparseSubGaussian: return "sparse-subgaussian";
    case SketchKind::DenseGaussian: return "gaussian";
    case SketchKind::CountSketch: return "countsketch";
    case SketchKind::Srft: return "srft";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  if (name == "sparse-subgaussian" || name == "sparse") return SketchKind::SparseSubGaussian;
  if (name == "gaussian" || name == "dense-gaussian") return SketchKind::DenseGaussian;
  if (name == "countsketch") return SketchKind::CountSketch;
  if (name == "srft") return SketchKind::Srft;
  throw InvalidArgument("unknown sketch kind '" + std::string(name) + "'");
}

std::string_view to_string(BaseLaw law) {
  return law == BaseLaw::StandardNormal ? "standard-normal" : "rademacher";
}

BaseLaw parse_base_law(std::string_view name) {
  if (name == "standard-normal" || name == "normal") return BaseLaw::StandardNormal;
  if (name == "rademacher") return BaseLaw::Rademacher;
  throw InvalidArgument("unknown base law '" + std::string(name) + "'");
}

void SketchSpec::validate() const {
  if (rows == 0 || cols == 0) throw InvalidArgument("sketch dimensions must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("sketch density p must lie in (0, 1], got " + std::to_string(p));
}

std::vector<std::string> SketchSpec::warnings() const {
  std::vector<std::string> out;
  if (rows > cols) {
    out.push_back("sketch has more rows (" + std::to_string(rows) + ") than columns (" + std::to_string(cols) +
                  "); it does not reduce dimension");
  }
  return out;
}

nlohmann::json to_json(const SketchSpec& spec, const SubGaussianLaw& law) {
  return {{"kind", to_string(spec.kind)}, {"rows", spec.rows},   {"cols", spec.cols},
          {"p", spec.p},                   {"seed", spec.seed},   {"law", to_string(law.base)},
          {"scaled", law.scaled}};
}

CsrMatrix sample_sparse_subgaussian(const SketchSpec& spec, const SubGaussianLaw& law) {
  spec.validate();
  const std::size_t k = spec.rows;
  const std::size_t n = spec.cols;
  const double factor = law.scaled ? 1.0 / std::sqrt(spec.p) : 1.0;
  const bool dense = spec.p >= 1.0;
  const double log1m_p = dense ? 0.0 : std::log1p(-spec.p);

  std::vector<std::size_t> offsets(k + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(static_cast<std::size_t>(spec.p * static_cast<double>(k) * static_cast<double>(n) * 1.1) + 16);
  vals.reserve(cols.capacity());

  for (std::size_t i = 0; i < k; ++i) {
    RandomStream rng(spec.seed, stream::kSparse, i);
    auto draw = [&] {
      const double z = law.base == BaseLaw::StandardNormal ? rng.normal() : rng.sign();
      return z * factor;
    };
    if (dense) {
      for (std::size_t j = 0; j < n; ++j) {
        cols.push_back(j);
        vals.push_back(draw());
      }
    } else {
      std::uint64_t j = rng.geometric_gap(log1m_p);
      while (j < n) {
        cols.push_back(j);
        vals.push_back(draw());
        const std::uint64_t gap = rng.geometric_gap(log1m_p);
        if (gap >= n) break;
        j += gap + 1;
      }
    }
    offsets[i + 1] = vals.size();
  }
  return CsrMatrix(k, n, std::move(offsets), std::move(cols), std::move(vals));
}

DenseMatrix sample_dense_gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  DenseMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    RandomStream rng(seed, stream::kGaussian, i);
    for (double& x : out.row(i)) x = rng.normal();
  }
  return out;
}

CsrMatrix sample_countsketch(std::size_t k, std::size_t n, std::uint64_t seed) {
  if (k == 0 || n == 0) throw InvalidArgument("countsketch dimensions must be positive");
  if (k > n) throw InvalidArgument("countsketch requires k <= n");
  RandomStream rng(seed, stream::kCountSketch, 0);
  std::vector<Triplet> triplets;
  triplets.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t row = rng.below(k);
    triplets.push_back({row, j, rng.sign()});
  }
  return CsrMatrix::from_triplets(k, n, std::move(triplets));
}

LinearOperator sample_srft_apply(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k == 0 || n == 0) throw InvalidArgument("SRFT dimensions must be positive");
  if (k > n) throw InvalidArgument("SRFT requires k <= n");
  RandomStream rng(seed, stream::kSrft, 0);
  auto signs = std::make_shared<std::vector<double>>(n);
  for (double& s : *signs) s = rng.sign();
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
  auto rows = std::make_shared<std::vector<std::size_t>>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(rows->begin(), rows->end());
  auto fourier = std::make_shared<const RealFourier>(n);
  const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(k));

  auto apply = [=](const DenseMatrix& x) {
    DenseMatrix out(k, x.cols());
    std::vector<double> col(n), freq(n);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      for (std::size_t i = 0; i < n; ++i) col[i] = (*signs)[i] * x(i, c);
      fourier->forward(col, freq);
      for (std::size_t i = 0; i < k; ++i) out(i, c) = scale * freq[(*rows)[i]];
    }
    return out;
  };
  auto adjoint = [=](const DenseMatrix& y) {
    DenseMatrix out(n, y.cols());
    std::vector<double> freq(n), col(n);
    for (std::size_t c = 0; c < y.cols(); ++c) {
      std::fill(freq.begin(), freq.end(), 0.0);
      for (std::size_t i = 0; i < k; ++i) freq[(*rows)[i]] = scale * y(i, c);
      fourier->inverse(freq, col);
      for (std::size_t i = 0; i < n; ++i) out(i, c) = (*signs)[i] * col[i];
    }
    return out;
  };
  return LinearOperator(k, n, apply, adjoint);
}

MatrixRef Sketch::ref() const {
  return std::visit([](const auto& s) { return MatrixRef(s); }, storage_);
}

Sketch make_sketch(const SketchSpec& spec, const SubGaussianLaw& law) {
  spec.validate();
  switch (spec.kind) {
    case SketchKind::SparseSubGaussian: return Sketch(sample_sparse_subgaussian(spec, law));
    case SketchKind::DenseGaussian: return Sketch(sample_dense_gaussian(spec.rows, spec.cols, spec.seed));
    case SketchKind::CountSketch: return Sketch(sample_countsketch(spec.rows, spec.cols, spec.seed));
    case SketchKind::Srft: return Sketch(sample_srft_apply(spec.cols, spec.rows, spec.seed));
  }
  throw InvalidArgument("unknown sketch kind");
}

namespace {

// S * A
DenseMatrix sketch_left(MatrixRef s, MatrixRef a) {
  if (auto sc = s.csr()) {
    if (auto ad = a.dense()) return spmm(*sc, *ad, Side::Left);
    if (auto as = a.csr()) return spgemm_dense(*sc, *as);
    return transpose(a.op()->apply_adjoint(sc->transposed().to_dense()));
  }
  if (auto sd = s.dense()) {
    if (auto ad = a.dense()) return gemm(*sd, *ad);
    if (auto as = a.csr()) return spmm(*as, *sd, Side::Right);
    return transpose(a.op()->apply_adjoint(transpose(*sd)));
  }
  const LinearOperator& so = *s.op();
  if (auto ad = a.dense()) return so.apply(*ad);
  if (auto as = a.csr()) return so.apply(as->to_dense());
  const DenseMatrix st = so.apply_adjoint(DenseMatrix::identity(so.rows()));
  return transpose(a.op()->apply_adjoint(st));
}

// A * S^T
DenseMatrix sketch_right(MatrixRef s, MatrixRef a) {
  if (auto sc = s.csr()) {
    if (auto ad = a.dense()) return spmm(*sc, *ad, Side::Right, true);
    if (auto as = a.csr()) return spgemm_dense(*as, sc->transposed());
    return a.op()->apply(sc->transposed().to_dense());
  }
  if (auto sd = s.dense()) {
    if (auto ad = a.dense()) return gemm_nt(*ad, *sd);
    if (auto as = a.csr()) return spmm(*as, transpose(*sd), Side::Left);
    return a.op()->apply(transpose(*sd));
  }
  const LinearOperator& so = *s.op();
  if (auto ad = a.dense()) return transpose(so.apply(transpose(*ad)));
  if (auto as = a.csr()) return transpose(so.apply(transpose(as->to_dense())));
  return a.op()->apply(so.apply_adjoint(DenseMatrix::identity(so.rows())));
}

}  // namespace

DenseMatrix sketch_matrix(MatrixRef s, MatrixRef a, SketchMode mode) {
  if (mode == SketchMode::Left) {
    if (s.cols() != a.rows()) {
      throw DimensionError("sketch " + shape_string(s.rows(), s.cols()) + " cannot left-multiply " +
                           shape_string(a.rows(), a.cols()));
    }
    return sketch_left(s, a);
  }
  if (s.cols() != a.cols()) {
    throw DimensionError("matrix " + shape_string(a.rows(), a.cols()) + " cannot be multiplied by the transpose of sketch " +
                         shape_string(s.rows(), s.cols()));
  }
  return sketch_right(s, a);
}

}  // namespace rdecomp
