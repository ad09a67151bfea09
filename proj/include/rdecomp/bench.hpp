#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rdecomp/csr_matrix.hpp"
#include "rdecomp/dense_matrix.hpp"
#include "rdecomp/linear_operator.hpp"

namespace rdecomp::bench {

/// Prescribed singular values.
///
/// Text forms (numbers may be written e^x):
///   exp-decay:FROM:TO                       geometric from FROM to TO
///   step:R:VALUE:TAIL_FROM:TAIL_TO          R copies of VALUE, then geometric
///   linear-then-exp:B[:VALUE]               linear from 1 to VALUE (default 0.1)
///                                           at index B, then a geometric tail
struct SpectrumSpec {
  enum class Kind { ExpDecay, Step, LinearThenExp };
  Kind kind = Kind::ExpDecay;

  double from = 1.0;  // exp-decay
  double to = 1.0;

  std::size_t plateau_rank = 0;  // step
  double plateau_value = 1.0;
  double tail_from = 1.0;
  double tail_to = 1.0;

  std::size_t breakpoint = 0;    // linear-then-exp
  double breakpoint_value = 0.1;
  /// The tail decays at the fixed rate that takes breakpoint_value to
  /// `floor` at index reference_length, and is rescaled so that its sum
  /// equals the reference tail sum for every length.
  double floor = 1.9287498479639178e-22;  // e^-50
  std::size_t reference_length = 1024;

  static SpectrumSpec exp_decay(double from, double to);
  static SpectrumSpec step(std::size_t plateau_rank, double plateau_value, double tail_from, double tail_to);
  static SpectrumSpec linear_then_exp(std::size_t breakpoint, double breakpoint_value = 0.1);

  static SpectrumSpec parse(std::string_view text);
  static SpectrumSpec from_json(const nlohmann::json& j);

  /// Nonincreasing positive values, σ_1 first.
  std::vector<double> values(std::size_t length) const;
};

std::string to_string(const SpectrumSpec& spec);
nlohmann::json to_json(const SpectrumSpec& spec);

struct SynthMatrix {
  DenseMatrix a;
  std::vector<double> sigma;
};

/// A = U diag(sigma) V^T with U, V the Q factors of seeded Gaussian matrices.
SynthMatrix synth_matrix(std::size_t m, std::size_t n, const SpectrumSpec& spectrum, std::uint64_t seed);

/// x -> F Sigma F x where F is the orthonormal real Fourier transform of
/// length n (packed real/imaginary parts), so that the singular values are
/// exactly the spectrum values. Applied with FFTs. n must be a power of two.
LinearOperator dft_sandwich_operator(std::size_t n, const SpectrumSpec& spectrum);

enum class Method { SparseSubGaussian, CountSketch, Srft, Gaussian, FullSvd };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// One decomposition of one matrix at one rank.
struct ExperimentRecord {
  std::string method;
  std::size_t m = 0;
  std::size_t n = 0;
  std::string spectrum;
  std::uint64_t seed = 0;
  std::size_t r = 0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t l = 0;
  double p = 0.0;  // density of the first sketch
  double t_sketch_ms = 0.0;
  double t_qr_ms = 0.0;
  double t_second_sketch_ms = 0.0;
  double t_small_svd_ms = 0.0;
  double t_total_ms = 0.0;
  double err_spectral = 0.0;
  std::optional<double> err_frobenius;  // absent for matrix-free inputs
  double rel_err = 0.0;                 // err_spectral / sigma_{r+1}
  double sigma_r_plus_1 = 0.0;
  double delta_r_plus_1 = 0.0;          // (sum_{l > r} sigma_l^2)^{1/2}

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// CSV columns in output order.
const std::vector<std::string>& record_columns();

struct MatrixConfig {
  enum class Kind { Dense, DftSandwich };
  Kind kind = Kind::Dense;
  std::size_t m = 0;
  std::size_t n = 0;
  SpectrumSpec spectrum;
  std::uint64_t seed = 0;
};

struct ParamOverrides {
  std::optional<std::size_t> k1, k2, l;
  std::optional<double> p1, p2;
};

/// Parsed form of
///   {matrices: [{m, n, spectrum, seed, kind}], methods: [...], ranks: [...],
///    repeats, warmup, output, params: {k1, k2, l, p1, p2}, residual_iters}.
struct ExperimentConfig {
  std::vector<MatrixConfig> matrices;
  std::vector<Method> methods;
  std::vector<std::size_t> ranks;
  std::size_t repeats = 5;
  bool warmup = true;
  std::string output = "bench-out";
  ParamOverrides params;
  int residual_iters = 100;
  // Runs cells on worker threads. Numeric outputs are unchanged since every
  // cell derives its randomness from its own seed; timings are not comparable.
  bool parallel = false;
  std::size_t threads = 0;  // 0 = hardware concurrency
  nlohmann::json source;  // the config as given

  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct CellFailure {
  std::string method;
  std::size_t m = 0;
  std::size_t n = 0;
  std::string spectrum;
  std::uint64_t seed = 0;
  std::size_t r = 0;
  std::string message;
};

struct ExperimentRun {
  std::vector<ExperimentRecord> records;
  std::vector<CellFailure> failures;
};

/// Runs every (matrix, method, rank) cell. Numeric results are those of the
/// first timed repetition; times are medians over `repeats`. A failing cell
/// is recorded and the run continues.
ExperimentRun run_experiment(const ExperimentConfig& config);
ExperimentRun run_experiment(const nlohmann::json& config);

std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_csv(std::string_view text);
nlohmann::json to_json(const ExperimentRecord& record);
ExperimentRecord record_from_json(const nlohmann::json& j);

/// Build identifier baked in at configure time.
std::string_view build_stamp();

/// Writes <dir>/records.csv and <dir>/report.json (config echo, RNG
/// identifier, build stamp, records, failures). Throws IoError naming the
/// file on failure and InvalidArgument for an empty record list.
void emit_report(const ExperimentRun& run, const nlohmann::json& config_echo, const std::filesystem::path& dir);

/// Median wall time of A * Omega^T for a sparse A and a k x n sparse
/// sub-Gaussian Omega of density p, after one warm-up run.
double time_sparse_sketch(const CsrMatrix& a, std::size_t k, double p, std::size_t repeats, std::uint64_t seed);

/// Random sparse matrix with i.i.d. Bernoulli(density) positions and
/// standard normal values.
CsrMatrix random_sparse(std::size_t m, std::size_t n, double density, std::uint64_t seed);

}  // namespace rdecomp::bench
