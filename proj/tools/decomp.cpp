// Command-line front end: decomp svd|lu|verify|bench.
#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <variant>

#include "rdecomp/bench.hpp"
#include "rdecomp/conservation.hpp"
#include "rdecomp/errors.hpp"
#include "rdecomp/matrix_io.hpp"
#include "rdecomp/rlu.hpp"
#include "rdecomp/rsvd.hpp"

namespace fs = std::filesystem;
using namespace rdecomp;

namespace {

struct Shared {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

struct InputOptions {
  std::string input;
  std::string synth;
  std::size_t m = 500;
  std::size_t n = 500;
};

// Holds whichever representation the input arrived in.
struct LoadedInput {
  std::variant<DenseMatrix, CsrMatrix> matrix;
  std::optional<std::vector<double>> sigma;  // known only for synthetic input
  std::string descriptor;

  MatrixRef ref() const {
    return std::visit([](const auto& a) { return MatrixRef(a); }, matrix);
  }
};

LoadedInput load_input(const InputOptions& opt, std::uint64_t seed) {
  LoadedInput in;
  if (!opt.synth.empty()) {
    const auto spec = bench::SpectrumSpec::parse(opt.synth);
    auto s = bench::synth_matrix(opt.m, opt.n, spec, seed);
    in.matrix = std::move(s.a);
    in.sigma = std::move(s.sigma);
    in.descriptor = bench::to_string(spec);
    return in;
  }
  const fs::path path(opt.input);
  const auto ext = path.extension().string();
  if (ext == ".mtx") {
    in.matrix = io::read_matrix_market(path);
  } else if (ext == ".bin") {
    in.matrix = io::read_dense_binary(path);
  } else {
    in.matrix = io::read_dense_text(path);
  }
  in.descriptor = path.filename().string();
  return in;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory (" + ec.message() + ")", dir);
}

// Writes to <out>/<name> when --out is given, otherwise to stdout.
void emit(const Shared& shared, const std::string& name, const std::string& text) {
  if (shared.out.empty()) {
    std::cout << text;
    return;
  }
  ensure_dir(shared.out);
  const fs::path path = fs::path(shared.out) / name;
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw IoError("write failed", path.string());
  std::cerr << "wrote " << path.string() << '\n';
}

void write_dense(const Shared& shared, const std::string& name, const DenseMatrix& a) {
  if (shared.out.empty()) return;
  io::write_dense_text(fs::path(shared.out) / name, a);
}

DenseMatrix column(const std::vector<double>& v) {
  DenseMatrix d(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) d(i, 0) = v[i];
  return d;
}

// Shortest text that parses back to the same double.
std::string fmt(double x) {
  char buf[64];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, x).ptr);
}

int run_svd(const Shared& shared, const InputOptions& in_opt, std::size_t rank, const std::optional<std::size_t>& k1,
            const std::optional<std::size_t>& k2, const std::optional<std::size_t>& l, const std::optional<double>& p,
            const std::string& sketch) {
  const LoadedInput in = load_input(in_opt, shared.seed);
  const MatrixRef a = in.ref();
  RsvdParams params = RsvdParams::defaults(a.rows(), a.cols(), rank, shared.seed);
  if (k1) params.k1 = *k1;
  if (k2) params.k2 = *k2;
  if (l) params.l = *l;
  if (p) params.p1 = params.p2 = *p;
  params.sketch = parse_sketch_kind(sketch);
  const RsvdResult res = randomized_svd(a, params);

  if (!shared.out.empty()) {
    ensure_dir(shared.out);
    write_dense(shared, "u.txt", res.factors.u);
    write_dense(shared, "s.txt", column(res.factors.s));
    write_dense(shared, "v.txt", res.factors.v);
  }
  if (shared.format == "json") {
    nlohmann::json j = to_json(res, params);
    j["input"] = in.descriptor;
    j["m"] = a.rows();
    j["n"] = a.cols();
    emit(shared, "svd.json", j.dump(2) + "\n");
  } else {
    bench::ExperimentRecord rec;
    rec.method = std::string(to_string(params.sketch));
    rec.m = a.rows();
    rec.n = a.cols();
    rec.spectrum = in.descriptor;
    rec.seed = shared.seed;
    rec.r = rank;
    rec.k1 = params.k1;
    rec.k2 = params.k2;
    rec.l = params.l;
    rec.p = params.p1;
    rec.t_sketch_ms = res.timings.sketch_ms;
    rec.t_qr_ms = res.timings.qr_ms;
    rec.t_second_sketch_ms = res.timings.second_sketch_ms;
    rec.t_small_svd_ms = res.timings.small_svd_ms;
    rec.t_total_ms = res.timings.total_ms;
    rec.err_spectral = res.residual_spectral.value_or(NAN);
    rec.err_frobenius = res.residual_frobenius;
    if (in.sigma && rank < in.sigma->size()) {
      rec.sigma_r_plus_1 = (*in.sigma)[rank];
      double tail = 0.0;
      for (std::size_t i = rank; i < in.sigma->size(); ++i) tail += (*in.sigma)[i] * (*in.sigma)[i];
      rec.delta_r_plus_1 = std::sqrt(tail);
      rec.rel_err = rec.err_spectral / rec.sigma_r_plus_1;
    } else {
      rec.sigma_r_plus_1 = rec.delta_r_plus_1 = rec.rel_err = NAN;
    }
    emit(shared, "svd.csv", bench::records_to_csv({rec}));
  }
  return 0;
}

int run_lu(const Shared& shared, const InputOptions& in_opt, std::size_t rank, const std::optional<std::size_t>& k,
           const std::optional<double>& p, const std::string& sketch) {
  const LoadedInput in = load_input(in_opt, shared.seed);
  const MatrixRef a = in.ref();
  RluParams params = RluParams::defaults(a.rows(), a.cols(), rank, shared.seed);
  if (k) params.k = *k;
  if (p) params.p = *p;
  params.sketch = parse_sketch_kind(sketch);
  const RluResult res = randomized_lu(a, params);

  if (!shared.out.empty()) {
    ensure_dir(shared.out);
    write_dense(shared, "l.txt", res.factors.l);
    write_dense(shared, "u.txt", res.factors.u);
  }
  if (shared.format == "json") {
    nlohmann::json j = to_json(res, params);
    j["input"] = in.descriptor;
    j["m"] = a.rows();
    j["n"] = a.cols();
    j["row_permutation"] = res.factors.p.indices();
    j["column_permutation"] = res.factors.qc.indices();
    emit(shared, "lu.json", j.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << "input,m,n,seed,r,k,p,t_sketch_ms,t_lu_y_ms,t_project_ms,t_lu_b_ms,t_total_ms,err_spectral,err_frobenius\n";
    csv << in.descriptor << ',' << a.rows() << ',' << a.cols() << ',' << shared.seed << ',' << rank << ','
        << params.k << ',' << fmt(params.p) << ',' << fmt(res.timings.sketch_ms) << ',' << fmt(res.timings.lu_y_ms)
        << ',' << fmt(res.timings.project_ms) << ',' << fmt(res.timings.lu_b_ms) << ',' << fmt(res.timings.total_ms)
        << ',' << (res.residual_spectral ? fmt(*res.residual_spectral) : "") << ','
        << (res.residual_frobenius ? fmt(*res.residual_frobenius) : "") << '\n';
    emit(shared, "lu.csv", csv.str());
  }
  return 0;
}

int run_verify(const Shared& shared, ConservationConfig cfg, double threshold, const std::optional<double>& t) {
  cfg.seed = shared.seed;
  const TailReport lower = min_singval_tail(cfg, threshold);
  std::optional<TailReport> upper;
  if (t) upper = max_singval_tail(cfg, *t);

  nlohmann::json j;
  j["config"] = to_json(cfg);
  j["min_tail"] = to_json(lower);
  if (upper) j["max_tail"] = to_json(*upper);

  // Both tails draw the same subspaces and sketches, so the per-trial values agree.
  std::ostringstream csv;
  const double root_k = std::sqrt(static_cast<double>(cfg.k));
  csv << "trial,sigma_min,sigma_max,sigma_min_over_sqrt_k,sigma_max_over_sqrt_k\n";
  for (std::size_t i = 0; i < lower.sigma_min.size(); ++i) {
    csv << i << ',' << fmt(lower.sigma_min[i]) << ',' << fmt(lower.sigma_max[i]) << ','
        << fmt(lower.sigma_min[i] / root_k) << ',' << fmt(lower.sigma_max[i] / root_k) << '\n';
  }

  if (!shared.out.empty()) {
    emit(shared, "verify.json", j.dump(2) + "\n");
    emit(shared, "trials.csv", csv.str());
  } else {
    std::cout << (shared.format == "json" ? j.dump(2) + "\n" : csv.str());
  }
  return 0;
}

int run_bench(const Shared& shared, const std::string& config_path) {
  std::ifstream f(config_path);
  if (!f) throw IoError("cannot open config", config_path);
  nlohmann::json source;
  try {
    source = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  bench::ExperimentConfig cfg = bench::ExperimentConfig::from_json(source);
  if (!shared.out.empty()) cfg.output = shared.out;
  const bench::ExperimentRun run = bench::run_experiment(cfg);
  for (const auto& fail : run.failures) {
    std::cerr << "cell failed: " << fail.method << " " << fail.m << "x" << fail.n << " " << fail.spectrum
              << " seed=" << fail.seed << " r=" << fail.r << ": " << fail.message << '\n';
  }
  if (run.records.empty()) throw Error("every cell failed; nothing to report");
  nlohmann::json echo = source;
  echo["resolved_matrices"] = nlohmann::json::array();
  for (const auto& mc : cfg.matrices) {
    nlohmann::json mj{{"m", mc.m}, {"n", mc.n}, {"seed", mc.seed}, {"spectrum", bench::to_json(mc.spectrum)}};
    if (mc.spectrum.kind == bench::SpectrumSpec::Kind::LinearThenExp) {
      mj["tail_rescaling"] =
          "tail decays geometrically at the rate that reaches the floor at reference_length, then is scaled so its "
          "sum equals the reference-length tail sum (scale capped to keep the spectrum nonincreasing)";
    }
    echo["resolved_matrices"].push_back(mj);
  }
  bench::emit_report(run, echo, cfg.output);
  std::cerr << "wrote " << run.records.size() << " records to " << cfg.output << '\n';
  if (shared.format == "csv") {
    std::cout << bench::records_to_csv(run.records);
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : run.records) rows.push_back(bench::to_json(r));
    std::cout << rows.dump(2) << '\n';
  }
  return run.failures.empty() ? 0 : 3;
}

void add_shared(CLI::App* cmd, Shared& shared) {
  cmd->add_option("--seed", shared.seed, "Master seed");
  cmd->add_option("--out", shared.out, "Output directory");
  cmd->add_option("--format", shared.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_input(CLI::App* cmd, InputOptions& in) {
  auto* input = cmd->add_option("--input", in.input, "Matrix file (.mtx, .bin, or dense text)")->check(CLI::ExistingFile);
  auto* synth = cmd->add_option("--synth", in.synth, "Synthetic spectrum, e.g. exp-decay:1:e^-50");
  input->excludes(synth);
  synth->excludes(input);
  cmd->add_option("--m", in.m, "Rows of a synthetic matrix")->check(CLI::PositiveNumber);
  cmd->add_option("--n", in.n, "Columns of a synthetic matrix")->check(CLI::PositiveNumber);
  cmd->callback([&in] {
    if (in.input.empty() && in.synth.empty()) throw CLI::RequiredError("--input or --synth");
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized low-rank decompositions with sparse sketches"};
  app.require_subcommand(1);

  Shared shared;
  InputOptions input;
  std::size_t rank = 0;
  std::optional<std::size_t> k1, k2, l, k;
  std::optional<double> p, t;
  std::string sketch = "sparse-subgaussian";
  ConservationConfig verify_cfg;
  double threshold = 0.5;
  std::string config_path;

  const std::vector<std::string> sketches{"sparse-subgaussian", "gaussian", "countsketch", "srft"};

  auto* svd = app.add_subcommand("svd", "Rank-r randomized SVD");
  add_shared(svd, shared);
  add_input(svd, input);
  svd->add_option("--rank", rank, "Target rank")->required()->check(CLI::PositiveNumber);
  svd->add_option("--k1", k1, "Rows of the first sparse sketch");
  svd->add_option("--k2", k2, "Rows of the second sparse sketch");
  svd->add_option("--l", l, "Columns kept after re-compression");
  svd->add_option("--p", p, "Sketch density for both sketches");
  svd->add_option("--sketch", sketch, "Sketch ensemble")->check(CLI::IsMember(sketches));

  auto* lu = app.add_subcommand("lu", "Rank-r randomized LU");
  add_shared(lu, shared);
  add_input(lu, input);
  lu->add_option("--rank", rank, "Target rank")->required()->check(CLI::PositiveNumber);
  lu->add_option("--k", k, "Sketch size");
  lu->add_option("--p", p, "Sketch density");
  lu->add_option("--sketch", sketch, "Sketch ensemble")->check(CLI::IsMember(sketches));

  auto* verify = app.add_subcommand("verify", "Monte-Carlo subspace embedding check");
  add_shared(verify, shared);
  verify->add_option("--n", verify_cfg.n, "Ambient dimension")->required();
  verify->add_option("--r", verify_cfg.r, "Subspace dimension")->required();
  verify->add_option("--k", verify_cfg.k, "Sketch rows")->required();
  verify->add_option("--p", verify_cfg.p, "Sketch density")->required();
  verify->add_option("--trials", verify_cfg.trials, "Monte-Carlo trials (>= 100)");
  verify->add_option("--threshold", threshold, "Lower-tail level: event sigma_min <= threshold * sqrt(k)");
  verify->add_option("--t", t, "Upper-tail level: event sigma_max > t * sqrt(k)");

  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment grid");
  add_shared(bench_cmd, shared);
  bench_cmd->add_option("--config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*svd) return run_svd(shared, input, rank, k1, k2, l, p, sketch);
    if (*lu) return run_lu(shared, input, rank, k, p, sketch);
    if (*verify) return run_verify(shared, verify_cfg, threshold, t);
    return run_bench(shared, config_path);
  } catch (const Error& e) {
    std::cerr << "decomp: " << e.what() << '\n';
    return 1;
  }
}
