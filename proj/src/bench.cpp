#include "rdecomp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/fourier.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/rng.hpp"
#include "rdecomp/rsvd.hpp"
#include "rdecomp/sketch.hpp"

#ifndef RDECOMP_BUILD_STAMP
#define RDECOMP_BUILD_STAMP "unknown"
#endif

namespace rdecomp::bench {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return x;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return x;
}

// Accepts plain numbers and e^x.
double parse_spectrum_number(std::string_view text) {
  if (text.starts_with("e^")) return std::exp(parse_double(text.substr(2), "spectrum exponent"));
  return parse_double(text, "spectrum value");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::vector<double> geometric(std::size_t len, double from, double to) {
  std::vector<double> s(len);
  for (std::size_t i = 0; i < len; ++i) {
    s[i] = len == 1 ? from : from * std::pow(to / from, static_cast<double>(i) / static_cast<double>(len - 1));
  }
  return s;
}

void check_positive_nonincreasing(const std::vector<double>& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0) || !std::isfinite(s[i])) throw InvalidArgument("spectrum values must be positive and finite");
    if (i > 0 && s[i] > s[i - 1]) throw InvalidArgument("spectrum values must be nonincreasing");
  }
}

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

SpectrumSpec SpectrumSpec::exp_decay(double from, double to) {
  SpectrumSpec s;
  s.kind = Kind::ExpDecay;
  s.from = from;
  s.to = to;
  return s;
}

SpectrumSpec SpectrumSpec::step(std::size_t plateau_rank, double plateau_value, double tail_from, double tail_to) {
  SpectrumSpec s;
  s.kind = Kind::Step;
  s.plateau_rank = plateau_rank;
  s.plateau_value = plateau_value;
  s.tail_from = tail_from;
  s.tail_to = tail_to;
  return s;
}

SpectrumSpec SpectrumSpec::linear_then_exp(std::size_t breakpoint, double breakpoint_value) {
  SpectrumSpec s;
  s.kind = Kind::LinearThenExp;
  s.breakpoint = breakpoint;
  s.breakpoint_value = breakpoint_value;
  return s;
}

SpectrumSpec SpectrumSpec::parse(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string_view kind = parts.front();
  if (kind == "exp-decay" && parts.size() == 3) {
    return exp_decay(parse_spectrum_number(parts[1]), parse_spectrum_number(parts[2]));
  }
  if (kind == "step" && parts.size() == 5) {
    return step(parse_unsigned(parts[1], "plateau rank"), parse_spectrum_number(parts[2]),
                parse_spectrum_number(parts[3]), parse_spectrum_number(parts[4]));
  }
  if (kind == "linear-then-exp" && (parts.size() == 2 || parts.size() == 3)) {
    return linear_then_exp(parse_unsigned(parts[1], "breakpoint"),
                           parts.size() == 3 ? parse_spectrum_number(parts[2]) : 0.1);
  }
  throw InvalidArgument("unrecognised spectrum '" + std::string(text) +
                        "'; expected exp-decay:FROM:TO, step:R:VALUE:TAIL_FROM:TAIL_TO or linear-then-exp:B[:VALUE]");
}

SpectrumSpec SpectrumSpec::from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind")) throw InvalidArgument("spectrum must be a string or an object with a kind");
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    return v.is_string() ? parse_spectrum_number(v.get<std::string>()) : v.get<double>();
  };
  const std::string kind = j.at("kind").get<std::string>();
  SpectrumSpec s;
  if (kind == "exp-decay") {
    s = exp_decay(number("from", 1.0), number("to", 1.0));
  } else if (kind == "step") {
    s = step(j.at("plateau_rank").get<std::size_t>(), number("plateau_value", 1.0), number("tail_from", 1.0),
             number("tail_to", 1.0));
  } else if (kind == "linear-then-exp") {
    s = linear_then_exp(j.at("breakpoint").get<std::size_t>(), number("breakpoint_value", 0.1));
    s.floor = number("floor", s.floor);
    s.reference_length = j.value("reference_length", s.reference_length);
  } else {
    throw InvalidArgument("unknown spectrum kind '" + kind + "'");
  }
  return s;
}

std::vector<double> SpectrumSpec::values(std::size_t length) const {
  if (length == 0) throw InvalidArgument("spectrum length must be positive");
  std::vector<double> s;
  switch (kind) {
    case Kind::ExpDecay:
      s = geometric(length, from, to);
      break;
    case Kind::Step: {
      const std::size_t plateau = std::min(plateau_rank, length);
      s.assign(plateau, plateau_value);
      const auto tail = geometric(length - plateau, tail_from, tail_to);
      s.insert(s.end(), tail.begin(), tail.end());
      break;
    }
    case Kind::LinearThenExp: {
      if (breakpoint < 2 || reference_length <= breakpoint) {
        throw InvalidArgument("linear-then-exp needs 2 <= breakpoint < reference_length");
      }
      const std::size_t linear = std::min(breakpoint, length);
      s.resize(linear);
      for (std::size_t i = 0; i < linear; ++i) {
        // Both endpoints are exact, so the tail cannot start above the line.
        const double t = static_cast<double>(i) / static_cast<double>(breakpoint - 1);
        s[i] = (1.0 - t) + t * breakpoint_value;
      }
      if (length <= breakpoint) break;
      const double rate = std::pow(floor / breakpoint_value, 1.0 / static_cast<double>(reference_length - breakpoint));
      auto tail_sum = [&](std::size_t len) {
        double sum = 0.0, term = breakpoint_value;
        for (std::size_t j = 0; j < len; ++j) sum += (term *= rate);
        return sum;
      };
      const std::size_t tail_len = length - breakpoint;
      // Rescaling by more than 1/rate would lift the tail above the breakpoint value.
      const double scale = std::min(tail_sum(reference_length - breakpoint) / tail_sum(tail_len), 1.0 / rate);
      double term = breakpoint_value;
      for (std::size_t j = 0; j < tail_len; ++j) s.push_back(std::min(scale * (term *= rate), breakpoint_value));
      break;
    }
  }
  check_positive_nonincreasing(s);
  return s;
}

std::string to_string(const SpectrumSpec& s) {
  switch (s.kind) {
    case SpectrumSpec::Kind::ExpDecay:
      return "exp-decay:" + format_double(s.from) + ":" + format_double(s.to);
    case SpectrumSpec::Kind::Step:
      return "step:" + std::to_string(s.plateau_rank) + ":" + format_double(s.plateau_value) + ":" +
             format_double(s.tail_from) + ":" + format_double(s.tail_to);
    case SpectrumSpec::Kind::LinearThenExp:
      return "linear-then-exp:" + std::to_string(s.breakpoint) + ":" + format_double(s.breakpoint_value);
  }
  return {};
}

nlohmann::json to_json(const SpectrumSpec& s) {
  switch (s.kind) {
    case SpectrumSpec::Kind::ExpDecay:
      return {{"kind", "exp-decay"}, {"from", s.from}, {"to", s.to}};
    case SpectrumSpec::Kind::Step:
      return {{"kind", "step"},           {"plateau_rank", s.plateau_rank}, {"plateau_value", s.plateau_value},
              {"tail_from", s.tail_from}, {"tail_to", s.tail_to}};
    case SpectrumSpec::Kind::LinearThenExp:
      return {{"kind", "linear-then-exp"}, {"breakpoint", s.breakpoint}, {"breakpoint_value", s.breakpoint_value},
              {"floor", s.floor},          {"reference_length", s.reference_length}};
  }
  return {};
}

SynthMatrix synth_matrix(std::size_t m, std::size_t n, const SpectrumSpec& spectrum, std::uint64_t seed) {
  const std::size_t q = std::min(m, n);
  SynthMatrix out;
  out.sigma = spectrum.values(q);
  const DenseMatrix u = thin_qr(sample_dense_gaussian(m, q, derive_seed(seed, stream::kSynth, 0))).q;
  const DenseMatrix v = thin_qr(sample_dense_gaussian(n, q, derive_seed(seed, stream::kSynth, 1))).q;
  out.a = gemm_nt(scale_columns(u, out.sigma), v);
  return out;
}

LinearOperator dft_sandwich_operator(std::size_t n, const SpectrumSpec& spectrum) {
  if (!is_power_of_two(n)) throw InvalidArgument("DFT sandwich size must be a power of two, got " + std::to_string(n));
  auto sigma = std::make_shared<const std::vector<double>>(spectrum.values(n));
  auto fourier = std::make_shared<const RealFourier>(n);
  auto make = [n, sigma, fourier](bool forward) {
    return [n, sigma, fourier, forward](const DenseMatrix& x) {
      DenseMatrix out(n, x.cols());
      std::vector<double> col(n), mid(n), res(n);
      for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) col[i] = x(i, c);
        forward ? fourier->forward(col, mid) : fourier->inverse(col, mid);
        for (std::size_t i = 0; i < n; ++i) mid[i] *= (*sigma)[i];
        forward ? fourier->forward(mid, res) : fourier->inverse(mid, res);
        for (std::size_t i = 0; i < n; ++i) out(i, c) = res[i];
      }
      return out;
    };
  };
  return LinearOperator(n, n, make(true), make(false));
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::SparseSubGaussian: return "sparse-subgaussian";
    case Method::CountSketch: return "countsketch";
    case Method::Srft: return "srft";
    case Method::Gaussian: return "gaussian";
    case Method::FullSvd: return "full-svd";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "full-svd") return Method::FullSvd;
  switch (parse_sketch_kind(name)) {
    case SketchKind::SparseSubGaussian: return Method::SparseSubGaussian;
    case SketchKind::CountSketch: return Method::CountSketch;
    case SketchKind::Srft: return Method::Srft;
    case SketchKind::DenseGaussian: return Method::Gaussian;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> columns{
      "method", "m", "n", "spectrum", "seed", "r", "k1", "k2", "l", "p",
      "t_sketch_ms", "t_qr_ms", "t_second_sketch_ms", "t_small_svd_ms", "t_total_ms",
      "err_spectral", "err_frobenius", "rel_err", "sigma_r_plus_1", "delta_r_plus_1"};
  return columns;
}

namespace {

void require_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw InvalidArgument(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidArgument("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <class T>
T required(const nlohmann::json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw InvalidArgument("missing '" + std::string(key) + "' in " + std::string(where));
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument("'" + std::string(key) + "' in " + std::string(where) + " has the wrong type");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  require_keys(j, {"matrices", "methods", "ranks", "repeats", "warmup", "output", "params", "residual_iters", "parallel",
                    "threads"},
               "config");
  ExperimentConfig c;
  c.source = j;
  const auto matrices = required<nlohmann::json>(j, "matrices", "config");
  if (!matrices.is_array() || matrices.empty()) throw InvalidArgument("'matrices' must be a nonempty array");
  for (const auto& mj : matrices) {
    require_keys(mj, {"m", "n", "spectrum", "seed", "kind"}, "matrix entry");
    MatrixConfig mc;
    mc.m = required<std::size_t>(mj, "m", "matrix entry");
    mc.n = required<std::size_t>(mj, "n", "matrix entry");
    if (mc.m == 0 || mc.n == 0) throw InvalidArgument("matrix dimensions must be positive");
    if (!mj.contains("spectrum")) throw InvalidArgument("missing 'spectrum' in matrix entry");
    mc.spectrum = SpectrumSpec::from_json(mj.at("spectrum"));
    mc.seed = mj.value("seed", std::uint64_t{0});
    const std::string kind = mj.value("kind", std::string("dense"));
    if (kind == "dense") {
      mc.kind = MatrixConfig::Kind::Dense;
    } else if (kind == "dft-sandwich") {
      mc.kind = MatrixConfig::Kind::DftSandwich;
      if (mc.m != mc.n || !is_power_of_two(mc.n)) throw InvalidArgument("dft-sandwich needs m = n, a power of two");
    } else {
      throw InvalidArgument("unknown matrix kind '" + kind + "'");
    }
    c.matrices.push_back(mc);
  }
  for (const auto& name : required<std::vector<std::string>>(j, "methods", "config")) c.methods.push_back(parse_method(name));
  c.ranks = required<std::vector<std::size_t>>(j, "ranks", "config");
  if (c.methods.empty() || c.ranks.empty()) throw InvalidArgument("'methods' and 'ranks' must be nonempty");
  for (std::size_t r : c.ranks)
    if (r == 0) throw InvalidArgument("ranks must be positive");
  c.repeats = j.value("repeats", c.repeats);
  if (c.repeats == 0) throw InvalidArgument("'repeats' must be positive");
  c.warmup = j.value("warmup", c.warmup);
  c.output = j.value("output", c.output);
  c.residual_iters = j.value("residual_iters", c.residual_iters);
  c.parallel = j.value("parallel", c.parallel);
  c.threads = j.value("threads", c.threads);
  if (j.contains("params")) {
    const auto& pj = j.at("params");
    require_keys(pj, {"k1", "k2", "l", "p1", "p2"}, "params");
    if (pj.contains("k1")) c.params.k1 = pj.at("k1").get<std::size_t>();
    if (pj.contains("k2")) c.params.k2 = pj.at("k2").get<std::size_t>();
    if (pj.contains("l")) c.params.l = pj.at("l").get<std::size_t>();
    if (pj.contains("p1")) c.params.p1 = pj.at("p1").get<double>();
    if (pj.contains("p2")) c.params.p2 = pj.at("p2").get<double>();
  }
  return c;
}

namespace {

struct CellInput {
  const MatrixConfig* config;
  MatrixRef a;
  const std::vector<double>* sigma;
};

ExperimentRecord run_cell(const ExperimentConfig& cfg, const CellInput& in, Method method, std::size_t r) {
  const std::size_t m = in.config->m;
  const std::size_t n = in.config->n;
  const std::uint64_t seed = in.config->seed;
  if (r > std::min(m, n)) throw InvalidArgument("rank exceeds min(m, n)");

  ExperimentRecord rec;
  rec.method = std::string(to_string(method));
  rec.m = m;
  rec.n = n;
  rec.spectrum = to_string(in.config->spectrum);
  rec.seed = seed;
  rec.r = r;

  const std::size_t runs = cfg.repeats + (cfg.warmup ? 1 : 0);
  SvdFactors factors;
  std::vector<double> t_sketch, t_qr, t_second, t_small, t_total;

  if (method == Method::FullSvd) {
    for (std::size_t run = 0; run < runs; ++run) {
      const auto t0 = Clock::now();
      const DenseMatrix dense = in.a.to_dense();
      SvdResult svd = dense_svd(dense);
      SvdFactors f = truncate_rank(svd.u, svd.s, svd.v, r);
      const auto t1 = Clock::now();
      if (cfg.warmup && run == 0) continue;
      if (factors.s.empty()) factors = std::move(f);
      t_small.push_back(elapsed_ms(t0, t1));
      t_total.push_back(elapsed_ms(t0, t1));
    }
    t_sketch = t_qr = t_second = std::vector<double>(t_total.size(), 0.0);
  } else {
    RsvdParams params = RsvdParams::defaults(m, n, r, seed);
    if (cfg.params.k1) params.k1 = *cfg.params.k1;
    if (cfg.params.k2) params.k2 = *cfg.params.k2;
    if (cfg.params.l) params.l = *cfg.params.l;
    if (cfg.params.p1) params.p1 = *cfg.params.p1;
    if (cfg.params.p2) params.p2 = *cfg.params.p2;
    switch (method) {
      case Method::CountSketch: params.sketch = SketchKind::CountSketch; break;
      case Method::Srft: params.sketch = SketchKind::Srft; break;
      case Method::Gaussian: params.sketch = SketchKind::DenseGaussian; break;
      default: params.sketch = SketchKind::SparseSubGaussian; break;
    }
    rec.k1 = params.k1;
    rec.k2 = params.k2;
    rec.l = params.l;
    rec.p = params.p1;
    const RsvdOptions options{false, cfg.residual_iters};
    for (std::size_t run = 0; run < runs; ++run) {
      RsvdResult res = randomized_svd(in.a, params, options);
      if (cfg.warmup && run == 0) continue;
      if (factors.s.empty()) factors = std::move(res.factors);
      t_sketch.push_back(res.timings.sketch_ms);
      t_qr.push_back(res.timings.qr_ms);
      t_second.push_back(res.timings.second_sketch_ms);
      t_small.push_back(res.timings.small_svd_ms);
      t_total.push_back(res.timings.total_ms);
    }
  }
  rec.t_sketch_ms = median(t_sketch);
  rec.t_qr_ms = median(t_qr);
  rec.t_second_sketch_ms = median(t_second);
  rec.t_small_svd_ms = median(t_small);
  rec.t_total_ms = median(t_total);

  rec.err_spectral = spectral_residual(in.a, factors, cfg.residual_iters, derive_seed(seed, stream::kPower, r));
  if (in.a.materialized()) rec.err_frobenius = frobenius_residual(in.a, factors);
  const auto& sigma = *in.sigma;
  rec.sigma_r_plus_1 = r < sigma.size() ? sigma[r] : 0.0;
  double tail = 0.0;
  for (std::size_t i = r; i < sigma.size(); ++i) tail += sigma[i] * sigma[i];
  rec.delta_r_plus_1 = std::sqrt(tail);
  rec.rel_err = rec.err_spectral / rec.sigma_r_plus_1;
  return rec;
}

}  // namespace

ExperimentRun run_experiment(const ExperimentConfig& cfg) {
  struct Prepared {
    std::vector<double> sigma;
    DenseMatrix dense;
    std::optional<LinearOperator> op;
    std::optional<std::string> error;
  };
  struct Cell {
    std::size_t matrix;
    Method method;
    std::size_t r;
  };

  std::vector<Prepared> prepared(cfg.matrices.size());
  for (std::size_t i = 0; i < cfg.matrices.size(); ++i) {
    const auto& mc = cfg.matrices[i];
    auto& p = prepared[i];
    try {
      if (mc.kind == MatrixConfig::Kind::Dense) {
        SynthMatrix s = synth_matrix(mc.m, mc.n, mc.spectrum, mc.seed);
        p.dense = std::move(s.a);
        p.sigma = std::move(s.sigma);
      } else {
        p.op = dft_sandwich_operator(mc.n, mc.spectrum);
        p.sigma = mc.spectrum.values(mc.n);
      }
    } catch (const std::exception& e) {
      p.error = e.what();
    }
  }

  std::vector<Cell> cells;
  for (std::size_t i = 0; i < cfg.matrices.size(); ++i)
    for (Method method : cfg.methods)
      for (std::size_t r : cfg.ranks) cells.push_back({i, method, r});

  std::vector<std::variant<ExperimentRecord, CellFailure>> outcomes(cells.size());
  auto run_one = [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    const auto& mc = cfg.matrices[cell.matrix];
    const auto& p = prepared[cell.matrix];
    try {
      if (p.error) throw InvalidArgument(*p.error);
      const CellInput input{&mc, p.op ? MatrixRef(*p.op) : MatrixRef(p.dense), &p.sigma};
      outcomes[idx] = run_cell(cfg, input, cell.method, cell.r);
    } catch (const std::exception& e) {
      outcomes[idx] = CellFailure{std::string(to_string(cell.method)), mc.m, mc.n, to_string(mc.spectrum), mc.seed,
                                  cell.r, e.what()};
    }
  };

  if (cfg.parallel) {
    const std::size_t workers =
        std::max<std::size_t>(1, cfg.threads ? cfg.threads : std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, cells.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t idx = next++; idx < cells.size(); idx = next++) run_one(idx);
      });
    }
  } else {
    for (std::size_t idx = 0; idx < cells.size(); ++idx) run_one(idx);
  }

  ExperimentRun run;
  for (auto& o : outcomes) {
    if (auto* rec = std::get_if<ExperimentRecord>(&o)) {
      run.records.push_back(std::move(*rec));
    } else {
      run.failures.push_back(std::move(std::get<CellFailure>(o)));
    }
  }
  return run;
}

ExperimentRun run_experiment(const nlohmann::json& config) { return run_experiment(ExperimentConfig::from_json(config)); }

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.m << ',' << r.n << ',' << r.spectrum << ',' << r.seed << ',' << r.r << ',' << r.k1
        << ',' << r.k2 << ',' << r.l << ',' << format_double(r.p) << ',' << format_double(r.t_sketch_ms) << ','
        << format_double(r.t_qr_ms) << ',' << format_double(r.t_second_sketch_ms) << ','
        << format_double(r.t_small_svd_ms) << ',' << format_double(r.t_total_ms) << ','
        << format_double(r.err_spectral) << ',' << (r.err_frobenius ? format_double(*r.err_frobenius) : "") << ','
        << format_double(r.rel_err) << ',' << format_double(r.sigma_r_plus_1) << ','
        << format_double(r.delta_r_plus_1) << '\n';
  }
  return out.str();
}

std::vector<ExperimentRecord> records_from_csv(std::string_view text) {
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw InvalidArgument("CSV has no header");
  const auto header = split(lines.front(), ',');
  const auto& cols = record_columns();
  if (!std::equal(header.begin(), header.end(), cols.begin(), cols.end())) {
    throw InvalidArgument("CSV header does not match the record schema");
  }
  std::vector<ExperimentRecord> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li], ',');
    if (f.size() != cols.size()) throw InvalidArgument("CSV line " + std::to_string(li + 1) + " has a wrong field count");
    ExperimentRecord r;
    r.method = std::string(f[0]);
    r.m = parse_unsigned(f[1], "m");
    r.n = parse_unsigned(f[2], "n");
    r.spectrum = std::string(f[3]);
    r.seed = parse_unsigned(f[4], "seed");
    r.r = parse_unsigned(f[5], "r");
    r.k1 = parse_unsigned(f[6], "k1");
    r.k2 = parse_unsigned(f[7], "k2");
    r.l = parse_unsigned(f[8], "l");
    r.p = parse_double(f[9], "p");
    r.t_sketch_ms = parse_double(f[10], "t_sketch_ms");
    r.t_qr_ms = parse_double(f[11], "t_qr_ms");
    r.t_second_sketch_ms = parse_double(f[12], "t_second_sketch_ms");
    r.t_small_svd_ms = parse_double(f[13], "t_small_svd_ms");
    r.t_total_ms = parse_double(f[14], "t_total_ms");
    r.err_spectral = parse_double(f[15], "err_spectral");
    if (!f[16].empty()) r.err_frobenius = parse_double(f[16], "err_frobenius");
    r.rel_err = parse_double(f[17], "rel_err");
    r.sigma_r_plus_1 = parse_double(f[18], "sigma_r_plus_1");
    r.delta_r_plus_1 = parse_double(f[19], "delta_r_plus_1");
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const ExperimentRecord& r) {
  return {{"method", r.method},
          {"m", r.m},
          {"n", r.n},
          {"spectrum", r.spectrum},
          {"seed", r.seed},
          {"r", r.r},
          {"k1", r.k1},
          {"k2", r.k2},
          {"l", r.l},
          {"p", r.p},
          {"t_sketch_ms", r.t_sketch_ms},
          {"t_qr_ms", r.t_qr_ms},
          {"t_second_sketch_ms", r.t_second_sketch_ms},
          {"t_small_svd_ms", r.t_small_svd_ms},
          {"t_total_ms", r.t_total_ms},
          {"err_spectral", r.err_spectral},
          {"err_frobenius", r.err_frobenius ? nlohmann::json(*r.err_frobenius) : nlohmann::json()},
          {"rel_err", r.rel_err},
          {"sigma_r_plus_1", r.sigma_r_plus_1},
          {"delta_r_plus_1", r.delta_r_plus_1}};
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  ExperimentRecord r;
  r.method = j.at("method").get<std::string>();
  r.m = j.at("m").get<std::size_t>();
  r.n = j.at("n").get<std::size_t>();
  r.spectrum = j.at("spectrum").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.r = j.at("r").get<std::size_t>();
  r.k1 = j.at("k1").get<std::size_t>();
  r.k2 = j.at("k2").get<std::size_t>();
  r.l = j.at("l").get<std::size_t>();
  r.p = j.at("p").get<double>();
  r.t_sketch_ms = j.at("t_sketch_ms").get<double>();
  r.t_qr_ms = j.at("t_qr_ms").get<double>();
  r.t_second_sketch_ms = j.at("t_second_sketch_ms").get<double>();
  r.t_small_svd_ms = j.at("t_small_svd_ms").get<double>();
  r.t_total_ms = j.at("t_total_ms").get<double>();
  r.err_spectral = j.at("err_spectral").get<double>();
  if (!j.at("err_frobenius").is_null()) r.err_frobenius = j.at("err_frobenius").get<double>();
  // JSON has no infinity; an exact-rank cell serializes its ratio as null.
  r.rel_err = j.at("rel_err").is_null() ? INFINITY : j.at("rel_err").get<double>();
  r.sigma_r_plus_1 = j.at("sigma_r_plus_1").get<double>();
  r.delta_r_plus_1 = j.at("delta_r_plus_1").get<double>();
  return r;
}

std::string_view build_stamp() { return RDECOMP_BUILD_STAMP; }

void emit_report(const ExperimentRun& run, const nlohmann::json& config_echo, const std::filesystem::path& dir) {
  if (run.records.empty()) throw InvalidArgument("no records to report");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory (" + ec.message() + ")", dir.string());

  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed", path.string());
  };

  write(dir / "records.csv", records_to_csv(run.records));

  nlohmann::json report;
  report["config"] = config_echo;
  report["rng"] = kRngIdentifier;
  report["build"] = std::string(build_stamp());
  report["columns"] = record_columns();
  report["records"] = nlohmann::json::array();
  for (const auto& r : run.records) report["records"].push_back(to_json(r));
  report["failures"] = nlohmann::json::array();
  for (const auto& f : run.failures) {
    report["failures"].push_back({{"method", f.method}, {"m", f.m}, {"n", f.n}, {"spectrum", f.spectrum},
                                  {"seed", f.seed}, {"r", f.r}, {"message", f.message}});
  }
  write(dir / "report.json", report.dump(2) + "\n");
}

double time_sparse_sketch(const CsrMatrix& a, std::size_t k, double p, std::size_t repeats, std::uint64_t seed) {
  if (repeats == 0) throw InvalidArgument("repeats must be positive");
  const CsrMatrix omega = sample_sparse_subgaussian({SketchKind::SparseSubGaussian, k, a.cols(), p, seed}, {});
  (void)sketch_matrix(omega, a, SketchMode::RightTranspose);
  std::vector<double> times;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    const DenseMatrix y = sketch_matrix(omega, a, SketchMode::RightTranspose);
    times.push_back(elapsed_ms(t0, Clock::now()));
  }
  return median(times);
}

CsrMatrix random_sparse(std::size_t m, std::size_t n, double density, std::uint64_t seed) {
  // A sketch sampler with an unscaled normal law draws exactly this ensemble.
  return sample_sparse_subgaussian({SketchKind::SparseSubGaussian, m, n, density, derive_seed(seed, stream::kSynth, 2)},
                                   {});
}

}  // namespace rdecomp::bench
