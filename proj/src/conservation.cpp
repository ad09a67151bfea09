#include "rdecomp/conservation.hpp"

#include <algorithm>
#include <cmath>

#include "rdecomp/errors.hpp"
#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/linear_operator.hpp"
#include "rdecomp/norms.hpp"
#include "rdecomp/rng.hpp"

namespace rdecomp {

namespace {

constexpr std::size_t kTrialsPerBlock = 4096;
constexpr double kUnitTolerance = 1e-10;
constexpr double kQuantileLevels[] = {0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1.0};

// Neumaier summation; blocks are merged in a fixed order.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

void require_unit(std::span<const double> v, const char* what) {
  const double norm = norm2(v);
  if (std::abs(norm - 1.0) > kUnitTolerance) {
    throw InvalidArgument(std::string(what) + " must have unit norm, got " + std::to_string(norm));
  }
}

void require_scaled(const SubGaussianLaw& law) {
  if (!law.scaled) throw InvalidArgument("the moment and small-ball bounds apply to the 1/sqrt(p) scaled law");
}

std::vector<Quantile> quantiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<Quantile> out;
  for (double level : kQuantileLevels) {
    const double pos = level * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.push_back({level, values[lo] + frac * (values[hi] - values[lo])});
  }
  return out;
}

double binomial_se(std::size_t hits, std::size_t trials) {
  const double f = static_cast<double>(hits) / static_cast<double>(trials);
  return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
}

struct TrialDraw {
  CsrMatrix omega;
  double sigma_min;
  double sigma_max;
};

TrialDraw draw_trial(const ConservationConfig& c, std::size_t trial) {
  const std::uint64_t omega_seed = derive_seed(c.seed, stream::kMonteCarlo, 2 * trial);
  const std::uint64_t basis_seed = derive_seed(c.seed, stream::kMonteCarlo, 2 * trial + 1);
  CsrMatrix omega = sample_sparse_subgaussian({SketchKind::SparseSubGaussian, c.k, c.n, c.p, omega_seed}, c.law);
  const DenseMatrix basis = thin_qr(sample_dense_gaussian(c.n, c.r, basis_seed)).q;
  const auto [lo, hi] = subspace_extreme_singvals(omega, basis);
  return {std::move(omega), lo, hi};
}

TailReport summarize(const ConservationConfig& c, double threshold, std::vector<double> mins, std::vector<double> maxs,
                     std::size_t failures) {
  TailReport report;
  report.threshold = threshold;
  report.trials = c.trials;
  report.failures = failures;
  report.failure_fraction = static_cast<double>(failures) / static_cast<double>(c.trials);
  report.standard_error = binomial_se(failures, c.trials);
  const double root_k = std::sqrt(static_cast<double>(c.k));
  std::vector<double> scaled_min(mins.size()), scaled_max(maxs.size());
  std::transform(mins.begin(), mins.end(), scaled_min.begin(), [&](double s) { return s / root_k; });
  std::transform(maxs.begin(), maxs.end(), scaled_max.begin(), [&](double s) { return s / root_k; });
  report.min_quantiles = quantiles(std::move(scaled_min));
  report.max_quantiles = quantiles(std::move(scaled_max));
  report.sigma_min = std::move(mins);
  report.sigma_max = std::move(maxs);
  return report;
}

// Calls visit(trial, S) for S = sum a_i X_i in every trial. Nonzero
// positions of the trials x n entry grid are found by geometric skipping
// in independent blocks of trials.
template <class Visit>
void for_each_weighted_sum(std::span<const double> a, const SubGaussianLaw& law, double p, std::size_t trials,
                           std::uint64_t seed, Visit&& visit) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
  const std::size_t n = a.size();
  const double scale = law.scaled ? 1.0 / std::sqrt(p) : 1.0;
  const double log1m_p = std::log1p(-p);
  std::vector<double> sums;
  for (std::size_t first = 0, block = 0; first < trials; first += kTrialsPerBlock, ++block) {
    const std::size_t count = std::min(kTrialsPerBlock, trials - first);
    sums.assign(count, 0.0);
    RandomStream rng(seed, stream::kMonteCarlo, block);
    const std::size_t cells = count * n;
    auto draw = [&] { return law.base == BaseLaw::StandardNormal ? rng.normal() : rng.sign(); };
    if (p == 1.0) {
      for (std::size_t f = 0; f < cells; ++f) sums[f / n] += a[f % n] * scale * draw();
    } else {
      std::size_t f = 0;
      while (true) {
        const std::uint64_t gap = rng.geometric_gap(log1m_p);
        if (gap >= cells - f) break;
        f += gap;
        sums[f / n] += a[f % n] * scale * draw();
        if (++f >= cells) break;
      }
    }
    for (std::size_t t = 0; t < count; ++t) visit(first + t, sums[t]);
  }
}

}  // namespace

double ConservationConfig::cutoff() const { return eps_c.value_or(eps0 * eta * std::sqrt(p)); }

void ConservationConfig::validate() const {
  if (!(r < k && k <= n)) {
    throw InvalidArgument("need r < k <= n, got r=" + std::to_string(r) + " k=" + std::to_string(k) +
                          " n=" + std::to_string(n));
  }
  if (r == 0) throw InvalidArgument("subspace dimension must be positive");
  if (trials < 100) throw InvalidArgument("at least 100 trials are required");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0, 1)");
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0, 1)");
  if (!(cutoff() > 0.0)) throw InvalidArgument("compressibility cutoff must be positive");
}

nlohmann::json to_json(const ConservationConfig& c) {
  return {{"n", c.n},         {"r", c.r},           {"k", c.k},          {"p", c.p},
          {"trials", c.trials}, {"eta", c.eta},     {"eps0", c.eps0},    {"eps_c", c.cutoff()},
          {"lambda", c.lambda}, {"seed", c.seed},   {"law", to_string(c.law.base)}, {"scaled", c.law.scaled},
          {"rng", kRngIdentifier}};
}

std::pair<double, double> subspace_extreme_singvals(const CsrMatrix& omega, const DenseMatrix& b) {
  if (omega.cols() != b.rows()) {
    throw DimensionError("sketch " + shape_string(omega.rows(), omega.cols()) + " does not match basis " +
                         shape_string(b.rows(), b.cols()));
  }
  if (orthonormality_error(b) > 1e-10) throw InvalidArgument("basis columns are not orthonormal");
  const auto s = singular_values(spmm(omega, b, Side::Left));
  // With fewer sketch rows than basis columns the product has a null space.
  const double smallest = omega.rows() < b.cols() ? 0.0 : s.back();
  return {smallest, s.front()};
}

TailReport min_singval_tail(const ConservationConfig& config, double threshold) {
  config.validate();
  const double level = threshold * std::sqrt(static_cast<double>(config.k));
  std::vector<double> mins(config.trials), maxs(config.trials);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const TrialDraw d = draw_trial(config, t);
    mins[t] = d.sigma_min;
    maxs[t] = d.sigma_max;
    if (d.sigma_min <= level) ++failures;
  }
  return summarize(config, threshold, std::move(mins), std::move(maxs), failures);
}

TailReport max_singval_tail(const ConservationConfig& config, double t) {
  config.validate();
  if (!(t >= 1.0)) throw InvalidArgument("max tail threshold t must be at least 1");
  const double level = t * std::sqrt(static_cast<double>(config.k));
  const double full_level = t * std::sqrt(static_cast<double>(config.n));
  std::vector<double> mins(config.trials), maxs(config.trials);
  std::size_t failures = 0, full_failures = 0;
  for (std::size_t trial = 0; trial < config.trials; ++trial) {
    const TrialDraw d = draw_trial(config, trial);
    mins[trial] = d.sigma_min;
    maxs[trial] = d.sigma_max;
    if (d.sigma_max > level) ++failures;
    const double full = spectral_norm_estimate(LinearOperator::from_csr(d.omega), 50,
                                               derive_seed(config.seed, stream::kPower, trial));
    if (full > full_level) ++full_failures;
  }
  TailReport report = summarize(config, t, std::move(mins), std::move(maxs), failures);
  report.full_sketch_fraction = static_cast<double>(full_failures) / static_cast<double>(config.trials);
  report.full_sketch_standard_error = binomial_se(full_failures, config.trials);
  return report;
}

nlohmann::json to_json(const TailReport& r) {
  auto qs = [](const std::vector<Quantile>& q) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : q) j.push_back({{"level", e.level}, {"value", e.value}});
    return j;
  };
  nlohmann::json j = {{"threshold", r.threshold},
                      {"trials", r.trials},
                      {"failures", r.failures},
                      {"failure_fraction", r.failure_fraction},
                      {"standard_error", r.standard_error},
                      {"min_quantiles", qs(r.min_quantiles)},
                      {"max_quantiles", qs(r.max_quantiles)}};
  if (r.full_sketch_fraction) {
    j["full_sketch_fraction"] = *r.full_sketch_fraction;
    j["full_sketch_standard_error"] = *r.full_sketch_standard_error;
  }
  return j;
}

MassReport incompressibility_mass(std::span<const double> v, double eta, double eps_c) {
  require_unit(v, "vector");
  CompensatedSum mass;
  for (double x : v)
    if (std::abs(x) <= eps_c) mass.add(x * x);
  return {mass.value(), mass.value() >= eta * eta};
}

SmallBallReport small_ball_estimate(std::span<const double> a, const SubGaussianLaw& law, double p, double lambda,
                                    std::size_t trials, std::uint64_t seed) {
  require_unit(a, "coefficient vector");
  require_scaled(law);
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0, 1)");
  if (trials == 0) throw InvalidArgument("trials must be positive");
  std::size_t inside = 0;
  for_each_weighted_sum(a, law, p, trials, seed, [&](std::size_t, double s) { inside += std::abs(s) < lambda; });
  SmallBallReport r;
  r.estimate = static_cast<double>(inside) / static_cast<double>(trials);
  r.standard_error = binomial_se(inside, trials);
  const double shrink = 1.0 - lambda * lambda;
  r.bound = 1.0 - p * shrink * shrink / law.z4();
  r.holds = r.estimate <= r.bound + 3.0 * r.standard_error;
  return r;
}

MomentReport moment_bound_estimate(std::span<const double> a, const SubGaussianLaw& law, double p, std::size_t trials,
                                   std::uint64_t seed) {
  require_unit(a, "coefficient vector");
  require_scaled(law);
  if (trials < 2) throw InvalidArgument("at least two trials are required");
  CompensatedSum s3, s4, s6, s8;
  for_each_weighted_sum(a, law, p, trials, seed, [&](std::size_t, double s) {
    const double sq = s * s;
    s3.add(sq * s);
    s4.add(sq * sq);
    s6.add(sq * sq * sq);
    s8.add(sq * sq * sq * sq);
  });
  const double n = static_cast<double>(trials);
  MomentReport r;
  r.m3 = s3.value() / n;
  r.m4 = s4.value() / n;
  r.se3 = std::sqrt(std::max(0.0, s6.value() / n - r.m3 * r.m3) / n);
  r.se4 = std::sqrt(std::max(0.0, s8.value() / n - r.m4 * r.m4) / n);
  r.bound3 = law.third_moment() / std::sqrt(p);
  r.bound4 = law.z4() / p;
  r.holds3 = r.m3 <= r.bound3 + 3.0 * r.se3;
  r.holds4 = r.m4 <= r.bound4 + 3.0 * r.se4;
  return r;
}

}  // namespace rdecomp
