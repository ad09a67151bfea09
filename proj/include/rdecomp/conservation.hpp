#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rdecomp/csr_matrix.hpp"
#include "rdecomp/dense_matrix.hpp"
#include "rdecomp/sketch.hpp"

namespace rdecomp {

/// Monte-Carlo setup for the subspace embedding checks: a k x n sparse
/// sketch of density p applied to random r-dimensional subspaces of R^n.
struct ConservationConfig {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t k = 0;
  double p = 1.0;
  std::size_t trials = 100;
  double eta = 0.1;                   // incompressibility mass level, in (0, 1)
  double eps0 = 1.0;                  // free knob of the default cutoff
  std::optional<double> eps_c;        // coordinate cutoff, default eps0 * eta * sqrt(p)
  double lambda = 0.5;                // small-ball radius, in (0, 1)
  std::uint64_t seed = 0;
  SubGaussianLaw law{BaseLaw::StandardNormal, true};

  double cutoff() const;
  /// Requires r < k <= n, trials >= 100, p in (0, 1], eta and lambda in (0, 1).
  void validate() const;
};

nlohmann::json to_json(const ConservationConfig& config);

/// Extreme singular values of Omega * B for B with orthonormal columns,
/// i.e. the extremes of |Omega x| over unit x in the span of B.
std::pair<double, double> subspace_extreme_singvals(const CsrMatrix& omega, const DenseMatrix& b);

struct Quantile {
  double level;
  double value;
};

struct TailReport {
  double threshold = 0.0;         // t in the event statistic <= t sqrt(k) (min) or > t sqrt(k) (max)
  std::size_t trials = 0;
  std::size_t failures = 0;
  double failure_fraction = 0.0;
  double standard_error = 0.0;    // binomial sqrt(f (1 - f) / trials)
  std::vector<Quantile> min_quantiles;  // of sigma_min(Omega B) / sqrt(k)
  std::vector<Quantile> max_quantiles;  // of sigma_max(Omega B) / sqrt(k)
  std::vector<double> sigma_min;        // per trial, unnormalized
  std::vector<double> sigma_max;
  // Max tail only: P(sigma_1(Omega) > t sqrt(n)).
  std::optional<double> full_sketch_fraction;
  std::optional<double> full_sketch_standard_error;
};

/// Estimates P(sigma_min(Omega B) <= threshold * sqrt(k)) over random
/// subspaces drawn as the Q factor of a Gaussian n x r matrix.
TailReport min_singval_tail(const ConservationConfig& config, double threshold);

/// Estimates P(sigma_max(Omega B) > t * sqrt(k)) and P(sigma_1(Omega) > t * sqrt(n)).
TailReport max_singval_tail(const ConservationConfig& config, double t);

nlohmann::json to_json(const TailReport& report);

struct MassReport {
  double mass = 0.0;  // sum of v_j^2 over |v_j| <= eps_c
  bool incompressible = false;
};

/// Requires |v| = 1 within 1e-10. Incompressible iff mass >= eta^2.
MassReport incompressibility_mass(std::span<const double> v, double eta, double eps_c);

struct SmallBallReport {
  double estimate = 0.0;  // P(|S| < lambda)
  double standard_error = 0.0;
  double bound = 0.0;     // 1 - p (1 - lambda^2)^2 / z4
  bool holds = false;     // estimate <= bound + 3 SE
};

/// S = sum a_i X_i with i.i.d. scaled sparse entries of density p.
/// Requires a scaled law, |a| = 1 and 0 < lambda < 1.
SmallBallReport small_ball_estimate(std::span<const double> a, const SubGaussianLaw& law, double p, double lambda,
                                    std::size_t trials, std::uint64_t seed);

struct MomentReport {
  double m3 = 0.0;
  double m4 = 0.0;
  double se3 = 0.0;
  double se4 = 0.0;
  double bound3 = 0.0;  // E Z^3 / sqrt(p)
  double bound4 = 0.0;  // (E Z^4 + 1) / p
  bool holds3 = false;  // m3 <= bound3 + 3 se3
  bool holds4 = false;
};

/// Empirical third and fourth moments of S. Requires a scaled law and |a| = 1.
MomentReport moment_bound_estimate(std::span<const double> a, const SubGaussianLaw& law, double p, std::size_t trials,
                                   std::uint64_t seed);

}  // namespace rdecomp
