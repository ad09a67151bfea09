#pragma once

#include <cstdint>

#include "rdecomp/linear_operator.hpp"

namespace rdecomp {

/// Power iteration on A^T A from a seeded Gaussian start. Returns |A x|
/// for the final unit iterate, which never decreases with `iters` and
/// never exceeds the largest singular value. Requires iters >= 20.
double spectral_norm_estimate(const LinearOperator& a, int iters, std::uint64_t seed);

}  // namespace rdecomp
