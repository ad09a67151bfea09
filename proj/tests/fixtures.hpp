#pragma once

// Test matrices with a prescribed spectrum, built from library kernels that
// have their own oracle tests.

#include <cmath>
#include <vector>

#include "rdecomp/factorizations.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/sketch.hpp"

namespace fixture {

inline rdecomp::DenseMatrix with_spectrum(std::size_t m, std::size_t n, const std::vector<double>& sigma,
                                          std::uint64_t seed) {
  using namespace rdecomp;
  const std::size_t q = sigma.size();
  const auto u = thin_qr(sample_dense_gaussian(m, q, seed)).q;
  const auto v = thin_qr(sample_dense_gaussian(n, q, seed + 1)).q;
  return gemm_nt(scale_columns(u, sigma), v);
}

inline std::vector<double> geometric(std::size_t len, double from, double to) {
  std::vector<double> s(len);
  for (std::size_t i = 0; i < len; ++i)
    s[i] = len == 1 ? from : from * std::pow(to / from, static_cast<double>(i) / static_cast<double>(len - 1));
  return s;
}

/// r ones followed by a geometric tail from e^-5 to e^-50.
inline std::vector<double> step(std::size_t len, std::size_t r) {
  std::vector<double> s(r, 1.0);
  const auto tail = geometric(len - r, std::exp(-5.0), std::exp(-50.0));
  s.insert(s.end(), tail.begin(), tail.end());
  return s;
}

}  // namespace fixture
