#pragma once

#include <cstddef>
#include <memory>
#include <span>

namespace rdecomp {

/// Orthonormal real Fourier transform of length n.
///
/// The real DFT X = rfft(x) / sqrt(n) is packed into n reals as
///   [Re X0, sqrt2 Re X1, sqrt2 Im X1, ..., (Re X_{n/2} if n even)],
/// which makes the n x n map orthogonal; `inverse` is its transpose.
/// Instances may be shared across threads (FFTW new-array execute).
class RealFourier {
 public:
  explicit RealFourier(std::size_t n);
  ~RealFourier();
  RealFourier(const RealFourier&) = delete;
  RealFourier& operator=(const RealFourier&) = delete;

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<const double> in, std::span<double> out) const;
  void inverse(std::span<const double> in, std::span<double> out) const;

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace rdecomp
