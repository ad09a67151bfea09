#include "rdecomp/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "rdecomp/errors.hpp"

namespace rdecomp {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

}  // namespace

struct RealFourier::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

RealFourier::RealFourier(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n == 0) throw InvalidArgument("Fourier transform length must be positive");
  const int len = static_cast<int>(n);
  auto real = fftw_buffer<double>(n);
  auto cplx = fftw_buffer<fftw_complex>(n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c_1d(len, real.get(), cplx.get(), FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r_1d(len, cplx.get(), real.get(), FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r) throw Error("FFTW planning failed");
}

RealFourier::~RealFourier() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plans_->r2c);
  fftw_destroy_plan(plans_->c2r);
}

void RealFourier::forward(std::span<const double> in, std::span<double> out) const {
  if (in.size() != n_ || out.size() != n_) throw DimensionError("RealFourier::forward length mismatch");
  auto real = fftw_buffer<double>(n_);
  auto cplx = fftw_buffer<fftw_complex>(n_ / 2 + 1);
  std::copy(in.begin(), in.end(), real.get());
  fftw_execute_dft_r2c(plans_->r2c, real.get(), cplx.get());

  const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
  const double scale2 = std::sqrt(2.0) * scale;
  out[0] = cplx[0][0] * scale;
  const std::size_t pairs = (n_ - 1) / 2;  // frequencies with both parts
  for (std::size_t j = 1; j <= pairs; ++j) {
    out[2 * j - 1] = cplx[j][0] * scale2;
    out[2 * j] = cplx[j][1] * scale2;
  }
  if (n_ % 2 == 0 && n_ > 1) out[n_ - 1] = cplx[n_ / 2][0] * scale;
}

void RealFourier::inverse(std::span<const double> in, std::span<double> out) const {
  if (in.size() != n_ || out.size() != n_) throw DimensionError("RealFourier::inverse length mismatch");
  auto real = fftw_buffer<double>(n_);
  auto cplx = fftw_buffer<fftw_complex>(n_ / 2 + 1);
  // c2r of the unnormalised spectrum returns n * x.
  const double root_n = std::sqrt(static_cast<double>(n_));
  const double half = root_n / std::sqrt(2.0);
  cplx[0][0] = in[0] * root_n;
  cplx[0][1] = 0.0;
  const std::size_t pairs = (n_ - 1) / 2;
  for (std::size_t j = 1; j <= pairs; ++j) {
    cplx[j][0] = in[2 * j - 1] * half;
    cplx[j][1] = in[2 * j] * half;
  }
  if (n_ % 2 == 0 && n_ > 1) {
    cplx[n_ / 2][0] = in[n_ - 1] * root_n;
    cplx[n_ / 2][1] = 0.0;
  }
  fftw_execute_dft_c2r(plans_->c2r, cplx.get(), real.get());
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = real[i] * inv_n;
}

}  // namespace rdecomp
