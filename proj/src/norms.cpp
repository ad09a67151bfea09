#include "rdecomp/norms.hpp"

#include "rdecomp/errors.hpp"
#include "rdecomp/kernels.hpp"
#include "rdecomp/rng.hpp"

namespace rdecomp {

double spectral_norm_estimate(const LinearOperator& a, int iters, std::uint64_t seed) {
  if (iters < 20) throw InvalidArgument("spectral_norm_estimate requires at least 20 iterations");
  RandomStream rng(seed, stream::kPower, 0);
  DenseMatrix x(a.cols(), 1);
  for (double& v : x.data()) v = rng.normal();

  auto normalize = [](DenseMatrix& v) {
    const double n = norm2(v.data());
    if (n == 0.0) return false;
    for (double& e : v.data()) e /= n;
    return true;
  };
  if (!normalize(x)) return 0.0;

  for (int it = 0; it < iters; ++it) {
    const DenseMatrix y = a.apply(x);
    DenseMatrix z = a.apply_adjoint(y);
    if (!normalize(z)) return 0.0;
    x = std::move(z);
  }
  return norm2(a.apply(x).data());
}

}  // namespace rdecomp
