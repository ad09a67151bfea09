#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rdecomp {

/// Identifier recorded with experiment output.
inline constexpr const char* kRngIdentifier = "mt19937_64/splitmix64-derived-streams/libstdc++-normal";

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the independent stream `index` within purpose `stream`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

/// Stream tags, so that samplers sharing a master seed draw independently.
namespace stream {
inline constexpr std::uint64_t kSparse = 0x5350;
inline constexpr std::uint64_t kGaussian = 0x4741;
inline constexpr std::uint64_t kCountSketch = 0x4353;
inline constexpr std::uint64_t kSrft = 0x5352;
inline constexpr std::uint64_t kPower = 0x5057;
inline constexpr std::uint64_t kMonteCarlo = 0x4d43;
inline constexpr std::uint64_t kSynth = 0x5359;
}  // namespace stream

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
  RandomStream(std::uint64_t seed, std::uint64_t stream_tag, std::uint64_t index)
      : engine_(derive_seed(seed, stream_tag, index)) {}

  double normal() { return normal_(engine_); }

  /// Uniform on (0, 1].
  double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

  /// Number of failures before the first success of a Bernoulli(p) trial,
  /// with log1p(-p) passed in precomputed.
  std::uint64_t geometric_gap(double log1m_p) {
    const double g = std::floor(std::log(uniform_open0()) / log1m_p);
    return g >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(g);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace rdecomp
