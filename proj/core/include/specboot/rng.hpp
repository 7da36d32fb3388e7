#pragma once

#include <cmath>
#include <cstdint>

#include "specboot/errors.hpp"

namespace specboot {

/// SplitMix64 finalizer. Bijective 64-bit mix with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

/// Purpose tags keeping derived streams disjoint across subsystems.
enum class StreamTag : std::uint64_t {
  kDatagen = 0x01,
  kProjection = 0x02,
  kRows = 0x03,
  kSimulation = 0x04,
  kLadder = 0x05,
  kGeneric = 0x06,
};

/// Stream key for (seed, purpose, index). Chained mixing; collisions between
/// distinct (tag, index) pairs are as unlikely as 64-bit hash collisions.
inline std::uint64_t derive_stream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  std::uint64_t h = mix64(seed ^ 0x517cc1b727220a95ULL);
  h = mix64(h ^ (static_cast<std::uint64_t>(tag) * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ index);
  return h;
}

/// Counter-based stream generator (SplitMix64): output i is mix64 of
/// key + i*gamma. Instances are cheap values; every consumer owns its own
/// stream, so parallel schedules cannot perturb the draws.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0,1), 53-bit resolution.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; safe as a log() argument.
  double next_uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Unbiased uniform integer on [0, n) (Lemire's multiply-shift with rejection).
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw DomainError("next_below: n must be positive");
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller; the paired deviate is cached.
  double next_normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = next_uniform_pos();
    double u2 = next_uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  /// Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze method).
  double next_gamma(double shape) {
    if (shape < 1.0) throw DomainError("next_gamma: shape must be >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = next_uniform_pos();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Chi-squared with integer-ish df (df/2 >= 1).
  double next_chisq(double df) { return 2.0 * next_gamma(df / 2.0); }

  /// +1 or -1 with equal probability.
  double next_rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace specboot
