#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace bhmf {

/// SplitMix64 counter generator (Steele/Lea/Flood 2014). The state is a plain
/// 64-bit counter advanced by the golden-gamma increment, so a seed fully
/// determines the stream on every platform. Gaussian variates come from
/// Box-Muller on two uniforms, keeping sampled states reproducible as well.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal (Box-Muller).
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Complex with independent N(0,1) real and imaginary parts.
  std::complex<double> next_complex_normal() {
    double re = next_normal();
    double im = next_normal();
    return {re, im};
  }

  /// Deterministic sub-stream seed for worker/test derivation.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    Rng r(seed ^ (salt * 0xD1B54A32D192ED03ULL));
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bhmf
