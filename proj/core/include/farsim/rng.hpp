#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace farsim {

/// Identifies one reproducible random stream. Monte Carlo trials use
/// stream = trial index so trials are independent and individually
/// re-runnable. Same (seed, stream) always reproduces the same draws.
struct RngStream {
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

/// Deterministic draws on top of mt19937_64. The uniform and Gaussian
/// transforms are done by hand so sampled values do not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(RngStream id);

  std::uint64_t raw() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (second value cached).
  double gaussian();
  /// Circularly symmetric complex Gaussian with the given total variance
  /// (variance/2 per real component).
  std::complex<double> complex_gaussian(double variance);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace farsim
