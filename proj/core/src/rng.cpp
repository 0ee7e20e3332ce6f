#include "farsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace farsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Mixes (seed, stream) into a single well-distributed engine seed.
std::uint64_t mix_stream(RngStream id) {
  std::uint64_t s = id.seed;
  std::uint64_t a = splitmix64(s);
  s ^= id.stream * 0x632BE59BD9B4E019ull + 0x9E3779B97F4A7C15ull;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x165667B19E3779F9ull);
}

}  // namespace

Rng::Rng(RngStream id) : engine_(mix_stream(id)) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the log finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::complex<double> Rng::complex_gaussian(double variance) {
  double s = std::sqrt(variance * 0.5);
  double re = gaussian();
  double im = gaussian();
  return {s * re, s * im};
}

}  // namespace farsim
