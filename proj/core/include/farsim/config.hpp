#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace farsim {

struct SolverOptions {
  double outer_epsilon = 1e-4;  // stop outer loop when the min gain improves less
  double inner_tol = 1e-6;      // relative objective change ending alternating passes
  int max_passes = 30;          // alternating passes per outer iteration
  int max_outer = 50;           // outer iteration cap
};

/// Static scenario description. Lengths are in carrier wavelengths, so the
/// phase constant 2*pi/lambda is exactly 2*pi and `wavelength` only records
/// the unit choice.
struct SystemConfig {
  int num_users = 4;         // K
  int num_far_antennas = 4;  // M, per relay side
  int num_bs_antennas = 5;   // N
  int num_paths = 4;         // L, shared by every link
  double wavelength = 1.0;
  double region_size = 4.0;  // A, side of each square placement region
  double min_spacing = 0.5;  // d0, minimum distance between antennas of a group
  double relay_gain = 1.0;   // F, scalar amplify-and-forward gain
  // Default noise split corresponds to 5 dB SNR with unit power and F = 1.
  double noise_user = 0.15811388300841897;  // sigma_U^2 at the relay input
  double noise_bs = 0.15811388300841897;    // sigma_B^2 at the BS input
  std::vector<double> max_power = {1.0, 1.0, 1.0, 1.0};  // per-user transmit power
  double rician_beta = 1.0;  // LoS / NLoS power ratio
  std::uint64_t seed = 1;
  SolverOptions solver;

  /// Noise power seen by the simplified SINR: F * sigma_U^2 + sigma_B^2.
  double combined_noise() const { return relay_gain * noise_user + noise_bs; }
  double power(int k) const { return max_power.at(static_cast<std::size_t>(k)); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Stable key/value view used for serialization and run metadata.
  std::vector<std::pair<std::string, std::string>> to_key_values() const;
};

struct NoiseSplit {
  double noise_user = 0.0;
  double noise_bs = 0.0;
};

/// Inverts the average-SNR definition p_max^2 / (F*sigma_U^2 + sigma_B^2)
/// = 10^(snr_db/10) under the equal split sigma_U^2 = sigma_B^2.
NoiseSplit snr_to_noise(double snr_db, double p_max, double relay_gain);

/// Recovers the SNR in dB implied by a config's noise powers.
double config_snr_db(const SystemConfig& config);

/// Parses the flat key = value text format (see README for the key list).
/// Unknown keys are an error. The result is validated.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);
std::string serialize_config(const SystemConfig& config);

}  // namespace farsim
