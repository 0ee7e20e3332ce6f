#include "farsim/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace farsim {

double effective_gain(const EffectiveChannel& channel, int k, double p_k) {
  if (k < 0 || static_cast<std::size_t>(k) >= channel.user_to_far.size()) {
    throw std::out_of_range("effective_gain: user index out of range");
  }
  if (p_k < 0) throw std::invalid_argument("effective_gain: negative power");
  CVec received = channel.far_to_bs_amplified * channel.user_to_far[k];
  return p_k * p_k * received.squaredNorm();
}

Eigen::VectorXd effective_gains(const EffectiveChannel& channel,
                                const std::vector<double>& powers) {
  if (powers.size() != channel.user_to_far.size()) {
    throw std::invalid_argument("effective_gains: power count mismatch");
  }
  Eigen::VectorXd gains(static_cast<Eigen::Index>(powers.size()));
  for (std::size_t k = 0; k < powers.size(); ++k) {
    gains[static_cast<Eigen::Index>(k)] =
        effective_gain(channel, static_cast<int>(k), powers[k]);
  }
  return gains;
}

double sinr(const EffectiveChannel& channel, int k,
            const std::vector<double>& powers, double sigma2) {
  if (!(sigma2 > 0)) throw std::invalid_argument("sinr: sigma2 must be positive");
  if (k < 0 || static_cast<std::size_t>(k) >= powers.size()) {
    throw std::out_of_range("sinr: user index out of range");
  }
  Eigen::VectorXd gains = effective_gains(channel, powers);
  double interference = gains.sum() - gains[k];
  return gains[k] / (sigma2 + interference);
}

RateReport rate_report(const EffectiveChannel& channel,
                       const std::vector<double>& powers, double sigma2) {
  if (!(sigma2 > 0)) {
    throw std::invalid_argument("rate_report: sigma2 must be positive");
  }
  if (powers.empty()) {
    throw std::invalid_argument("rate_report: no users");
  }
  RateReport report;
  report.gains = effective_gains(channel, powers);
  Eigen::Index n = report.gains.size();
  report.sinrs.resize(n);
  report.rates.resize(n);
  double total = report.gains.sum();
  for (Eigen::Index k = 0; k < n; ++k) {
    double interference = total - report.gains[k];
    report.sinrs[k] = report.gains[k] / (sigma2 + interference);
    report.rates[k] = std::log2(1.0 + report.sinrs[k]);
  }
  // The SINR is strictly increasing in the own gain with the other gains
  // fixed, so the weakest user by gain is the weakest by SINR and by rate.
  // Scanning gains keeps the lowest-index tie-break identical everywhere.
  report.min_index = 0;
  for (Eigen::Index k = 1; k < n; ++k) {
    if (report.gains[k] < report.gains[report.min_index]) {
      report.min_index = static_cast<int>(k);
    }
  }
  report.min_rate = report.rates[report.min_index];
  report.min_gain = report.gains[report.min_index];
  return report;
}

RateReport rate_report(const EffectiveChannel& channel,
                       const SystemConfig& config) {
  return rate_report(channel, config.max_power, config.combined_noise());
}

}  // namespace farsim
