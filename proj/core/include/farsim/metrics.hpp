#pragma once

#include <vector>

#include <Eigen/Dense>

#include "farsim/channel.hpp"
#include "farsim/config.hpp"

namespace farsim {

struct RateReport {
  Eigen::VectorXd gains;  // g_k = ||p_k * H_amp * h_k||^2
  Eigen::VectorXd sinrs;
  Eigen::VectorXd rates;  // log2(1 + sinr), bits/s/Hz
  int min_index = 0;      // weakest user, ties broken by lowest index
  double min_rate = 0.0;
  double min_gain = 0.0;
};

double effective_gain(const EffectiveChannel& channel, int k, double p_k);

/// All K gains using the per-user powers from the config.
Eigen::VectorXd effective_gains(const EffectiveChannel& channel,
                                const std::vector<double>& powers);

/// gamma_k = g_k / (sigma2 + sum_{i != k} g_i).
double sinr(const EffectiveChannel& channel, int k,
            const std::vector<double>& powers, double sigma2);

RateReport rate_report(const EffectiveChannel& channel,
                       const std::vector<double>& powers, double sigma2);
RateReport rate_report(const EffectiveChannel& channel,
                       const SystemConfig& config);

}  // namespace farsim
