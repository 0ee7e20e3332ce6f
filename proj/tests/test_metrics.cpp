#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "farsim/channel.hpp"
#include "farsim/metrics.hpp"
#include "farsim/rng.hpp"

using namespace farsim;

namespace {

// Hand-built channel with prescribed per-user gains: far_to_bs_amplified is
// identity-like and h_k has a single nonzero entry sqrt(g_k).
EffectiveChannel channel_with_gains(const std::vector<double>& gains) {
  EffectiveChannel channel;
  int n = static_cast<int>(gains.size());
  channel.far_to_bs = CMat::Identity(n, n);
  channel.far_to_bs_amplified = channel.far_to_bs;
  for (int k = 0; k < n; ++k) {
    CVec h = CVec::Zero(n);
    h[k] = std::sqrt(gains[k]);
    channel.user_to_far.push_back(h);
  }
  return channel;
}

EffectiveChannel random_channel(Rng& rng, int users, int m, int n) {
  EffectiveChannel channel;
  channel.far_to_bs = CMat::NullaryExpr(
      n, m, [&rng](Eigen::Index, Eigen::Index) { return rng.complex_gaussian(1.0); });
  channel.far_to_bs_amplified = 1.7 * channel.far_to_bs;
  for (int k = 0; k < users; ++k) {
    channel.user_to_far.push_back(CVec::NullaryExpr(
        m, [&rng](Eigen::Index) { return rng.complex_gaussian(1.0); }));
  }
  return channel;
}

}  // namespace

TEST_CASE("effective_gain is ||p_k * amplified * h_k||^2") {
  Rng rng({11, 0});
  EffectiveChannel channel = random_channel(rng, 2, 3, 4);
  std::vector<double> powers = {0.5, 2.0};
  for (int k = 0; k < 2; ++k) {
    double expect =
        std::pow(powers[k], 2) *
        (channel.far_to_bs_amplified * channel.user_to_far[k]).squaredNorm();
    CHECK(effective_gain(channel, k, powers[k]) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS(effective_gain(channel, 5, 1.0), std::out_of_range);
  CHECK_THROWS_AS(effective_gain(channel, 0, -1.0), std::invalid_argument);
}

TEST_CASE("sinr") {
  SUBCASE("single user has no interference term") {
    EffectiveChannel channel = channel_with_gains({3.0});
    CHECK(sinr(channel, 0, {1.0}, 0.5) == doctest::Approx(6.0).epsilon(1e-12));
  }
  SUBCASE("interference sums the other users' gains") {
    EffectiveChannel channel = channel_with_gains({4.0, 1.0, 2.0});
    std::vector<double> p = {1.0, 1.0, 1.0};
    CHECK(sinr(channel, 0, p, 1.0) ==
          doctest::Approx(4.0 / (1.0 + 3.0)).epsilon(1e-12));
    CHECK(sinr(channel, 1, p, 1.0) ==
          doctest::Approx(1.0 / (1.0 + 6.0)).epsilon(1e-12));
  }
  SUBCASE("gamma_k < g_k / sigma2 always") {
    Rng rng({12, 0});
    EffectiveChannel channel = random_channel(rng, 3, 2, 2);
    std::vector<double> p = {1.0, 1.0, 1.0};
    for (int k = 0; k < 3; ++k) {
      CHECK(sinr(channel, k, p, 0.3) <
            effective_gain(channel, k, 1.0) / 0.3);
    }
  }
  SUBCASE("index out of range") {
    EffectiveChannel channel = channel_with_gains({1.0});
    CHECK_THROWS_AS(sinr(channel, 1, {1.0}, 1.0), std::out_of_range);
  }
}

TEST_CASE("rate_report") {
  SUBCASE("gain ordering determines the weakest user") {
    EffectiveChannel channel = channel_with_gains({4.0, 1.0, 2.0});
    RateReport report = rate_report(channel, {1.0, 1.0, 1.0}, 1.0);
    CHECK(report.min_index == 1);
    CHECK(report.min_gain == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.min_rate ==
          doctest::Approx(std::log2(1.0 + 1.0 / 7.0)).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
      CHECK(report.rates[k] ==
            doctest::Approx(std::log2(1.0 + report.sinrs[k])).epsilon(1e-12));
    }
  }
  SUBCASE("ties break to the lowest index") {
    EffectiveChannel channel = channel_with_gains({2.0, 1.0, 1.0});
    RateReport report = rate_report(channel, {1.0, 1.0, 1.0}, 1.0);
    CHECK(report.min_index == 1);
  }
  SUBCASE("empty powers rejected") {
    EffectiveChannel channel = channel_with_gains({1.0});
    CHECK_THROWS_AS(rate_report(channel, {}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("pairwise ordering equivalence between gains, SINRs and rates") {
  Rng rng({13, 0});
  for (int trial = 0; trial < 200; ++trial) {
    int users = 2 + static_cast<int>(rng.uniform() * 3);
    EffectiveChannel channel = random_channel(rng, users, 3, 3);
    std::vector<double> powers;
    for (int k = 0; k < users; ++k) powers.push_back(0.25 + rng.uniform());
    double sigma2 = 0.05 + rng.uniform();
    RateReport report = rate_report(channel, powers, sigma2);
    for (int a = 0; a < users; ++a) {
      for (int b = a + 1; b < users; ++b) {
        double dg = report.gains[a] - report.gains[b];
        double ds = report.sinrs[a] - report.sinrs[b];
        double dr = report.rates[a] - report.rates[b];
        CAPTURE(trial);
        CHECK(dg * ds >= 0.0);
        CHECK(dg * dr >= 0.0);
      }
    }
    // argmin over rates equals argmin over gains under the same tie-break
    int argmin_rate = 0;
    for (int k = 1; k < users; ++k)
      if (report.rates[k] < report.rates[argmin_rate]) argmin_rate = k;
    CHECK(argmin_rate == report.min_index);
  }
}

TEST_CASE("config overload wires the combined noise") {
  SystemConfig config;
  config.num_users = 2;
  config.num_far_antennas = 2;
  config.num_bs_antennas = 2;
  config.num_paths = 2;
  config.max_power = {1.0, 1.0};
  ChannelRealization realization = sample_realization(config, {3, 0});
  Layout layout;
  layout.user_positions = {Vec2(2, 2), Vec2(2, 2)};
  layout.far_rx_positions = {Vec2(0, 0), Vec2(1, 0)};
  layout.far_tx_positions = {Vec2(0, 0), Vec2(0, 1)};
  layout.bs_positions = {Vec2(0, 0), Vec2(1, 1)};
  EffectiveChannel channel = assemble(realization, layout, config);
  RateReport via_config = rate_report(channel, config);
  RateReport direct =
      rate_report(channel, config.max_power, config.combined_noise());
  CHECK(via_config.min_rate == direct.min_rate);
  CHECK(via_config.min_index == direct.min_index);
}
