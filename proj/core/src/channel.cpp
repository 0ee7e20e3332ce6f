#include "farsim/channel.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace farsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void append_doubles(std::string& out, const char* label,
                    const Eigen::VectorXd& values) {
  out += label;
  out += " =";
  char buf[40];
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " %.17g", values[i]);
    out += buf;
  }
  out += '\n';
}

class HashAccumulator {
 public:
  void mix(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    mix(bits);
  }
  void mix(std::uint64_t bits) {
    state_ ^= bits;
    state_ *= 0x100000001B3ull;  // FNV-1a prime, 64-bit
  }
  void mix(const PathAngles& angles) {
    mix(static_cast<std::uint64_t>(angles.count()));
    for (Eigen::Index i = 0; i < angles.elevation.size(); ++i)
      mix(angles.elevation[i]);
    for (Eigen::Index i = 0; i < angles.azimuth.size(); ++i)
      mix(angles.azimuth[i]);
  }
  void mix(const CMat& m) {
    mix(static_cast<std::uint64_t>(m.rows()));
    mix(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        mix(m(r, c).real());
        mix(m(r, c).imag());
      }
    }
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ull;  // FNV offset basis
};

PathAngles sample_angles(int paths, Rng& rng) {
  PathAngles a;
  a.elevation.resize(paths);
  a.azimuth.resize(paths);
  for (int p = 0; p < paths; ++p) a.elevation[p] = rng.uniform(0.0, kPi);
  for (int p = 0; p < paths; ++p) a.azimuth[p] = rng.uniform(0.0, kPi);
  return a;
}

CMat sample_path_gains(int paths, double beta, Rng& rng) {
  CMat gains = CMat::Zero(paths, paths);
  double los_var = beta / (beta + 1.0);
  double nlos_var = paths > 1 ? 1.0 / ((beta + 1.0) * (paths - 1)) : 0.0;
  gains(0, 0) = rng.complex_gaussian(los_var);
  for (int p = 1; p < paths; ++p) gains(p, p) = rng.complex_gaussian(nlos_var);
  return gains;
}

}  // namespace

Eigen::Matrix2Xd PathAngles::wave_vectors() const {
  Eigen::Matrix2Xd out(2, count());
  for (int p = 0; p < count(); ++p)
    out.col(p) = wave_vector(elevation[p], azimuth[p]);
  return out;
}

Vec2 wave_vector(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi) || !(phi >= 0.0 && phi <= kPi)) {
    throw std::domain_error("wave_vector: angles must lie in [0, pi]");
  }
  return {std::sin(theta) * std::cos(phi), std::cos(theta)};
}

std::complex<double> phase_response(const Vec2& position, const Vec2& n) {
  double angle = kTwoPi * n.dot(position);
  return {std::cos(angle), std::sin(angle)};
}

CVec frv(const Vec2& position, const PathAngles& angles) {
  CVec out(angles.count());
  for (int p = 0; p < angles.count(); ++p) {
    out[p] = phase_response(position,
                            wave_vector(angles.elevation[p], angles.azimuth[p]));
  }
  return out;
}

CVec frv_derivative(const Vec2& position, const PathAngles& angles, int axis) {
  if (axis != 0 && axis != 1) {
    throw std::out_of_range("frv_derivative: axis must be 0 or 1");
  }
  CVec out(angles.count());
  const std::complex<double> j(0.0, 1.0);
  for (int p = 0; p < angles.count(); ++p) {
    Vec2 n = wave_vector(angles.elevation[p], angles.azimuth[p]);
    out[p] = j * kTwoPi * n[axis] * phase_response(position, n);
  }
  return out;
}

CMat frm(const std::vector<Vec2>& positions, const PathAngles& angles) {
  CMat out(angles.count(), static_cast<Eigen::Index>(positions.size()));
  for (std::size_t m = 0; m < positions.size(); ++m) {
    out.col(static_cast<Eigen::Index>(m)) = frv(positions[m], angles);
  }
  return out;
}

std::uint64_t ChannelRealization::hash() const {
  HashAccumulator acc;
  acc.mix(static_cast<std::uint64_t>(users.size()));
  for (const UserLink& link : users) {
    acc.mix(link.departure);
    acc.mix(link.arrival);
    acc.mix(link.path_gains);
  }
  acc.mix(relay.departure);
  acc.mix(relay.arrival);
  acc.mix(relay.path_gains);
  return acc.value();
}

bool layout_feasible(const Layout& layout, const SystemConfig& config,
                     double box_tol, double spacing_tol) {
  double a = config.region_size;
  auto in_box = [a, box_tol](const Vec2& p) {
    return p.x() >= -box_tol && p.x() <= a + box_tol && p.y() >= -box_tol &&
           p.y() <= a + box_tol;
  };
  auto spaced = [&config, spacing_tol](const std::vector<Vec2>& group) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if ((group[i] - group[j]).norm() < config.min_spacing - spacing_tol)
          return false;
      }
    }
    return true;
  };
  if (layout.user_positions.size() !=
          static_cast<std::size_t>(config.num_users) ||
      layout.far_rx_positions.size() !=
          static_cast<std::size_t>(config.num_far_antennas) ||
      layout.far_tx_positions.size() !=
          static_cast<std::size_t>(config.num_far_antennas) ||
      layout.bs_positions.size() !=
          static_cast<std::size_t>(config.num_bs_antennas)) {
    return false;
  }
  for (const Vec2& p : layout.user_positions)
    if (!in_box(p)) return false;
  for (const Vec2& p : layout.far_rx_positions)
    if (!in_box(p)) return false;
  for (const Vec2& p : layout.far_tx_positions)
    if (!in_box(p)) return false;
  for (const Vec2& p : layout.bs_positions)
    if (!in_box(p)) return false;
  return spaced(layout.far_rx_positions) && spaced(layout.far_tx_positions) &&
         spaced(layout.bs_positions);
}

ChannelRealization sample_realization(const SystemConfig& config,
                                      RngStream stream) {
  Rng rng(stream);
  ChannelRealization out;
  out.users.resize(static_cast<std::size_t>(config.num_users));
  for (UserLink& link : out.users) {
    link.departure = sample_angles(config.num_paths, rng);
    link.arrival = sample_angles(config.num_paths, rng);
    link.path_gains = sample_path_gains(config.num_paths, config.rician_beta, rng);
  }
  out.relay.departure = sample_angles(config.num_paths, rng);
  out.relay.arrival = sample_angles(config.num_paths, rng);
  out.relay.path_gains =
      sample_path_gains(config.num_paths, config.rician_beta, rng);
  return out;
}

EffectiveChannel assemble(const ChannelRealization& realization,
                          const Layout& layout, const SystemConfig& config) {
  if (realization.users.size() != static_cast<std::size_t>(config.num_users)) {
    throw std::invalid_argument("assemble: user count mismatch");
  }
  if (layout.user_positions.size() != realization.users.size() ||
      layout.far_rx_positions.size() !=
          static_cast<std::size_t>(config.num_far_antennas) ||
      layout.far_tx_positions.size() !=
          static_cast<std::size_t>(config.num_far_antennas) ||
      layout.bs_positions.size() !=
          static_cast<std::size_t>(config.num_bs_antennas)) {
    throw std::invalid_argument("assemble: layout size mismatch");
  }
  EffectiveChannel out;
  out.user_to_far.reserve(realization.users.size());
  for (std::size_t k = 0; k < realization.users.size(); ++k) {
    const UserLink& link = realization.users[k];
    if (link.path_gains.cols() != link.departure.count() ||
        link.path_gains.rows() != link.arrival.count()) {
      throw std::invalid_argument("assemble: user path matrix shape mismatch");
    }
    CVec u = frv(layout.user_positions[k], link.departure);
    CMat f = frm(layout.far_rx_positions, link.arrival);
    out.user_to_far.push_back(f.adjoint() * (link.path_gains * u));
  }
  const RelayLink& relay = realization.relay;
  if (relay.path_gains.cols() != relay.departure.count() ||
      relay.path_gains.rows() != relay.arrival.count()) {
    throw std::invalid_argument("assemble: relay path matrix shape mismatch");
  }
  CMat fb = frm(layout.far_tx_positions, relay.departure);
  CMat b = frm(layout.bs_positions, relay.arrival);
  out.far_to_bs = b.adjoint() * (relay.path_gains * fb);
  out.far_to_bs_amplified = config.relay_gain * out.far_to_bs;
  return out;
}

std::string dump_realization(const ChannelRealization& realization) {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "users = %zu\n", realization.users.size());
  out += buf;
  auto dump_gains = [&out](const std::string& prefix, const CMat& m) {
    Eigen::VectorXd re(m.size());
    Eigen::VectorXd im(m.size());
    Eigen::Index idx = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r, ++idx) {
        re[idx] = m(r, c).real();
        im[idx] = m(r, c).imag();
      }
    }
    append_doubles(out, (prefix + " real").c_str(), re);
    append_doubles(out, (prefix + " imag").c_str(), im);
  };
  for (std::size_t k = 0; k < realization.users.size(); ++k) {
    std::string p = "user " + std::to_string(k);
    const UserLink& link = realization.users[k];
    append_doubles(out, (p + " departure theta").c_str(), link.departure.elevation);
    append_doubles(out, (p + " departure phi").c_str(), link.departure.azimuth);
    append_doubles(out, (p + " arrival theta").c_str(), link.arrival.elevation);
    append_doubles(out, (p + " arrival phi").c_str(), link.arrival.azimuth);
    dump_gains(p + " path_gains", link.path_gains);
  }
  append_doubles(out, "relay departure theta", realization.relay.departure.elevation);
  append_doubles(out, "relay departure phi", realization.relay.departure.azimuth);
  append_doubles(out, "relay arrival theta", realization.relay.arrival.elevation);
  append_doubles(out, "relay arrival phi", realization.relay.arrival.azimuth);
  dump_gains("relay path_gains", realization.relay.path_gains);
  return out;
}

}  // namespace farsim
