#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "farsim/config.hpp"
#include "farsim/rng.hpp"

namespace farsim {

using Vec2 = Eigen::Vector2d;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Per-path propagation directions of one link end, all in [0, pi].
struct PathAngles {
  Eigen::VectorXd elevation;  // theta
  Eigen::VectorXd azimuth;    // phi

  int count() const { return static_cast<int>(elevation.size()); }
  /// 2 x L matrix whose column p is wave_vector(theta_p, phi_p).
  Eigen::Matrix2Xd wave_vectors() const;
};

/// One user -> relay link: departure paths at the user FA, arrival paths at
/// the relay receive side, and the L x L path gain coupling between them.
struct UserLink {
  PathAngles departure;
  PathAngles arrival;
  CMat path_gains;  // diagonal when sampled, general shape supported
};

/// The relay -> BS hop.
struct RelayLink {
  PathAngles departure;  // at the relay transmit side
  PathAngles arrival;    // at the BS
  CMat path_gains;
};

struct ChannelRealization {
  std::vector<UserLink> users;
  RelayLink relay;

  /// Order-sensitive digest of all angles and path gains; used to confirm
  /// that paired schemes consumed the identical realization.
  std::uint64_t hash() const;
};

/// All optimizable antenna positions, wavelength units, each inside its own
/// [0, A]^2 region.
struct Layout {
  std::vector<Vec2> user_positions;    // t_k, one FA per user
  std::vector<Vec2> far_rx_positions;  // relay receive side r_{U_m}
  std::vector<Vec2> far_tx_positions;  // relay transmit side t_{B_m}
  std::vector<Vec2> bs_positions;      // r_n
};

/// Assembled two-hop channel for fixed positions.
struct EffectiveChannel {
  std::vector<CVec> user_to_far;  // h_k, length M each
  CMat far_to_bs;                 // H, N x M
  CMat far_to_bs_amplified;       // F * H
};

/// [sin(theta)cos(phi), cos(theta)]; norm <= 1.
Vec2 wave_vector(double theta, double phi);

/// exp(j * 2*pi * n^T position); unit modulus by construction.
std::complex<double> phase_response(const Vec2& position, const Vec2& n);

/// Field response vector: entry p is the phase response along path p.
CVec frv(const Vec2& position, const PathAngles& angles);

/// Elementwise derivative of frv with respect to position coordinate `axis`:
/// entry p is j * 2*pi * n_p[axis] * frv_p.
CVec frv_derivative(const Vec2& position, const PathAngles& angles, int axis);

/// Field response matrix: column m is frv(positions[m], angles).
CMat frm(const std::vector<Vec2>& positions, const PathAngles& angles);

/// Checks boxes and pairwise spacings within the relay-rx, relay-tx and BS
/// groups. `box_tol` loosens the region boxes, `spacing_tol` lowers the
/// distance floors to d0 - spacing_tol.
bool layout_feasible(const Layout& layout, const SystemConfig& config,
                     double box_tol = 0.0, double spacing_tol = 0.0);

/// i.i.d. angles uniform on [0, pi]; diagonal path gains with LoS variance
/// beta/(beta+1) and each of the L-1 NLoS entries 1/((beta+1)(L-1)).
/// Deterministic in (seed, stream).
ChannelRealization sample_realization(const SystemConfig& config,
                                      RngStream stream);

/// h_k = F_{k,U}(R_U)^H Sigma_k u_k(t_k); H = B(R)^H Sigma F_B(T_B);
/// amplified = relay_gain * H.
EffectiveChannel assemble(const ChannelRealization& realization,
                          const Layout& layout, const SystemConfig& config);

/// Structured text dump (angles and path gain diagonals) for
/// cross-implementation comparison.
std::string dump_realization(const ChannelRealization& realization);

}  // namespace farsim
