#pragma once

#include <functional>
#include <vector>

#include "farsim/channel.hpp"
#include "farsim/config.hpp"
#include "farsim/metrics.hpp"
#include "farsim/surrogate.hpp"

namespace farsim {

enum class Block { User, FarRx, FarTx, Bs };

/// Which position groups the optimizer may move. Defaults to all of them;
/// the U-FAR baseline clears `users` and `bs`.
struct BlockMask {
  bool users = true;
  bool far_rx = true;
  bool far_tx = true;
  bool bs = true;
};

/// One user's gain as a function of a single antenna position: the true gain
/// g(x) is bounded below by field.value(x) + offset, with equality at the
/// antenna's current position.
struct GainModel {
  CosineField field;        // true gain units (powers and relay gain included)
  double offset = 0.0;
  double gain_at_x0 = 0.0;  // true gain at the current layout
};

/// Builds the bound above for the gain of `user` as a function of the
/// position (block, index). For Block::User, index must equal user (moving
/// t_k only affects user k's own gain).
GainModel gain_model(const ChannelRealization& realization,
                     const Layout& layout, const SystemConfig& config,
                     Block block, int index, int user);

/// One 2-D concave-quadratic sub-problem: maximize the surrogate over the
/// region box, the spacing half-planes, and the gain-floor disks.
struct SubproblemSpec {
  SurrogateQuadratic surrogate;
  double objective_offset = 0.0;  // surrogate value + offset = true gain at x0
  double box_size = 0.0;
  std::vector<LinearConstraint> half_planes;
  std::vector<DiskConstraint> disks;
};

struct QpResult {
  Vec2 point = Vec2::Zero();
  double objective = 0.0;  // surrogate.evaluate(point) + objective_offset
  double kkt_residual = 0.0;
  bool feasible = true;  // false: constraints numerically empty, point = x0
};

/// Exact maximizer of the concave quadratic over the constraint set, found
/// by enumerating the unconstrained peak, single-constraint projections and
/// pairwise constraint intersections (complete in two dimensions). The
/// result is clamped to the box.
QpResult qp_solve_2d(const SubproblemSpec& spec);

/// Sub-problem builders for the four position groups, expanded at the
/// current layout. `k` is the objective (weakest) user; the other users'
/// gains enter as disks with floor `alpha0` where they depend on the moved
/// position. Floors already violated at the current point are relaxed to the
/// current gain; `relaxed` (when given) receives the largest such violation.
SubproblemSpec build_subproblem_user(const ChannelRealization& realization,
                                     const Layout& layout,
                                     const SystemConfig& config, int k);
SubproblemSpec build_subproblem_far_rx(const ChannelRealization& realization,
                                       const Layout& layout,
                                       const SystemConfig& config, int k, int m,
                                       double alpha0,
                                       double* relaxed = nullptr);
SubproblemSpec build_subproblem_far_tx(const ChannelRealization& realization,
                                       const Layout& layout,
                                       const SystemConfig& config, int k, int m,
                                       double alpha0,
                                       double* relaxed = nullptr);
SubproblemSpec build_subproblem_bs(const ChannelRealization& realization,
                                   const Layout& layout,
                                   const SystemConfig& config, int k, int n,
                                   double alpha0, double* relaxed = nullptr);

/// Called after every accepted antenna move with the current layout.
using LayoutObserver = std::function<void(const Layout&)>;

struct InnerResult {
  Layout layout;
  std::vector<double> objectives;  // weakest user's gain after each pass
  int passes = 0;
  bool restored = false;  // a sub-problem failed twice; best-so-far returned
};

/// Alternating pass optimizer for the weakest user's gain at fixed floor
/// alpha0 on the other users. Visits t_k, r_{U_1..M}, t_{B_1..M}, r_{1..N}
/// (as enabled by the mask), one surrogate build + QP solve each, and stops
/// when the objective's relative change drops below inner_tol or after
/// max_passes.
InnerResult alternating_optimize(const ChannelRealization& realization,
                                 const Layout& layout,
                                 const SystemConfig& config, int weakest,
                                 double alpha0, const BlockMask& mask = {},
                                 const LayoutObserver& observer = {});

struct SolveTrace {
  std::vector<double> outer_alphas;  // min gain per outer step, index 0 = initial
  std::vector<int> weakest_users;    // target of each outer iteration
  std::vector<std::vector<double>> inner_objectives;
  int outer_iterations = 0;
  int total_passes = 0;
  bool restored = false;
  double wall_ms = 0.0;
};

struct SolveResult {
  Layout layout;
  RateReport report;
  SolveTrace trace;
};

/// Deterministic feasible starting point: relay and BS antennas on a
/// corner-anchored grid with spacing max(d0, A/ceil(sqrt(count))), users at
/// the region center.
Layout initial_layout(const SystemConfig& config);

/// Outer max-min loop: repeatedly picks the weakest user, raises its gain
/// with alternating_optimize while flooring the others at the current
/// minimum, and stops when the minimum gain improves by less than
/// outer_epsilon. A candidate layout is only accepted if it does not lower
/// the minimum gain, so the alpha sequence is non-decreasing by
/// construction and the best layout seen is always returned.
SolveResult max_min_optimize(const ChannelRealization& realization,
                             const Layout& layout0, const SystemConfig& config,
                             const BlockMask& mask = {},
                             const LayoutObserver& observer = {});

/// Trace dump as CSV (outer_iter, alpha_gain, weakest_user, passes).
std::string trace_csv(const SolveTrace& trace);

}  // namespace farsim
