#include "farsim/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace farsim {

namespace {

// Shared per-layout channel quantities used by every sub-problem builder.
struct Context {
  const ChannelRealization& realization;
  const Layout& layout;
  const SystemConfig& config;
  EffectiveChannel eff;
  CMat gram_amp;                   // (F H)^H (F H), M x M
  CMat fb;                         // relay departure FRM, L x M
  CMat b;                          // BS arrival FRM, L x N
  CMat phi_mat;                    // Sigma^H B B^H Sigma, L x L
  std::vector<CVec> lambda_users;  // Sigma_k u_k, per user
  std::vector<CVec> phi_users;     // Sigma F_B h_k, per user

  Context(const ChannelRealization& r, const Layout& l, const SystemConfig& c)
      : realization(r), layout(l), config(c) {
    eff = assemble(r, l, c);
    gram_amp = eff.far_to_bs_amplified.adjoint() * eff.far_to_bs_amplified;
    fb = frm(l.far_tx_positions, r.relay.departure);
    b = frm(l.bs_positions, r.relay.arrival);
    CMat sb = r.relay.path_gains.adjoint() * b;  // L x N
    phi_mat = sb * sb.adjoint();
    lambda_users.reserve(r.users.size());
    phi_users.reserve(r.users.size());
    for (std::size_t k = 0; k < r.users.size(); ++k) {
      const UserLink& link = r.users[k];
      CVec u = frv(l.user_positions[k], link.departure);
      lambda_users.push_back(link.path_gains * u);
      phi_users.push_back(r.relay.path_gains * (fb * eff.user_to_far[k]));
    }
  }
};

const std::vector<Vec2>& group_of(const Layout& layout, Block block) {
  switch (block) {
    case Block::User:
      return layout.user_positions;
    case Block::FarRx:
      return layout.far_rx_positions;
    case Block::FarTx:
      return layout.far_tx_positions;
    case Block::Bs:
      return layout.bs_positions;
  }
  throw std::logic_error("group_of: bad block");
}

std::vector<Vec2>& group_of(Layout& layout, Block block) {
  return const_cast<std::vector<Vec2>&>(
      group_of(static_cast<const Layout&>(layout), block));
}

GainModel gain_model_ctx(const Context& ctx, Block block, int index, int user) {
  const SystemConfig& config = ctx.config;
  double p = config.power(user);
  double p2 = p * p;
  double f2 = config.relay_gain * config.relay_gain;
  const CVec& h_user = ctx.eff.user_to_far[static_cast<std::size_t>(user)];
  Vec2 x0 = group_of(ctx.layout, block)[static_cast<std::size_t>(index)];

  CVec c;
  const PathAngles* waves = nullptr;
  switch (block) {
    case Block::User: {
      // g_k(t_k) = p^2 u^H Upsilon u; tangent coefficient Upsilon u0.
      if (index != user) {
        throw std::invalid_argument(
            "gain_model: a user position only affects that user's own gain");
      }
      const UserLink& link = ctx.realization.users[static_cast<std::size_t>(user)];
      CMat f_ku = frm(ctx.layout.far_rx_positions, link.arrival);
      c = p2 * (link.path_gains.adjoint() * (f_ku * (ctx.gram_amp * h_user)));
      waves = &link.departure;
      break;
    }
    case Block::FarRx: {
      // g_i as a function of the m-th receive FRV f: the |f^H lambda|^2 term
      // is tangent-bounded, the cross terms with the other columns are
      // already linear in f.
      const UserLink& link = ctx.realization.users[static_cast<std::size_t>(user)];
      std::complex<double> a0 = h_user[index];
      std::complex<double> s = 0.0;
      for (Eigen::Index l = 0; l < h_user.size(); ++l) {
        if (l != index) s += ctx.gram_amp(index, l) * h_user[l];
      }
      std::complex<double> factor =
          ctx.gram_amp(index, index).real() * std::conj(a0) + std::conj(s);
      c = p2 * factor * ctx.lambda_users[static_cast<std::size_t>(user)];
      waves = &link.arrival;
      break;
    }
    case Block::FarTx: {
      // g_i as a function of the m-th transmit FRV f: with w the contribution
      // of the other columns, g_i = p^2 F^2 (a f + w)^H Phi (a f + w),
      // a = h_i[m]; the f^H Phi f part is tangent-bounded.
      std::complex<double> a = h_user[index];
      CVec w_rest = CVec::Zero(ctx.fb.rows());
      for (Eigen::Index l = 0; l < h_user.size(); ++l) {
        if (l != index) w_rest += h_user[l] * ctx.fb.col(l);
      }
      c = p2 * f2 *
          (std::norm(a) * (ctx.phi_mat * ctx.fb.col(index)) +
           std::conj(a) * (ctx.phi_mat * w_rest));
      waves = &ctx.realization.relay.departure;
      break;
    }
    case Block::Bs: {
      // g_i splits over BS antennas; the n-th term |b_n^H phi_i|^2 is
      // tangent-bounded, the rest is constant in r_n.
      const CVec& phi = ctx.phi_users[static_cast<std::size_t>(user)];
      std::complex<double> inner = phi.dot(ctx.b.col(index));  // phi^H b0
      c = p2 * f2 * inner * phi;
      waves = &ctx.realization.relay.arrival;
      break;
    }
  }

  GainModel model;
  model.field = CosineField::from_coefficients(c, *waves);
  model.gain_at_x0 = effective_gain(ctx.eff, user, p);
  model.offset = model.gain_at_x0 - model.field.value(x0);
  return model;
}

SubproblemSpec build_with(const Context& ctx, Block block, int index, int k,
                          double alpha0, double* relaxed) {
  const SystemConfig& config = ctx.config;
  const std::vector<Vec2>& group = group_of(ctx.layout, block);
  Vec2 x0 = group[static_cast<std::size_t>(index)];

  SubproblemSpec spec;
  GainModel objective = gain_model_ctx(ctx, block, index, k);
  spec.surrogate = build_surrogate(objective.field, x0);
  spec.objective_offset = objective.gain_at_x0 - spec.surrogate.value_at_expansion;
  spec.box_size = config.region_size;

  if (block != Block::User) {
    for (std::size_t l = 0; l < group.size(); ++l) {
      if (static_cast<int>(l) == index) continue;
      unsigned pair_seed =
          static_cast<unsigned>(index) * static_cast<unsigned>(group.size()) +
          static_cast<unsigned>(l);
      spec.half_planes.push_back(
          linearize_distance(x0, group[l], config.min_spacing, pair_seed));
    }
    if (alpha0 > 0.0) {
      for (int i = 0; i < config.num_users; ++i) {
        if (i == k) continue;
        GainModel gm = gain_model_ctx(ctx, block, index, i);
        double floor = alpha0;
        if (gm.gain_at_x0 < floor) {
          if (relaxed) *relaxed = std::max(*relaxed, floor - gm.gain_at_x0);
          floor = gm.gain_at_x0;
        }
        SurrogateQuadratic s = build_surrogate(gm.field, x0);
        if (auto disk = gain_constraint_disk(s, gm.gain_at_x0, floor,
                                             config.region_size)) {
          spec.disks.push_back(*disk);
        }
      }
    }
  }
  return spec;
}

Vec2 clamp_to_box(const Vec2& p, double a) {
  return {std::clamp(p.x(), 0.0, a), std::clamp(p.y(), 0.0, a)};
}

}  // namespace

GainModel gain_model(const ChannelRealization& realization,
                     const Layout& layout, const SystemConfig& config,
                     Block block, int index, int user) {
  Context ctx(realization, layout, config);
  return gain_model_ctx(ctx, block, index, user);
}

SubproblemSpec build_subproblem_user(const ChannelRealization& realization,
                                     const Layout& layout,
                                     const SystemConfig& config, int k) {
  Context ctx(realization, layout, config);
  return build_with(ctx, Block::User, k, k, 0.0, nullptr);
}

SubproblemSpec build_subproblem_far_rx(const ChannelRealization& realization,
                                       const Layout& layout,
                                       const SystemConfig& config, int k, int m,
                                       double alpha0, double* relaxed) {
  Context ctx(realization, layout, config);
  return build_with(ctx, Block::FarRx, m, k, alpha0, relaxed);
}

SubproblemSpec build_subproblem_far_tx(const ChannelRealization& realization,
                                       const Layout& layout,
                                       const SystemConfig& config, int k, int m,
                                       double alpha0, double* relaxed) {
  Context ctx(realization, layout, config);
  return build_with(ctx, Block::FarTx, m, k, alpha0, relaxed);
}

SubproblemSpec build_subproblem_bs(const ChannelRealization& realization,
                                   const Layout& layout,
                                   const SystemConfig& config, int k, int n,
                                   double alpha0, double* relaxed) {
  Context ctx(realization, layout, config);
  return build_with(ctx, Block::Bs, n, k, alpha0, relaxed);
}

QpResult qp_solve_2d(const SubproblemSpec& spec) {
  const double a = spec.box_size;
  const SurrogateQuadratic& s = spec.surrogate;

  std::vector<LinearConstraint> lines;
  lines.reserve(spec.half_planes.size() + 4);
  lines.push_back({Vec2(1.0, 0.0), 0.0});
  lines.push_back({Vec2(0.0, 1.0), 0.0});
  lines.push_back({Vec2(-1.0, 0.0), -a});
  lines.push_back({Vec2(0.0, -1.0), -a});
  lines.insert(lines.end(), spec.half_planes.begin(), spec.half_planes.end());
  const std::vector<DiskConstraint>& disks = spec.disks;

  // Maximizing the concave quadratic over a convex set is the Euclidean
  // projection of its unconstrained peak onto the set. In 2-D the projection
  // is the peak itself, the projection onto a single boundary, or a pairwise
  // boundary intersection, so enumerating those candidates is exact.
  Vec2 xu = s.expansion_point + s.gradient_at_expansion / s.delta;

  auto feasible = [&](const Vec2& p) {
    for (const LinearConstraint& line : lines) {
      if (line.slack(p) < -1e-9) return false;
    }
    for (const DiskConstraint& disk : disks) {
      if (disk.slack(p) < -1e-9 * std::max(1.0, disk.radius)) return false;
    }
    return true;
  };

  std::vector<Vec2> cands;
  cands.reserve(16 + lines.size() * lines.size() + 4 * disks.size() * disks.size());
  cands.push_back(xu);
  cands.push_back(s.expansion_point);
  for (const LinearConstraint& line : lines) {
    cands.push_back(xu - line.slack(xu) * line.normal);
  }
  for (const DiskConstraint& disk : disks) {
    Vec2 d = xu - disk.center;
    double n = d.norm();
    if (n > 1e-15) cands.push_back(disk.center + (disk.radius / n) * d);
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Vec2& n1 = lines[i].normal;
      const Vec2& n2 = lines[j].normal;
      double det = n1.x() * n2.y() - n1.y() * n2.x();
      if (std::abs(det) < 1e-12) continue;
      double b1 = lines[i].offset;
      double b2 = lines[j].offset;
      cands.emplace_back((b1 * n2.y() - b2 * n1.y()) / det,
                         (n1.x() * b2 - n2.x() * b1) / det);
    }
  }
  for (const LinearConstraint& line : lines) {
    for (const DiskConstraint& disk : disks) {
      Vec2 q = disk.center - line.slack(disk.center) * line.normal;
      double h2 = disk.radius * disk.radius - (q - disk.center).squaredNorm();
      if (h2 < -1e-12 * std::max(1.0, disk.radius * disk.radius)) continue;
      double h = std::sqrt(std::max(h2, 0.0));
      Vec2 dir(-line.normal.y(), line.normal.x());
      cands.push_back(q + h * dir);
      cands.push_back(q - h * dir);
    }
  }
  for (std::size_t i = 0; i < disks.size(); ++i) {
    for (std::size_t j = i + 1; j < disks.size(); ++j) {
      Vec2 z1 = disks[i].center;
      Vec2 z2 = disks[j].center;
      double r1 = disks[i].radius;
      double r2 = disks[j].radius;
      Vec2 d = z2 - z1;
      double dist = d.norm();
      if (dist < 1e-15) continue;
      // (r1^2 - r2^2) factored to avoid cancellation with large radii.
      double t = (dist * dist + (r1 - r2) * (r1 + r2)) / (2.0 * dist);
      double h2 = r1 * r1 - t * t;
      if (h2 < -1e-12 * std::max(1.0, r1 * r1)) continue;
      double h = std::sqrt(std::max(h2, 0.0));
      Vec2 unit = d / dist;
      Vec2 base = z1 + t * unit;
      Vec2 perp(-unit.y(), unit.x());
      cands.push_back(base + h * perp);
      cands.push_back(base - h * perp);
    }
  }

  const Vec2* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Vec2& cand : cands) {
    if (!feasible(cand)) continue;
    double dist = (cand - xu).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = &cand;
    }
  }

  QpResult result;
  if (!best) {
    result.point = clamp_to_box(s.expansion_point, a);
    result.objective = s.evaluate(result.point) + spec.objective_offset;
    result.kkt_residual = std::numeric_limits<double>::infinity();
    result.feasible = false;
    return result;
  }
  result.point = clamp_to_box(*best, a);
  result.objective = s.evaluate(result.point) + spec.objective_offset;

  // Stationarity residual of the equivalent projection problem
  // min 1/2 ||x - xu||^2: how far x* - xu is from the cone spanned by the
  // active constraint gradients. In 2-D a subset of at most two active
  // gradients suffices.
  std::vector<Vec2> grads;
  for (const LinearConstraint& line : lines) {
    if (std::abs(line.slack(result.point)) <= 1e-7) grads.push_back(line.normal);
  }
  for (const DiskConstraint& disk : disks) {
    if (std::abs(disk.slack(result.point)) <= 1e-7 * std::max(1.0, disk.radius)) {
      Vec2 d = result.point - disk.center;
      double n = d.norm();
      if (n > 1e-15) grads.push_back(-d / n);
    }
  }
  Vec2 y = result.point - xu;
  double best_resid = y.norm();
  for (std::size_t i = 0; i < grads.size(); ++i) {
    double mu = std::max(0.0, y.dot(grads[i]) / grads[i].squaredNorm());
    best_resid = std::min(best_resid, (y - mu * grads[i]).norm());
    for (std::size_t j = i + 1; j < grads.size(); ++j) {
      double g11 = grads[i].squaredNorm();
      double g12 = grads[i].dot(grads[j]);
      double g22 = grads[j].squaredNorm();
      double det = g11 * g22 - g12 * g12;
      if (std::abs(det) < 1e-14) continue;
      double y1 = y.dot(grads[i]);
      double y2 = y.dot(grads[j]);
      double mu1 = (g22 * y1 - g12 * y2) / det;
      double mu2 = (g11 * y2 - g12 * y1) / det;
      if (mu1 >= 0.0 && mu2 >= 0.0) {
        best_resid = std::min(
            best_resid, (y - mu1 * grads[i] - mu2 * grads[j]).norm());
      }
    }
  }
  result.kkt_residual = best_resid;
  return result;
}

Layout initial_layout(const SystemConfig& config) {
  Layout layout;
  double a = config.region_size;
  auto grid = [&config, a](int count) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(count));
    int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    double spacing = std::max(config.min_spacing, a / cols);
    for (int i = 0; i < count; ++i) {
      pts.emplace_back((i % cols) * spacing, (i / cols) * spacing);
    }
    return pts;
  };
  layout.user_positions.assign(static_cast<std::size_t>(config.num_users),
                               Vec2(a / 2.0, a / 2.0));
  layout.far_rx_positions = grid(config.num_far_antennas);
  layout.far_tx_positions = grid(config.num_far_antennas);
  layout.bs_positions = grid(config.num_bs_antennas);
  return layout;
}

InnerResult alternating_optimize(const ChannelRealization& realization,
                                 const Layout& layout,
                                 const SystemConfig& config, int weakest,
                                 double alpha0, const BlockMask& mask,
                                 const LayoutObserver& observer) {
  InnerResult res;
  res.layout = layout;

  auto objective = [&]() {
    EffectiveChannel eff = assemble(realization, res.layout, config);
    return effective_gain(eff, weakest, config.power(weakest));
  };
  double prev = objective();
  std::map<int, int> failures;

  for (int pass = 0; pass < config.solver.max_passes; ++pass) {
    bool aborted = false;
    auto process = [&](Block block, int index) {
      double relaxed = 0.0;
      Context ctx(realization, res.layout, config);
      SubproblemSpec sp = build_with(ctx, block, index, weakest, alpha0, &relaxed);
      QpResult qp = qp_solve_2d(sp);
      bool failed = !qp.feasible || relaxed > 1e-6;
      if (failed) {
        int id = static_cast<int>(block) * 1000 + index;
        if (++failures[id] >= 2) {
          res.restored = true;
          aborted = true;
          return;
        }
      }
      if (qp.feasible) {
        group_of(res.layout, block)[static_cast<std::size_t>(index)] = qp.point;
      }
      if (observer) observer(res.layout);
    };

    if (mask.users && !aborted) process(Block::User, weakest);
    if (mask.far_rx) {
      for (int m = 0; m < config.num_far_antennas && !aborted; ++m) {
        process(Block::FarRx, m);
      }
    }
    if (mask.far_tx) {
      for (int m = 0; m < config.num_far_antennas && !aborted; ++m) {
        process(Block::FarTx, m);
      }
    }
    if (mask.bs) {
      for (int n = 0; n < config.num_bs_antennas && !aborted; ++n) {
        process(Block::Bs, n);
      }
    }
    if (aborted) break;

    res.passes = pass + 1;
    double obj = objective();
    res.objectives.push_back(obj);
    double denom = std::max({std::abs(prev), std::abs(obj), 1e-12});
    bool converged = std::abs(obj - prev) <= config.solver.inner_tol * denom;
    prev = obj;
    if (converged) break;
  }
  return res;
}

SolveResult max_min_optimize(const ChannelRealization& realization,
                             const Layout& layout0, const SystemConfig& config,
                             const BlockMask& mask,
                             const LayoutObserver& observer) {
  auto start = std::chrono::steady_clock::now();

  SolveResult result;
  result.layout = layout0;
  result.report = rate_report(assemble(realization, layout0, config), config);
  double alpha = result.report.min_gain;

  SolveTrace& trace = result.trace;
  trace.outer_alphas.push_back(alpha);

  double prev_alpha = 0.0;
  for (int iter = 1; iter <= config.solver.max_outer; ++iter) {
    if (!(alpha - prev_alpha >= config.solver.outer_epsilon)) break;
    prev_alpha = alpha;

    int weakest = result.report.min_index;
    InnerResult inner = alternating_optimize(realization, result.layout, config,
                                             weakest, alpha, mask, observer);
    trace.weakest_users.push_back(weakest);
    trace.inner_objectives.push_back(inner.objectives);
    trace.total_passes += inner.passes;
    trace.restored = trace.restored || inner.restored;
    trace.outer_iterations = iter;

    RateReport candidate =
        rate_report(assemble(realization, inner.layout, config), config);
    // Keep the best iterate: a candidate that lowers the minimum gain is
    // discarded, which also ends the loop (no improvement to continue on).
    if (candidate.min_gain >= alpha) {
      result.layout = inner.layout;
      result.report = candidate;
      alpha = candidate.min_gain;
    }
    trace.outer_alphas.push_back(alpha);
  }

  auto end = std::chrono::steady_clock::now();
  trace.wall_ms =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
          end - start)
          .count();
  return result;
}

std::string trace_csv(const SolveTrace& trace) {
  std::string out = "outer_iter,alpha_gain,weakest_user,passes\n";
  char buf[128];
  for (std::size_t i = 0; i < trace.outer_alphas.size(); ++i) {
    int weakest = i == 0 ? -1 : trace.weakest_users[i - 1];
    int passes =
        i == 0 ? 0 : static_cast<int>(trace.inner_objectives[i - 1].size());
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%d,%d\n", i,
                  trace.outer_alphas[i], weakest, passes);
    out += buf;
  }
  return out;
}

}  // namespace farsim
