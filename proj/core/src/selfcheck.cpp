#include "farsim/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numbers>

#include "farsim/baselines.hpp"
#include "farsim/channel.hpp"
#include "farsim/metrics.hpp"
#include "farsim/rng.hpp"
#include "farsim/solver.hpp"
#include "farsim/surrogate.hpp"

namespace farsim {

namespace {

constexpr double kPi = std::numbers::pi;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration_cast<std::chrono::duration<double>>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

PathAngles random_angles(int paths, Rng& rng) {
  PathAngles a;
  a.elevation.resize(paths);
  a.azimuth.resize(paths);
  for (int p = 0; p < paths; ++p) a.elevation[p] = rng.uniform(0.0, kPi);
  for (int p = 0; p < paths; ++p) a.azimuth[p] = rng.uniform(0.0, kPi);
  return a;
}

}  // namespace

CheckResult check_channel_statistics(int samples, std::uint64_t seed) {
  Timer timer;
  SystemConfig config;
  config.num_users = 1;
  config.max_power = {1.0};
  // Each realization carries two path matrices (user link and relay link).
  int realizations = (samples + 1) / 2;
  Eigen::VectorXd power_sums = Eigen::VectorXd::Zero(config.num_paths);
  long long count = 0;
  for (int i = 0; i < realizations; ++i) {
    ChannelRealization r = sample_realization(
        config, {seed, static_cast<std::uint64_t>(i)});
    for (int p = 0; p < config.num_paths; ++p) {
      power_sums[p] += std::norm(r.users[0].path_gains(p, p));
      power_sums[p] += std::norm(r.relay.path_gains(p, p));
    }
    count += 2;
  }
  Eigen::VectorXd variances = power_sums / static_cast<double>(count);

  double los_target = config.rician_beta / (config.rician_beta + 1.0);
  double nlos_target =
      1.0 / ((config.rician_beta + 1.0) * (config.num_paths - 1));
  bool pass = std::abs(variances[0] - los_target) <= 0.02 * los_target;
  double worst_nlos = 0.0;
  for (int p = 1; p < config.num_paths; ++p) {
    double rel = std::abs(variances[p] - nlos_target) / nlos_target;
    worst_nlos = std::max(worst_nlos, rel);
    pass = pass && rel <= 0.03;
  }

  CheckResult result;
  result.name = "channel statistics";
  result.passed = pass;
  result.detail = format(
      "LoS var %.5f (target %.5f, tol 2%%), worst NLoS rel dev %.4f (tol 3%%), "
      "%lld matrices",
      variances[0], los_target, worst_nlos, count);
  result.elapsed_s = timer.seconds();
  return result;
}

CheckResult check_gain_ordering(int instances, std::uint64_t seed) {
  Timer timer;
  int failures = 0;
  for (int i = 0; i < instances; ++i) {
    Rng rng({seed, 2 * static_cast<std::uint64_t>(i)});
    SystemConfig config;
    config.num_users = 1 + static_cast<int>(rng.raw() % 4);
    config.num_far_antennas = 1 + static_cast<int>(rng.raw() % 4);
    config.num_bs_antennas = 1 + static_cast<int>(rng.raw() % 5);
    config.num_paths = 2 + static_cast<int>(rng.raw() % 3);
    config.max_power.assign(static_cast<std::size_t>(config.num_users), 1.0);
    ChannelRealization realization = sample_realization(
        config, {seed, 2 * static_cast<std::uint64_t>(i) + 1});

    Layout layout;
    auto random_positions = [&](int count) {
      std::vector<Vec2> pts;
      for (int p = 0; p < count; ++p) {
        pts.emplace_back(rng.uniform(0.0, config.region_size),
                         rng.uniform(0.0, config.region_size));
      }
      return pts;
    };
    layout.user_positions = random_positions(config.num_users);
    layout.far_rx_positions = random_positions(config.num_far_antennas);
    layout.far_tx_positions = random_positions(config.num_far_antennas);
    layout.bs_positions = random_positions(config.num_bs_antennas);

    std::vector<double> powers(static_cast<std::size_t>(config.num_users));
    for (double& p : powers) p = rng.uniform(0.1, 2.0);
    double sigma2 = rng.uniform(0.01, 10.0);

    EffectiveChannel channel = assemble(realization, layout, config);
    RateReport report = rate_report(channel, powers, sigma2);

    auto argmin = [](const Eigen::VectorXd& v) {
      int best = 0;
      for (Eigen::Index k = 1; k < v.size(); ++k) {
        if (v[k] < v[best]) best = static_cast<int>(k);
      }
      return best;
    };
    bool ok = argmin(report.rates) == report.min_index &&
              argmin(report.sinrs) == report.min_index &&
              argmin(report.gains) == report.min_index;
    for (Eigen::Index m = 0; m < report.gains.size() && ok; ++m) {
      for (Eigen::Index n = m + 1; n < report.gains.size() && ok; ++n) {
        ok = ((report.sinrs[m] < report.sinrs[n]) ==
              (report.gains[m] < report.gains[n])) &&
             ((report.sinrs[m] > report.sinrs[n]) ==
              (report.gains[m] > report.gains[n]));
      }
    }
    if (!ok) ++failures;
  }

  CheckResult result;
  result.name = "gain ordering";
  result.passed = failures == 0;
  result.detail =
      format("%d instances, %d ordering mismatches", instances, failures);
  result.elapsed_s = timer.seconds();
  return result;
}

CheckResult check_surrogate_certification(int instances, std::uint64_t seed) {
  Timer timer;
  int failures = 0;
  double worst_tight = 0.0;
  double worst_bound = 0.0;
  double worst_eig = 0.0;
  double worst_grad = 0.0;
  const double box = 4.0;
  for (int i = 0; i < instances; ++i) {
    Rng rng({seed, static_cast<std::uint64_t>(i)});
    const int paths = 4;
    PathAngles angles = random_angles(paths, rng);
    double scale = std::exp(rng.uniform(-2.0, 2.0));
    CVec c(paths);
    for (int p = 0; p < paths; ++p) c[p] = rng.complex_gaussian(scale);
    Vec2 x0(rng.uniform(0.0, box), rng.uniform(0.0, box));

    CosineField field = CosineField::from_coefficients(c, angles);
    SurrogateQuadratic surrogate = build_surrogate(field, x0);

    bool ok = true;
    double tight = std::abs(surrogate.evaluate(x0) - field.value(x0));
    worst_tight = std::max(worst_tight, tight);
    ok = ok && tight <= 1e-12;

    for (int s = 0; s < 1000; ++s) {
      Vec2 x(rng.uniform(0.0, box), rng.uniform(0.0, box));
      double slack = field.value(x) - surrogate.evaluate(x);
      worst_bound = std::min(worst_bound, slack);
      ok = ok && slack >= -1e-9;
    }

    const double h = 5e-5;
    for (int s = 0; s < 100; ++s) {
      Vec2 x(rng.uniform(0.0, box), rng.uniform(0.0, box));
      auto f = [&](double dx, double dy) {
        return field.value(x + Vec2(dx, dy));
      };
      double f0 = f(0.0, 0.0);
      double h00 = (f(h, 0.0) - 2.0 * f0 + f(-h, 0.0)) / (h * h);
      double h11 = (f(0.0, h) - 2.0 * f0 + f(0.0, -h)) / (h * h);
      double h01 =
          (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
      double mean = 0.5 * (h00 + h11);
      double spread = std::sqrt(0.25 * (h00 - h11) * (h00 - h11) + h01 * h01);
      double eig_max = mean + spread;
      worst_eig = std::max(worst_eig, eig_max - surrogate.delta);
      ok = ok && eig_max <= surrogate.delta;
    }

    const double hg = 1e-6;
    for (int s = 0; s < 6; ++s) {
      Vec2 x = s == 0 ? x0 : Vec2(rng.uniform(0.0, box), rng.uniform(0.0, box));
      Vec2 analytic = field.gradient(x);
      Vec2 fd((field.value(x + Vec2(hg, 0)) - field.value(x - Vec2(hg, 0))) /
                  (2.0 * hg),
              (field.value(x + Vec2(0, hg)) - field.value(x - Vec2(0, hg))) /
                  (2.0 * hg));
      double rel = (analytic - fd).norm() / std::max(1.0, analytic.norm());
      worst_grad = std::max(worst_grad, rel);
      ok = ok && rel <= 1e-5;
    }

    if (!ok) ++failures;
  }

  CheckResult result;
  result.name = "surrogate certification";
  result.passed = failures == 0;
  result.detail = format(
      "%d instances, %d failures; worst tightness %.2e, bound slack %.2e, "
      "eig excess %.2e, grad rel err %.2e",
      instances, failures, worst_tight, worst_bound, worst_eig, worst_grad);
  result.elapsed_s = timer.seconds();
  return result;
}

CheckResult check_qp_against_grid(int instances, std::uint64_t seed) {
  Timer timer;
  int failures = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < instances; ++i) {
    Rng rng({seed, static_cast<std::uint64_t>(i)});
    double box = rng.uniform(2.0, 5.0);
    const double d0 = 0.5;
    const int paths = 4;
    PathAngles angles = random_angles(paths, rng);
    double scale = std::exp(rng.uniform(-3.0, 2.0));
    CVec c(paths);
    for (int p = 0; p < paths; ++p) c[p] = rng.complex_gaussian(scale);
    Vec2 x0(rng.uniform(0.0, box), rng.uniform(0.0, box));

    SubproblemSpec spec;
    CosineField field = CosineField::from_coefficients(c, angles);
    spec.surrogate = build_surrogate(field, x0);
    spec.box_size = box;
    int half_planes = static_cast<int>(rng.raw() % 4);
    for (int p = 0; p < half_planes; ++p) {
      double angle = rng.uniform(0.0, 2.0 * kPi);
      double dist = rng.uniform(d0, d0 + 1.0);
      Vec2 other = x0 + dist * Vec2(std::cos(angle), std::sin(angle));
      spec.half_planes.push_back(
          linearize_distance(x0, other, d0, static_cast<unsigned>(p)));
    }
    int disk_count = static_cast<int>(rng.raw() % 4);
    for (int p = 0; p < disk_count; ++p) {
      double angle = rng.uniform(0.0, 2.0 * kPi);
      double off = rng.uniform(0.0, 0.8);
      DiskConstraint disk;
      disk.center = x0 + off * Vec2(std::cos(angle), std::sin(angle));
      disk.radius = off + rng.uniform(0.05, 2.0);
      spec.disks.push_back(disk);
    }

    QpResult qp = qp_solve_2d(spec);

    // Dense grid search. Per row the feasible x form an interval, and the
    // objective is concave in x, so only the grid points nearest the
    // projected peak need evaluating; this visits the exact same maximum a
    // full scan would.
    double h = 1e-3 * box;
    const int steps = 1000;
    Vec2 xu = spec.surrogate.expansion_point +
              spec.surrogate.gradient_at_expansion / spec.surrogate.delta;
    double best = -std::numeric_limits<double>::infinity();
    for (int iy = 0; iy <= steps; ++iy) {
      double y = iy * h;
      double lo = 0.0;
      double hi = box;
      bool empty = false;
      for (const LinearConstraint& line : spec.half_planes) {
        double nx = line.normal.x();
        double rest = line.offset - line.normal.y() * y;
        if (std::abs(nx) < 1e-14) {
          if (rest > 0.0) empty = true;
        } else if (nx > 0.0) {
          lo = std::max(lo, rest / nx);
        } else {
          hi = std::min(hi, rest / nx);
        }
      }
      for (const DiskConstraint& disk : spec.disks) {
        double dy = y - disk.center.y();
        double rem = disk.radius * disk.radius - dy * dy;
        if (rem < 0.0) {
          empty = true;
          break;
        }
        double half = std::sqrt(rem);
        lo = std::max(lo, disk.center.x() - half);
        hi = std::min(hi, disk.center.x() + half);
      }
      if (empty || lo > hi) continue;
      int ix_lo = static_cast<int>(std::ceil(lo / h - 1e-9));
      int ix_hi = static_cast<int>(std::floor(hi / h + 1e-9));
      ix_lo = std::max(ix_lo, 0);
      ix_hi = std::min(ix_hi, steps);
      if (ix_lo > ix_hi) continue;
      int ix_c = static_cast<int>(std::lround(xu.x() / h));
      ix_c = std::clamp(ix_c, ix_lo, ix_hi);
      for (int ix = std::max(ix_lo, ix_c - 1);
           ix <= std::min(ix_hi, ix_c + 1); ++ix) {
        best = std::max(best, spec.surrogate.evaluate(Vec2(ix * h, y)));
      }
    }

    double gap = best - qp.objective;
    worst_gap = std::max(worst_gap, gap);
    bool ok = qp.feasible && gap <= 1e-4 && qp.kkt_residual < 1e-8;
    if (!ok) ++failures;
  }

  CheckResult result;
  result.name = "qp vs grid search";
  result.passed = failures == 0;
  result.detail = format("%d instances, %d failures, worst grid - qp gap %.3e",
                         instances, failures, worst_gap);
  result.elapsed_s = timer.seconds();
  return result;
}

CheckResult check_sca_monotonicity(int instances, std::uint64_t seed) {
  Timer timer;
  int failures = 0;
  long long layouts_checked = 0;
  long long layout_violations = 0;
  double worst_alpha_drop = 0.0;
  for (int i = 0; i < instances; ++i) {
    SystemConfig config;
    ChannelRealization realization = sample_realization(
        config, {seed, static_cast<std::uint64_t>(i)});
    long long local_violations = 0;
    LayoutObserver observer = [&](const Layout& layout) {
      ++layouts_checked;
      if (!layout_feasible(layout, config, 0.0, 1e-9)) ++local_violations;
    };
    SolveResult solved = max_min_optimize(realization, initial_layout(config),
                                          config, BlockMask{}, observer);
    bool ok = local_violations == 0;
    const std::vector<double>& alphas = solved.trace.outer_alphas;
    for (std::size_t a = 1; a < alphas.size(); ++a) {
      double drop = alphas[a - 1] - alphas[a];
      worst_alpha_drop = std::max(worst_alpha_drop, drop);
      ok = ok && drop <= 1e-9;
    }
    ok = ok && solved.report.min_gain >= alphas.front() - 1e-9;
    layout_violations += local_violations;
    if (!ok) ++failures;
  }

  CheckResult result;
  result.name = "sca monotonicity and feasibility";
  result.passed = failures == 0;
  result.detail = format(
      "%d runs, %d failures; %lld intermediate layouts checked, %lld "
      "infeasible; worst alpha drop %.2e",
      instances, failures, layouts_checked, layout_violations,
      worst_alpha_drop);
  result.elapsed_s = timer.seconds();
  return result;
}

std::vector<CheckResult> run_selftests(std::uint64_t seed) {
  return {
      check_channel_statistics(100000, seed),
      check_gain_ordering(1000, seed + 1),
      check_surrogate_certification(200, seed + 2),
      check_qp_against_grid(200, seed + 3),
  };
}

std::string format_check(const CheckResult& result) {
  return format("%-34s %s  (%s) [%.2f s]", result.name.c_str(),
                result.passed ? "PASS" : "FAIL", result.detail.c_str(),
                result.elapsed_s);
}

}  // namespace farsim
