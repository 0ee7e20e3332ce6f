#include "farsim/surrogate.hpp"

#include <cmath>
#include <numbers>

namespace farsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDeltaFloor = 1e-9;

}  // namespace

CosineField CosineField::from_coefficients(const CVec& c,
                                           const Eigen::Matrix2Xd& waves_in) {
  CosineField field;
  field.waves = waves_in;
  field.amplitudes.resize(c.size());
  field.phases.resize(c.size());
  for (Eigen::Index p = 0; p < c.size(); ++p) {
    field.amplitudes[p] = std::abs(c[p]);
    field.phases[p] = field.amplitudes[p] > 0.0 ? std::arg(c[p]) : 0.0;
  }
  return field;
}

CosineField CosineField::from_coefficients(const CVec& c,
                                           const PathAngles& angles) {
  return from_coefficients(c, angles.wave_vectors());
}

double CosineField::value(const Vec2& x) const {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < amplitudes.size(); ++p) {
    sum += amplitudes[p] * std::cos(kTwoPi * waves.col(p).dot(x) - phases[p]);
  }
  return 2.0 * sum;
}

Vec2 CosineField::gradient(const Vec2& x) const {
  Vec2 grad = Vec2::Zero();
  for (Eigen::Index p = 0; p < amplitudes.size(); ++p) {
    double arg = kTwoPi * waves.col(p).dot(x) - phases[p];
    grad -= 2.0 * kTwoPi * amplitudes[p] * std::sin(arg) * waves.col(p);
  }
  return grad;
}

Eigen::Matrix2d CosineField::hessian(const Vec2& x) const {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (Eigen::Index p = 0; p < amplitudes.size(); ++p) {
    double arg = kTwoPi * waves.col(p).dot(x) - phases[p];
    h -= 2.0 * kTwoPi * kTwoPi * amplitudes[p] * std::cos(arg) *
         (waves.col(p) * waves.col(p).transpose());
  }
  return h;
}

double CosineField::curvature_bound() const {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < amplitudes.size(); ++p) {
    sum += amplitudes[p] * waves.col(p).squaredNorm();
  }
  return 2.0 * kTwoPi * kTwoPi * sum;
}

SurrogateQuadratic build_surrogate(const CosineField& field, const Vec2& x0) {
  SurrogateQuadratic s;
  s.delta = std::max(field.curvature_bound(), kDeltaFloor);
  s.expansion_point = x0;
  s.value_at_expansion = field.value(x0);
  s.gradient_at_expansion = field.gradient(x0);
  return s;
}

LinearConstraint linearize_distance(const Vec2& x0, const Vec2& other,
                                    double d0, unsigned pair_seed) {
  Vec2 base = x0;
  Vec2 diff = base - other;
  if (diff.norm() < 1e-12) {
    // Coincident points leave the direction undefined; nudge the expansion
    // point deterministically so reruns stay reproducible.
    double angle = kTwoPi * ((pair_seed % 16u) + 0.5) / 16.0;
    base += d0 * 1e-3 * Vec2(std::cos(angle), std::sin(angle));
    diff = base - other;
  }
  LinearConstraint constraint;
  constraint.normal = diff / diff.norm();
  constraint.offset = d0 + constraint.normal.dot(other);
  return constraint;
}

std::optional<DiskConstraint> gain_constraint_disk(
    const SurrogateQuadratic& surrogate, double gain_at_expansion, double floor,
    double box_size) {
  if (floor <= 0.0) return std::nullopt;  // gains are never negative
  double delta = surrogate.delta;
  Vec2 step = surrogate.gradient_at_expansion / delta;
  DiskConstraint disk;
  disk.center = surrogate.expansion_point + step;
  double slack = std::max(gain_at_expansion - floor, 0.0);
  disk.radius = std::sqrt(step.squaredNorm() + 2.0 * slack / delta);
  double dx = std::max(std::abs(disk.center.x()),
                       std::abs(box_size - disk.center.x()));
  double dy = std::max(std::abs(disk.center.y()),
                       std::abs(box_size - disk.center.y()));
  if (std::hypot(dx, dy) <= disk.radius) return std::nullopt;  // covers the box
  return disk;
}

}  // namespace farsim
