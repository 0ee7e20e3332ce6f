#pragma once

#include <optional>

#include <Eigen/Dense>

#include "farsim/channel.hpp"

namespace farsim {

/// upsilon(x) = 2 * sum_p a_p * cos(2*pi * n_p^T x - psi_p): the real part of
/// a coefficient vector paired with a field response vector, as a smooth
/// function of the antenna position x. Every position sub-problem objective
/// and gain bound reduces to this form.
struct CosineField {
  Eigen::Matrix2Xd waves;      // column p = n_p
  Eigen::VectorXd amplitudes;  // a_p = |c_p|
  Eigen::VectorXd phases;      // psi_p = arg c_p

  /// Field for upsilon(x) = 2 * Re{ c^H v(x) } with v the FRV at x.
  static CosineField from_coefficients(const CVec& c,
                                       const Eigen::Matrix2Xd& waves);
  static CosineField from_coefficients(const CVec& c, const PathAngles& angles);

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  Eigen::Matrix2d hessian(const Vec2& x) const;
  /// 8*pi^2 * sum_p a_p * ||n_p||^2, an upper bound on the largest Hessian
  /// eigenvalue at every x. Zero for an empty or zero field.
  double curvature_bound() const;
};

/// Concave quadratic s(x) = v0 + g0^T (x - x0) - (delta/2) ||x - x0||^2 kept
/// in expansion-centered form so s(x0) reproduces v0 without cancellation.
struct SurrogateQuadratic {
  double delta = 0.0;
  Vec2 expansion_point = Vec2::Zero();
  double value_at_expansion = 0.0;
  Vec2 gradient_at_expansion = Vec2::Zero();

  double evaluate(const Vec2& x) const {
    Vec2 d = x - expansion_point;
    return value_at_expansion + gradient_at_expansion.dot(d) -
           0.5 * delta * d.squaredNorm();
  }
  /// Coefficients of the equivalent decomposed form
  /// -(delta/2) x^T x + linear^T x + constant.
  Vec2 linear() const { return gradient_at_expansion + delta * expansion_point; }
  double constant() const {
    return value_at_expansion - gradient_at_expansion.dot(expansion_point) -
           0.5 * delta * expansion_point.squaredNorm();
  }
};

/// Builds the curvature-certified global lower bound of `field` around x0:
/// s(x) <= upsilon(x) everywhere, s(x0) = upsilon(x0). delta is floored at
/// 1e-9 so the quadratic stays strictly concave when the field vanishes.
SurrogateQuadratic build_surrogate(const CosineField& field, const Vec2& x0);

/// Satisfied when normal^T x >= offset. `normal` is unit length.
struct LinearConstraint {
  Vec2 normal = Vec2::UnitX();
  double offset = 0.0;

  double slack(const Vec2& x) const { return normal.dot(x) - offset; }
};

/// Satisfied when ||x - center|| <= radius.
struct DiskConstraint {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;

  double slack(const Vec2& x) const { return radius - (x - center).norm(); }
};

/// Inner linearization of ||x - other|| >= d0 at x0: the half-plane
/// (x0-other)^T (x-other) / ||x0-other|| >= d0, whose points all satisfy the
/// true distance constraint. When x0 coincides with `other`, x0 is nudged by
/// d0*1e-3 in a direction derived from pair_seed before linearizing.
LinearConstraint linearize_distance(const Vec2& x0, const Vec2& other,
                                    double d0, unsigned pair_seed = 0);

/// Level set {x : s(x) + (gain_at_expansion - s(x0)) >= floor} of a gain's
/// quadratic surrogate, which is a disk centered at x0 + grad/delta. Any
/// point of the disk keeps the true gain at or above `floor`. Returns
/// nullopt when the constraint cannot bind: floor <= 0 (gains are
/// nonnegative) or the disk contains the whole [0, box_size]^2 box.
/// Requires gain_at_expansion >= floor so the expansion point stays feasible.
std::optional<DiskConstraint> gain_constraint_disk(
    const SurrogateQuadratic& surrogate, double gain_at_expansion, double floor,
    double box_size);

}  // namespace farsim
