#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "farsim/rng.hpp"
#include "farsim/surrogate.hpp"

using namespace farsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Instance {
  CosineField field;
  Vec2 x0;
};

Instance random_instance(Rng& rng, int paths, double box) {
  CVec c(paths);
  PathAngles angles;
  angles.elevation = Eigen::VectorXd(paths);
  angles.azimuth = Eigen::VectorXd(paths);
  for (int p = 0; p < paths; ++p) {
    c[p] = rng.complex_gaussian(std::exp(rng.uniform(-2.0, 2.0)));
    angles.elevation[p] = rng.uniform(0.0, kPi);
    angles.azimuth[p] = rng.uniform(0.0, kPi);
  }
  Instance inst;
  inst.field = CosineField::from_coefficients(c, angles);
  inst.x0 = Vec2(rng.uniform(0.0, box), rng.uniform(0.0, box));
  return inst;
}

}  // namespace

TEST_CASE("cosine field closed forms") {
  SUBCASE("zero coefficients give the zero field") {
    CVec c = CVec::Zero(3);
    Eigen::Matrix2Xd waves = Eigen::Matrix2Xd::Random(2, 3);
    CosineField field = CosineField::from_coefficients(c, waves);
    CHECK(field.value(Vec2(0.3, 0.4)) == 0.0);
    CHECK(field.gradient(Vec2(0.3, 0.4)).norm() == 0.0);
    CHECK(field.curvature_bound() == 0.0);
  }
  SUBCASE("single unit path at the cosine peak") {
    CVec c(1);
    c[0] = 1.0;
    Eigen::Matrix2Xd waves(2, 1);
    waves << 1.0, 0.0;
    CosineField field = CosineField::from_coefficients(c, waves);
    CHECK(field.value(Vec2(0.0, 0.0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(field.gradient(Vec2(0.0, 0.0)).norm() ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(field.curvature_bound() ==
          doctest::Approx(8.0 * kPi * kPi).epsilon(1e-12));
  }
  SUBCASE("value equals 2 Re{c^H frv}") {
    Rng rng({21, 0});
    for (int t = 0; t < 20; ++t) {
      CVec c(4);
      PathAngles angles;
      angles.elevation = Eigen::VectorXd(4);
      angles.azimuth = Eigen::VectorXd(4);
      for (int p = 0; p < 4; ++p) {
        c[p] = rng.complex_gaussian(1.0);
        angles.elevation[p] = rng.uniform(0.0, kPi);
        angles.azimuth[p] = rng.uniform(0.0, kPi);
      }
      CosineField field = CosineField::from_coefficients(c, angles);
      Vec2 x(rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0));
      double direct = 2.0 * (c.adjoint() * frv(x, angles))[0].real();
      CHECK(field.value(x) == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("gradients match central finite differences") {
  Rng rng({22, 0});
  for (int t = 0; t < 50; ++t) {
    Instance inst = random_instance(rng, 4, 4.0);
    Vec2 g = inst.field.gradient(inst.x0);
    const double h = 1e-6;
    for (int axis = 0; axis < 2; ++axis) {
      Vec2 lo = inst.x0, hi = inst.x0;
      lo[axis] -= h;
      hi[axis] += h;
      double fd = (inst.field.value(hi) - inst.field.value(lo)) / (2.0 * h);
      CHECK(std::abs(fd - g[axis]) / std::max(1.0, g.norm()) < 1e-5);
    }
  }
}

TEST_CASE("curvature bound dominates the numerical Hessian") {
  Rng rng({23, 0});
  for (int t = 0; t < 30; ++t) {
    Instance inst = random_instance(rng, 4, 4.0);
    double delta = inst.field.curvature_bound();
    for (int s = 0; s < 40; ++s) {
      Vec2 x(rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0));
      Eigen::Matrix2d hess = inst.field.hessian(x);
      double lambda_max =
          Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hess)
              .eigenvalues()
              .maxCoeff();
      CHECK(lambda_max <= delta + 1e-9);
    }
  }
}

TEST_CASE("build_surrogate is tight at x0 and a global lower bound") {
  Rng rng({24, 0});
  for (int t = 0; t < 50; ++t) {
    Instance inst = random_instance(rng, 4, 4.0);
    SurrogateQuadratic s = build_surrogate(inst.field, inst.x0);
    CHECK(s.evaluate(inst.x0) ==
          doctest::Approx(inst.field.value(inst.x0)).epsilon(1e-12));
    for (int p = 0; p < 200; ++p) {
      Vec2 x(rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0));
      CHECK(s.evaluate(x) <= inst.field.value(x) + 1e-9);
    }
  }
}

TEST_CASE("surrogate with zero field uses the delta floor") {
  CosineField field = CosineField::from_coefficients(
      CVec::Zero(2), Eigen::Matrix2Xd::Random(2, 2));
  SurrogateQuadratic s = build_surrogate(field, Vec2(1.0, 1.0));
  CHECK(s.delta == doctest::Approx(1e-9));
  CHECK(s.evaluate(Vec2(1.0, 1.0)) == 0.0);
  CHECK(s.evaluate(Vec2(3.0, 0.0)) < 0.0);  // strictly concave away from x0
}

TEST_CASE("decomposed surrogate coefficients agree with the centered form") {
  Rng rng({25, 0});
  Instance inst = random_instance(rng, 3, 4.0);
  SurrogateQuadratic s = build_surrogate(inst.field, inst.x0);
  for (int p = 0; p < 20; ++p) {
    Vec2 x(rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0));
    double decomposed =
        -0.5 * s.delta * x.squaredNorm() + s.linear().dot(x) + s.constant();
    CHECK(decomposed == doctest::Approx(s.evaluate(x)).epsilon(1e-9));
  }
}

TEST_CASE("linearize_distance") {
  SUBCASE("axis-aligned example reduces to x1 >= d0") {
    LinearConstraint c =
        linearize_distance(Vec2(1.0, 0.0), Vec2(0.0, 0.0), 0.5);
    CHECK(c.normal[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.normal[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.slack(Vec2(0.5, 0.7)) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(c.slack(Vec2(0.49, 0.0)) < 0.0);
  }
  SUBCASE("feasible for the half-plane implies true distance >= d0") {
    Rng rng({26, 0});
    for (int t = 0; t < 200; ++t) {
      Vec2 other(rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0));
      Vec2 x0 = other + Vec2(rng.gaussian(), rng.gaussian());
      LinearConstraint c = linearize_distance(x0, other, 0.5);
      Vec2 x(rng.uniform(-1.0, 5.0), rng.uniform(-1.0, 5.0));
      if (c.slack(x) >= 0.0) {
        CHECK((x - other).norm() >= 0.5 - 1e-12);
      }
    }
  }
  SUBCASE("expansion point far enough away is feasible") {
    Vec2 x0(2.0, 1.0), other(0.5, 1.0);
    LinearConstraint c = linearize_distance(x0, other, 0.5);
    CHECK(c.slack(x0) >= 0.0);
  }
  SUBCASE("coincident points take a deterministic nudge") {
    Vec2 x0(1.0, 1.0);
    LinearConstraint a = linearize_distance(x0, x0, 0.5, 3);
    LinearConstraint b = linearize_distance(x0, x0, 0.5, 3);
    LinearConstraint c = linearize_distance(x0, x0, 0.5, 4);
    CHECK((a.normal - b.normal).norm() == 0.0);
    CHECK(a.offset == b.offset);
    CHECK((a.normal - c.normal).norm() > 1e-6);
    CHECK(std::abs(a.normal.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("gain_constraint_disk") {
  Rng rng({27, 0});

  SUBCASE("nonpositive floor never binds") {
    Instance inst = random_instance(rng, 4, 4.0);
    SurrogateQuadratic s = build_surrogate(inst.field, inst.x0);
    CHECK_FALSE(gain_constraint_disk(s, 5.0, 0.0, 4.0).has_value());
    CHECK_FALSE(gain_constraint_disk(s, 5.0, -1.0, 4.0).has_value());
  }
  SUBCASE("expansion point is inside the disk") {
    for (int t = 0; t < 50; ++t) {
      Instance inst = random_instance(rng, 4, 4.0);
      SurrogateQuadratic s = build_surrogate(inst.field, inst.x0);
      double gain = 3.0 + rng.uniform();
      double floor = gain * rng.uniform(0.2, 0.95);
      auto disk = gain_constraint_disk(s, gain, floor, 4.0);
      if (disk) {
        CHECK(disk->slack(inst.x0) >= -1e-12);
      }
    }
  }
  SUBCASE("points inside the disk keep the true gain above the floor") {
    int binding = 0;
    for (int t = 0; t < 100; ++t) {
      Instance inst = random_instance(rng, 4, 4.0);
      SurrogateQuadratic s = build_surrogate(inst.field, inst.x0);
      // Model gain(x) = field(x) + offset with offset chosen so gain(x0) > 0.
      double offset = 2.0 * inst.field.curvature_bound() + 1.0;
      double gain0 = inst.field.value(inst.x0) + offset;
      double floor = gain0 * rng.uniform(0.5, 0.99);
      auto disk = gain_constraint_disk(s, gain0, floor, 4.0);
      if (!disk) continue;
      ++binding;
      for (int p = 0; p < 100; ++p) {
        double r = disk->radius * std::sqrt(rng.uniform());
        double a = rng.uniform(0.0, 2.0 * kPi);
        Vec2 x = disk->center + r * Vec2(std::cos(a), std::sin(a));
        double true_gain = inst.field.value(x) + offset;
        CHECK(true_gain >= floor - 1e-9);
      }
    }
    CHECK(binding > 10);  // the property must actually get exercised
  }
}
