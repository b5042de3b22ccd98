#include "memekf/state.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "memekf/small_linalg.hpp"
#include "test_util.hpp"

namespace memekf {
namespace {

constexpr double kPi = std::numbers::pi;

KinematicState kin_at(double x, double y) {
  KinematicState k;
  k.mean = Eigen::Vector4d(x, y, 0.0, 0.0);
  k.cov = Eigen::Matrix4d::Identity();
  return k;
}

ShapeState shape_of(double alpha, double l1, double l2) {
  ShapeState s;
  s.mean = Eigen::Vector3d(alpha, l1, l2);
  s.cov = Eigen::Matrix3d::Identity();
  return s;
}

TEST(EllipseSummary, IdentityShape) {
  const EllipseSummary e = to_ellipse_summary(kin_at(0.0, 0.0), shape_of(0.0, 1.0, 1.0));
  EXPECT_EQ(e.center, Eigen::Vector2d(0.0, 0.0));
  EXPECT_TRUE(e.extent.isApprox(Eigen::Matrix2d::Identity(), 1e-15));
}

// Rotating by pi flips the sign of S but leaves S S^T unchanged.
TEST(EllipseSummary, HalfTurnInvariance) {
  SplitMix64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d p = testing::random_shape(gen);
    const EllipseSummary a = to_ellipse_summary(kin_at(1.0, 2.0), shape_of(p(0), p(1), p(2)));
    const EllipseSummary b =
        to_ellipse_summary(kin_at(1.0, 2.0), shape_of(p(0) + kPi, p(1), p(2)));
    EXPECT_TRUE(a.extent.isApprox(b.extent, 1e-12));
  }
}

// Rotating by pi/2 while swapping the axes is the same ellipse.
TEST(EllipseSummary, QuarterTurnAxisSwapInvariance) {
  SplitMix64 gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Vector3d p = testing::random_shape(gen);
    const EllipseSummary a = to_ellipse_summary(kin_at(0.0, 0.0), shape_of(p(0), p(1), p(2)));
    const EllipseSummary b =
        to_ellipse_summary(kin_at(0.0, 0.0), shape_of(p(0) + kPi / 2.0, p(2), p(1)));
    EXPECT_TRUE(a.extent.isApprox(b.extent, 1e-12));
  }
}

TEST(EllipseSummary, NumericExtent) {
  const double c = std::cos(kPi / 3.0);
  const double s = std::sin(kPi / 3.0);
  Eigen::Matrix2d shape_mat;
  shape_mat << 2.0 * c, -9.0 * s, 2.0 * s, 9.0 * c;
  const EllipseSummary e = to_ellipse_summary(kin_at(0.0, 0.0), shape_of(kPi / 3.0, 2.0, 9.0));
  EXPECT_TRUE(e.extent.isApprox(shape_mat * shape_mat.transpose(), 1e-14));
}

// The extent eigenvalues are the squared semi-axes for any orientation.
TEST(EllipseSummary, ExtentEigenvaluesAreSquaredAxes) {
  SplitMix64 gen(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector3d p = testing::random_shape(gen);
    const EllipseSummary e = to_ellipse_summary(kin_at(0.0, 0.0), shape_of(p(0), p(1), p(2)));
    auto ev = sym_eigenvalues(e.extent);
    Eigen::Vector2d expected(p(1) * p(1), p(2) * p(2));
    if (expected(0) > expected(1)) std::swap(expected(0), expected(1));
    EXPECT_NEAR(ev[0], expected(0), 1e-10 * expected(1));
    EXPECT_NEAR(ev[1], expected(1), 1e-10 * expected(1));
  }
}

TEST(Validate, ReportsNonPsdCovariance) {
  KinematicState k = kin_at(0.0, 0.0);
  k.cov(2, 2) = -1.0;
  const auto violation = validate(k);
  ASSERT_TRUE(violation.has_value());
  EXPECT_EQ(violation->field, "cov");
  EXPECT_EQ(violation->message, "not PSD");
}

TEST(Validate, ReportsNonPositiveAxis) {
  const auto violation = validate(shape_of(0.0, 0.0, 2.0));
  ASSERT_TRUE(violation.has_value());
  EXPECT_EQ(violation->field, "l1");
  EXPECT_EQ(violation->message, "semi-axis not positive");
}

TEST(Validate, WellFormedDefaultsPass) {
  EXPECT_FALSE(validate(kin_at(1.0, 1.0)).has_value());
  EXPECT_FALSE(validate(shape_of(0.3, 2.0, 9.0)).has_value());
  SensorModel sensor;
  EXPECT_FALSE(validate(sensor).has_value());
}

TEST(Validate, RejectsBadKinematicDimension) {
  KinematicState k;
  k.mean = Eigen::Vector3d::Zero();
  k.cov = Eigen::Matrix3d::Identity();
  const auto violation = validate(k);
  ASSERT_TRUE(violation.has_value());
  EXPECT_EQ(violation->field, "mean");
}

TEST(Validate, RejectsNonPositivePoissonMean) {
  SensorModel sensor;
  sensor.poisson_mean = 0.0;
  const auto violation = validate(sensor);
  ASSERT_TRUE(violation.has_value());
  EXPECT_EQ(violation->field, "poisson_mean");
}

}  // namespace
}  // namespace memekf
