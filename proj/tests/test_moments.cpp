#include "memekf/moments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "memekf/small_linalg.hpp"
#include "test_util.hpp"

namespace memekf {
namespace {

using testing::random_spd2;
using testing::random_shape;

constexpr double kPi = std::numbers::pi;

TEST(FMatrices, SelectDistinctKroneckerEntries) {
  const FMatrices& fm = f_matrices();
  const Eigen::Vector4d v(10.0, 20.0, 30.0, 40.0);
  const Eigen::Vector3d selected = fm.F * v;
  const Eigen::Vector3d selected_dup = fm.F_tilde * v;
  EXPECT_EQ(selected, Eigen::Vector3d(10.0, 40.0, 20.0));
  EXPECT_EQ(selected_dup, Eigen::Vector3d(10.0, 40.0, 30.0));
  EXPECT_TRUE((fm.F.array() == 0.0 || fm.F.array() == 1.0).all());
  EXPECT_TRUE((fm.F_tilde.array() == 0.0 || fm.F_tilde.array() == 1.0).all());
}

TEST(ShapeMatrix, KnownValues) {
  EXPECT_TRUE(shape_matrix({0.0, 1.0, 1.0}).isApprox(Eigen::Matrix2d::Identity(), 1e-15));

  Eigen::Matrix2d quarter_turn;
  quarter_turn << 0.0, -1.0, 2.0, 0.0;
  EXPECT_TRUE(shape_matrix({kPi / 2.0, 2.0, 1.0}).isApprox(quarter_turn, 1e-12));

  Eigen::Matrix2d third;
  third << 2.0 * std::cos(kPi / 3.0), -9.0 * std::sin(kPi / 3.0),
      2.0 * std::sin(kPi / 3.0), 9.0 * std::cos(kPi / 3.0);
  EXPECT_TRUE(shape_matrix({kPi / 3.0, 2.0, 9.0}).isApprox(third, 1e-14));
  EXPECT_DOUBLE_EQ(third(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(third(1, 1), 4.5);
}

TEST(ShapeJacobians, AxisAlignedValues) {
  const double l1 = 3.0;
  const double l2 = 7.0;
  const ShapeDerivatives d = shape_jacobians({0.0, l1, l2});
  Eigen::Matrix<double, 2, 3> j1;
  j1 << 0.0, 1.0, 0.0, -l2, 0.0, 0.0;
  Eigen::Matrix<double, 2, 3> j2;
  j2 << l1, 0.0, 0.0, 0.0, 0.0, 1.0;
  EXPECT_TRUE(d.J1.isApprox(j1, 1e-15));
  EXPECT_TRUE(d.J2.isApprox(j2, 1e-15));
}

TEST(ShapeJacobians, QuarterTurnValues) {
  const ShapeDerivatives d = shape_jacobians({kPi / 2.0, 1.0, 1.0});
  Eigen::Matrix<double, 2, 3> j1;
  j1 << -1.0, 0.0, 0.0, 0.0, 0.0, -1.0;
  EXPECT_TRUE(d.J1.isApprox(j1, 1e-12));
}

// The Jacobians must agree with central finite differences of the rows of S.
TEST(ShapeJacobians, MatchFiniteDifferences) {
  SplitMix64 gen(101);
  const double step = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Vector3d p = random_shape(gen);
    const ShapeDerivatives d = shape_jacobians(p);
    for (int col = 0; col < 3; ++col) {
      Eigen::Vector3d lo = p;
      Eigen::Vector3d hi = p;
      lo(col) -= step;
      hi(col) += step;
      const Eigen::Matrix2d s_lo = shape_matrix(lo);
      const Eigen::Matrix2d s_hi = shape_matrix(hi);
      const Eigen::Vector2d fd1 = (s_hi.row(0) - s_lo.row(0)).transpose() / (2.0 * step);
      const Eigen::Vector2d fd2 = (s_hi.row(1) - s_lo.row(1)).transpose() / (2.0 * step);
      for (int r = 0; r < 2; ++r) {
        EXPECT_NEAR(d.J1(r, col), fd1(r), 1e-6 * (1.0 + std::abs(d.J1(r, col))));
        EXPECT_NEAR(d.J2(r, col), fd2(r), 1e-6 * (1.0 + std::abs(d.J2(r, col))));
      }
    }
  }
}

TEST(SpreadCovariance, ZeroShapeUncertaintyKillsSecondTerm) {
  const SpreadCovariance sc =
      spread_covariance({0.7, 2.0, 5.0}, Eigen::Matrix3d::Zero(), 0.25 * Eigen::Matrix2d::Identity());
  EXPECT_LE(sc.c2.norm(), 1e-15);
}

TEST(SpreadCovariance, UnitCircleIsIsotropic) {
  const SpreadCovariance sc = spread_covariance({0.0, 1.0, 1.0}, Eigen::Matrix3d::Zero(),
                                                0.25 * Eigen::Matrix2d::Identity());
  EXPECT_TRUE(sc.c1.isApprox(0.25 * Eigen::Matrix2d::Identity(), 1e-15));
}

// c1 is PSD by construction and c1 + c2 stays PSD after symmetrization.
TEST(SpreadCovariance, PositiveSemiDefinite) {
  SplitMix64 gen(202);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector3d p = random_shape(gen);
    const Eigen::Matrix3d cov_p = testing::random_spd3(gen);
    const Eigen::Matrix2d cov_h = random_spd2(gen, 0.25);
    const SpreadCovariance sc = spread_covariance(p, cov_p, cov_h);
    EXPECT_LE((sc.c2 - sc.c2.transpose()).norm(), 1e-14 * std::max(1.0, sc.c2.norm()));
    EXPECT_GE(sym_eigenvalues(sc.c1)[0], -1e-10 * std::max(1.0, sc.c1.norm()));
    const Eigen::Matrix2d total = sc.total();
    EXPECT_GE(sym_eigenvalues(total)[0], -1e-10 * std::max(1.0, total.norm()));
  }
}

TEST(PseudoMeas, DirectArithmetic) {
  EXPECT_EQ(pseudo_meas({3.0, -1.0}, {3.0, -1.0}), Eigen::Vector3d(0.0, 0.0, 0.0));
  EXPECT_EQ(pseudo_meas({1.0, 0.0}, {0.0, 0.0}), Eigen::Vector3d(1.0, 0.0, 0.0));
  EXPECT_EQ(pseudo_meas({2.0, -3.0}, {0.0, 0.0}), Eigen::Vector3d(4.0, 9.0, -6.0));
}

TEST(PseudoMeasMean, PicksDistinctSecondMoments) {
  EXPECT_EQ(pseudo_meas_mean(Eigen::Matrix2d::Identity()), Eigen::Vector3d(1.0, 1.0, 0.0));
  Eigen::Matrix2d c;
  c << 2.0, 1.0, 1.0, 3.0;
  EXPECT_EQ(pseudo_meas_mean(c), Eigen::Vector3d(2.0, 3.0, 1.0));
  EXPECT_EQ(pseudo_meas_mean(Eigen::Matrix2d::Zero()), Eigen::Vector3d(0.0, 0.0, 0.0));
}

TEST(PseudoMeasCov, KnownValues) {
  EXPECT_TRUE(pseudo_meas_cov(Eigen::Matrix2d::Identity())
                  .isApprox(Eigen::Vector3d(2.0, 2.0, 1.0).asDiagonal().toDenseMatrix(), 1e-15));

  Eigen::Matrix2d c;
  c << 2.0, 1.0, 1.0, 3.0;
  Eigen::Matrix3d expected;
  expected << 8.0, 2.0, 4.0, 2.0, 18.0, 6.0, 4.0, 6.0, 7.0;
  EXPECT_TRUE(pseudo_meas_cov(c).isApprox(expected, 1e-15));

  const double a = 3.0;
  const double b = 5.0;
  Eigen::Matrix3d diag_expected = Eigen::Vector3d(2 * a * a, 2 * b * b, a * b).asDiagonal();
  EXPECT_TRUE(pseudo_meas_cov(Eigen::Vector2d(a, b).asDiagonal()).isApprox(diag_expected, 1e-15));
}

// The entrywise fourth-moment form and the Kronecker form are two routes to
// the same matrix and must agree to machine precision.
TEST(PseudoMeasCov, EntrywiseAndKroneckerFormsAgree) {
  SplitMix64 gen(303);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Matrix2d cov_y = random_spd2(gen);
    const Eigen::Matrix3d a = pseudo_meas_cov(cov_y);
    const Eigen::Matrix3d b = pseudo_meas_cov_kron(cov_y);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, a.norm()));
  }
}

TEST(PseudoMeasCov, PositiveSemiDefiniteForSpdInput) {
  SplitMix64 gen(404);
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Matrix3d c = pseudo_meas_cov(random_spd2(gen));
    EXPECT_GE(sym_eigenvalues(c)[0], -1e-10 * std::max(1.0, c.norm()));
  }
}

TEST(PseudoCrossCov, ZeroShapeUncertaintyGivesZero) {
  const Eigen::Matrix3d c =
      pseudo_cross_cov({1.0, 2.0, 3.0}, Eigen::Matrix3d::Zero(), 0.25 * Eigen::Matrix2d::Identity());
  EXPECT_LE(c.norm(), 1e-15);
}

// Hand-evaluated sensitivity rows for the axis-aligned unit circle:
// S1 = (1, 0), S2 = (0, 1), J1 = [[0,1,0],[-1,0,0]], J2 = [[1,0,0],[0,0,1]].
TEST(PseudoCrossCov, UnitCircleSensitivity) {
  const ShapeDerivatives d = shape_jacobians({0.0, 1.0, 1.0});
  const Eigen::Matrix3d m = pseudo_meas_sensitivity(d, 0.25 * Eigen::Matrix2d::Identity());
  Eigen::Matrix3d expected;
  expected << 0.0, 0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0;
  EXPECT_TRUE(m.isApprox(expected, 1e-15));

  const Eigen::Matrix3d cov_p = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  EXPECT_TRUE(pseudo_cross_cov({0.0, 1.0, 1.0}, cov_p, 0.25 * Eigen::Matrix2d::Identity())
                  .isApprox(cov_p * expected.transpose(), 1e-15));
}

}  // namespace
}  // namespace memekf
