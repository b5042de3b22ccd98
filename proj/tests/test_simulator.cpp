#include "memekf/simulator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "memekf/moments.hpp"
#include "memekf/scenarios.hpp"

namespace memekf {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(GenTruth, StationaryHoldsPose) {
  const ScenarioSpec spec = stationary_iv_a();
  const GroundTruth truth = gen_truth(spec);
  ASSERT_EQ(truth.steps.size(), 100u);
  for (const TruthStep& st : truth.steps) {
    EXPECT_EQ(st.center, Eigen::Vector2d(0.0, 0.0));
    EXPECT_DOUBLE_EQ(st.orientation, kPi / 3.0);
    EXPECT_EQ(st.semi_axes, Eigen::Vector2d(2.0, 9.0));
    EXPECT_EQ(st.velocity, Eigen::Vector2d(0.0, 0.0));
  }
}

// 50 km/h at a 10 s sampling period is 138.9 m per step on straight legs.
TEST(GenTruth, ConstantVelocityStepLength) {
  ScenarioSpec spec = cv_turns_iv_b();
  spec.waypoints = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(100000.0, 0.0)};
  spec.steps = 20;
  const GroundTruth truth = gen_truth(spec);
  for (std::size_t k = 1; k < truth.steps.size(); ++k) {
    const double step_len = (truth.steps[k].center - truth.steps[k - 1].center).norm();
    EXPECT_NEAR(step_len, 50.0 / 3.6 * 10.0, 1e-9);
    EXPECT_NEAR(step_len, 138.888888888888886, 1e-9);
  }
}

TEST(GenTruth, WaypointTrackTurnsAtCorners) {
  const ScenarioSpec spec = cv_turns_iv_b();
  const GroundTruth truth = gen_truth(spec);
  ASSERT_EQ(truth.steps.size(), static_cast<std::size_t>(spec.steps));
  EXPECT_DOUBLE_EQ(truth.steps.front().orientation, 0.0);
  // The default polyline has three heading changes.
  int turns = 0;
  for (std::size_t k = 1; k < truth.steps.size(); ++k) {
    if (std::abs(truth.steps[k].orientation - truth.steps[k - 1].orientation) > 1e-9) ++turns;
  }
  EXPECT_EQ(turns, 3);
}

TEST(GenTruth, VariableTurnManeuverStructure) {
  const ScenarioSpec spec = variable_turn_iv_c();
  const GroundTruth truth = gen_truth(spec);
  ASSERT_EQ(truth.steps.size(), 70u);

  const double max_turn = 20.0 * kPi / 180.0;
  for (int k = 0; k < 25; ++k) EXPECT_EQ(truth.steps[k].turn_rate, 0.0) << k;
  for (int k = 25; k < 45; ++k) {
    EXPECT_NEAR(truth.steps[k].turn_rate, max_turn * (k - 25 + 1) / 20.0, 1e-12) << k;
  }
  EXPECT_NEAR(truth.steps[44].turn_rate, max_turn, 1e-12);
  for (int k = 45; k < 65; ++k) EXPECT_LT(truth.steps[k].turn_rate, max_turn) << k;
  for (int k = 65; k < 70; ++k) EXPECT_EQ(truth.steps[k].turn_rate, 0.0) << k;

  for (const TruthStep& st : truth.steps) {
    EXPECT_NEAR(st.velocity.norm(), 150.0, 1e-9);
    EXPECT_EQ(st.semi_axes, Eigen::Vector2d(85.0, 20.0));
  }
  // Orientation is continuous: per-step change is bounded by max turn * T.
  for (std::size_t k = 1; k < truth.steps.size(); ++k) {
    EXPECT_LE(std::abs(truth.steps[k].orientation - truth.steps[k - 1].orientation),
              max_turn * spec.T + 1e-12);
  }
}

TEST(GenTruth, RejectsZeroLengthLeg) {
  ScenarioSpec spec = cv_turns_iv_b();
  spec.waypoints = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(0.0, 0.0)};
  EXPECT_THROW(gen_truth(spec), std::invalid_argument);
}

TEST(GenMeasurements, SameSeedIsBitIdentical) {
  const ScenarioSpec spec = stationary_iv_a();
  const GroundTruth truth = gen_truth(spec);
  const auto a = gen_measurements(truth, spec.sensor(), 42);
  const auto b = gen_measurements(truth, spec.sensor(), 42);
  const auto c = gen_measurements(truth, spec.sensor(), 43);
  ASSERT_EQ(a.size(), b.size());
  bool any_difference_to_c = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ASSERT_EQ(a[k].detections.size(), b[k].detections.size());
    for (std::size_t i = 0; i < a[k].detections.size(); ++i) {
      EXPECT_EQ(a[k].detections[i], b[k].detections[i]);
    }
    if (c[k].detections.size() != a[k].detections.size()) any_difference_to_c = true;
  }
  EXPECT_TRUE(any_difference_to_c);
}

TEST(GenMeasurements, DetectionCountFollowsPoissonMean) {
  ScenarioSpec spec = stationary_iv_a();
  spec.steps = 2000;
  const GroundTruth truth = gen_truth(spec);
  const auto batches = gen_measurements(truth, spec.sensor(), 7);
  double total = 0.0;
  for (const auto& b : batches) total += static_cast<double>(b.detections.size());
  const double mean = total / static_cast<double>(batches.size());
  const double tol = 3.0 * std::sqrt(spec.poisson_mean / static_cast<double>(batches.size()));
  EXPECT_NEAR(mean, spec.poisson_mean, tol);
}

TEST(GenMeasurements, EmpiricalMeanMatchesCenter) {
  ScenarioSpec spec = stationary_iv_a();
  spec.steps = 5200;
  spec.waypoints = {Eigen::Vector2d(5.0, -3.0)};
  const GroundTruth truth = gen_truth(spec);
  const auto batches = gen_measurements(truth, spec.sensor(), 11);

  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  long n = 0;
  for (const auto& b : batches)
    for (const auto& y : b.detections) {
      sum += y;
      ++n;
    }
  ASSERT_GE(n, 100000L);
  const Eigen::Vector2d mean = sum / static_cast<double>(n);

  // Per-axis detection variance: diag entries of S Ch S^T + Cv.
  const Eigen::Matrix2d s = shape_matrix({spec.alpha0, spec.axes(0), spec.axes(1)});
  const Eigen::Matrix2d cov = s * spec.sensor().mult_noise_cov * s.transpose() +
                              spec.sensor().meas_noise_cov;
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt(cov(i, i) / static_cast<double>(n));
    EXPECT_NEAR(mean(i), truth.steps[0].center(i), 3.0 * se);
  }
}

// The simulated detections must have the covariance the measurement model
// assumes: S Ch S^T + Cv.
TEST(GenMeasurements, DetectionCovarianceMatchesModel) {
  ScenarioSpec spec = stationary_iv_a();
  spec.steps = 5000;
  const GroundTruth truth = gen_truth(spec);
  const auto batches = gen_measurements(truth, spec.sensor(), 13);

  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d outer = Eigen::Matrix2d::Zero();
  long n = 0;
  for (const auto& b : batches)
    for (const auto& y : b.detections) {
      sum += y;
      outer += y * y.transpose();
      ++n;
    }
  const Eigen::Vector2d mean = sum / static_cast<double>(n);
  const Eigen::Matrix2d cov =
      (outer - static_cast<double>(n) * mean * mean.transpose()) / static_cast<double>(n - 1);

  const Eigen::Matrix2d s = shape_matrix({spec.alpha0, spec.axes(0), spec.axes(1)});
  const Eigen::Matrix2d expected = s * spec.sensor().mult_noise_cov * s.transpose() +
                                   spec.sensor().meas_noise_cov;
  EXPECT_LE((cov - expected).norm() / expected.norm(), 0.05);
}

TEST(ScenarioSpec, DynamicsMatchKind) {
  const ScenarioSpec cv = cv_turns_iv_b();
  EXPECT_TRUE(cv.dynamics().A_r.isApprox(cv_transition(10.0), 1e-15));
  EXPECT_FALSE(cv.dynamics().turn_coupling);

  const ScenarioSpec vt = variable_turn_iv_c();
  EXPECT_TRUE(vt.dynamics().turn_coupling);
  EXPECT_EQ(vt.dynamics().A_r.rows(), 5);
  EXPECT_EQ(vt.priors.kin.mean.size(), 5);
}

}  // namespace
}  // namespace memekf
