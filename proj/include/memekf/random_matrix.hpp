#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "memekf/motion.hpp"
#include "memekf/small_linalg.hpp"
#include "memekf/state.hpp"

// Minimal Feldmann-style random-matrix tracker, used as a comparison baseline
// by the harness. The extent is an inverse-Wishart scale matrix V with scalar
// degrees of freedom; the expected extent is V / (dof - 2d - 2) with d = 2
// (the convention used throughout this module). The measurement spread of a
// single detection is extent / scaling + Cv; with scaling = 4 this matches
// the multiplicative-error likelihood for an extent of S S^T.

namespace memekf {

struct RMState {
  Eigen::VectorXd kin_mean;
  Eigen::MatrixXd kin_cov;
  Eigen::Matrix2d scale = Eigen::Matrix2d::Identity();  // V
  double dof = 56.0;                                    // v, kept > 2d + 2 = 6
  double tau = 50.0;                                    // dof decay time constant (s)
  double scaling = 4.0;                                 // z
  int time_index = 0;

  Eigen::Matrix2d expected_extent() const { return scale / (dof - 6.0); }
};

namespace rm_detail {

inline Eigen::MatrixXd position_selector(Eigen::Index n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, n);
  h.leftCols<2>() = Eigen::Matrix2d::Identity();
  return h;
}

}  // namespace rm_detail

/// Batch update: Kalman step on the scan mean for the kinematics, and a
/// whitened combination of the innovation outer product and the scan spread
/// for the extent. Exactly stationary when the scan statistics match the
/// predicted ones.
inline RMState rm_update(const RMState& state, const MeasurementBatch& batch,
                         const SensorModel& sensor) {
  const std::size_t n = batch.detections.size();
  if (n == 0) throw std::invalid_argument("rm_update requires a non-empty batch");
  if (!(state.dof > 6.0)) throw std::invalid_argument("rm_update requires dof > 6");

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& y : batch.detections) mean += y;
  mean /= static_cast<double>(n);
  Eigen::Matrix2d spread = Eigen::Matrix2d::Zero();
  for (const auto& y : batch.detections) spread += (y - mean) * (y - mean).transpose();

  const Eigen::MatrixXd h = rm_detail::position_selector(state.kin_mean.size());
  const Eigen::Matrix2d extent = state.expected_extent();
  const Eigen::Matrix2d meas_cov =
      symmetrized(Eigen::Matrix2d(extent / state.scaling + sensor.meas_noise_cov));
  const Eigen::Matrix2d innov_cov = symmetrized(
      Eigen::Matrix2d(h * state.kin_cov * h.transpose()) + meas_cov / static_cast<double>(n));

  const Eigen::MatrixXd gain = state.kin_cov * h.transpose() * inverse2(innov_cov);
  const Eigen::Vector2d innovation = mean - h * state.kin_mean;

  RMState out = state;
  out.kin_mean = state.kin_mean + gain * innovation;
  out.kin_cov = symmetrized(state.kin_cov - gain * innov_cov * gain.transpose());

  const Eigen::Matrix2d extent_root = spd_sqrt(extent);
  const Eigen::Matrix2d innov_white = inverse2(spd_sqrt(innov_cov));
  const Eigen::Matrix2d meas_white = inverse2(spd_sqrt(meas_cov));
  const Eigen::Matrix2d innov_part = extent_root * innov_white *
                                     (innovation * innovation.transpose()) *
                                     innov_white.transpose() * extent_root.transpose();
  const Eigen::Matrix2d spread_part =
      extent_root * meas_white * spread * meas_white.transpose() * extent_root.transpose();
  out.scale = symmetrized(state.scale + innov_part + spread_part);
  out.dof = state.dof + static_cast<double>(n);
  out.time_index = batch.time_index;
  return out;
}

/// Time update: Kalman prediction for the kinematics (coordinated turn when
/// the dynamics say so); the dof decays toward the stationary value with time
/// constant tau while the expected extent is preserved.
inline RMState rm_predict(const RMState& state, const DynamicsModel& dynamics) {
  RMState out = state;
  if (dynamics.turn_coupling) {
    if (state.kin_mean.size() != 5)
      throw std::invalid_argument("turn-coupled prediction requires a 5-dimensional state");
    const CtStep step = constant_turn_step(state.kin_mean, dynamics.sampling_period);
    out.kin_mean = step.mean;
    out.kin_cov = symmetrized(
        Eigen::MatrixXd(step.jacobian * state.kin_cov * step.jacobian.transpose()) +
        dynamics.Q_r);
  } else {
    out.kin_mean = dynamics.A_r * state.kin_mean;
    out.kin_cov = symmetrized(
        Eigen::MatrixXd(dynamics.A_r * state.kin_cov * dynamics.A_r.transpose()) + dynamics.Q_r);
  }
  const double decay = std::exp(-dynamics.sampling_period / state.tau);
  const double next_dof = 6.0 + decay * (state.dof - 6.0);
  out.scale = state.scale * (next_dof - 6.0) / (state.dof - 6.0);
  out.dof = next_dof;
  out.time_index = state.time_index + 1;
  return out;
}

/// Center plus expected extent V / (dof - 6).
inline EllipseSummary rm_to_summary(const RMState& state) {
  return {state.kin_mean.head<2>(), symmetrized(state.expected_extent())};
}

/// Single-detection likelihood with covariance extent / scaling + Cv.
inline double rm_likelihood(const RMState& state, const Eigen::Vector2d& y,
                            const SensorModel& sensor) {
  const Eigen::Matrix2d cov = symmetrized(
      Eigen::Matrix2d(state.expected_extent() / state.scaling + sensor.meas_noise_cov));
  const Eigen::Vector2d d = y - state.kin_mean.head<2>();
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  const double quad = d.dot(inverse2(cov) * d);
  return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
}

}  // namespace memekf
