#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace memekf {

/// Constant-velocity transition for the state (x, y, vx, vy).
inline Eigen::Matrix4d cv_transition(double period) {
  Eigen::Matrix4d a = Eigen::Matrix4d::Identity();
  a(0, 2) = period;
  a(1, 3) = period;
  return a;
}

struct CtStep {
  Eigen::Matrix<double, 5, 1> mean;      // propagated mean
  Eigen::Matrix<double, 5, 5> jacobian;  // for covariance propagation
};

/// Coordinated-turn step for the state (x, y, vx, vy, omega): the velocity
/// vector rotates by omega*period while the position follows the arc. The
/// mean is propagated through the exact map; the Jacobian carries the
/// turn-rate coupling needed to make omega observable from position data.
inline CtStep constant_turn_step(const Eigen::Matrix<double, 5, 1>& state, double period) {
  const double vx = state(2);
  const double vy = state(3);
  const double omega = state(4);
  const double wt = omega * period;

  double s_w, c1_w;       // sin(wT)/w and (1-cos(wT))/w
  double ds_w, dc1_w;     // their derivatives with respect to w
  if (std::abs(wt) < 1e-8) {
    s_w = period;
    c1_w = 0.5 * period * period * omega;
    ds_w = -period * period * period * omega / 3.0;
    dc1_w = 0.5 * period * period;
  } else {
    const double s = std::sin(wt);
    const double c = std::cos(wt);
    s_w = s / omega;
    c1_w = (1.0 - c) / omega;
    ds_w = (period * omega * c - s) / (omega * omega);
    dc1_w = (period * omega * s - (1.0 - c)) / (omega * omega);
  }
  const double sin_wt = std::sin(wt);
  const double cos_wt = std::cos(wt);

  CtStep step;
  step.mean << state(0) + s_w * vx - c1_w * vy,
               state(1) + c1_w * vx + s_w * vy,
               cos_wt * vx - sin_wt * vy,
               sin_wt * vx + cos_wt * vy,
               omega;

  Eigen::Matrix<double, 5, 5>& f = step.jacobian;
  f.setZero();
  f(0, 0) = 1.0; f(0, 2) = s_w;  f(0, 3) = -c1_w;
  f(1, 1) = 1.0; f(1, 2) = c1_w; f(1, 3) = s_w;
  f(2, 2) = cos_wt; f(2, 3) = -sin_wt;
  f(3, 2) = sin_wt; f(3, 3) = cos_wt;
  f(4, 4) = 1.0;
  f(0, 4) = ds_w * vx - dc1_w * vy;
  f(1, 4) = dc1_w * vx + ds_w * vy;
  f(2, 4) = period * (-sin_wt * vx - cos_wt * vy);
  f(3, 4) = period * (cos_wt * vx - sin_wt * vy);
  return step;
}

}  // namespace memekf
