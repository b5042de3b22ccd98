#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "memekf/moments.hpp"
#include "memekf/motion.hpp"
#include "memekf/rng.hpp"
#include "memekf/small_linalg.hpp"
#include "memekf/state.hpp"

// Ground-truth trajectory generation and measurement synthesis. Generation is
// a pure function of (spec, seed): the same seed yields bit-identical
// measurement sequences, and parallel runs derive disjoint substreams.

namespace memekf {

struct TruthStep {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  double orientation = 0.0;        // radians, continuous (unwrapped)
  Eigen::Vector2d semi_axes = Eigen::Vector2d::Ones();
  double turn_rate = 0.0;          // rad/s
};

struct GroundTruth {
  std::vector<TruthStep> steps;

  EllipseSummary summary_at(std::size_t k) const {
    const TruthStep& st = steps.at(k);
    const Eigen::Matrix2d s =
        shape_matrix({st.orientation, st.semi_axes(0), st.semi_axes(1)});
    return {st.center, s * s.transpose()};
  }
};

enum class ScenarioKind { kStationary, kCvWaypoints, kVariableTurn };

/// Filter initialization and process-noise settings that ship with a
/// scenario, so a scenario file fully determines a tracking run.
struct FilterPriors {
  KinematicState kin;
  ShapeState shape;
  Eigen::MatrixXd q_kin;
  Eigen::Matrix3d q_shape = Eigen::Matrix3d::Zero();
  bool turn_coupling = false;
  double rm_tau = 50.0;   // random-matrix baseline: dof decay time constant
  double rm_dof = 56.0;   // random-matrix baseline: initial degrees of freedom
};

struct ScenarioSpec {
  std::string name;
  ScenarioKind kind = ScenarioKind::kStationary;
  int steps = 100;
  double T = 1.0;                       // sampling period, seconds
  double speed_mps = 0.0;
  std::vector<Eigen::Vector2d> waypoints;
  Eigen::Vector2d axes = Eigen::Vector2d::Ones();   // true semi-axes (m)
  double alpha0 = 0.0;                  // initial orientation / heading (rad)
  double poisson_mean = 20.0;
  Eigen::Vector2d meas_noise_var = Eigen::Vector2d::Ones();
  std::uint64_t seed = 0;
  FilterPriors priors;
  std::vector<Eigen::Vector3d> q_shape_variants;  // optional documented alternatives

  SensorModel sensor() const {
    SensorModel s;
    s.meas_noise_cov = meas_noise_var.asDiagonal();
    s.mult_noise_cov = 0.25 * Eigen::Matrix2d::Identity();
    s.poisson_mean = poisson_mean;
    return s;
  }

  DynamicsModel dynamics() const {
    DynamicsModel dyn;
    dyn.sampling_period = T;
    dyn.turn_coupling = priors.turn_coupling;
    const auto n = priors.kin.mean.size();
    switch (kind) {
      case ScenarioKind::kStationary:
        dyn.A_r = Eigen::MatrixXd::Identity(n, n);
        break;
      case ScenarioKind::kCvWaypoints:
        dyn.A_r = cv_transition(T);
        break;
      case ScenarioKind::kVariableTurn:
        dyn.A_r = Eigen::MatrixXd::Identity(n, n);  // unused: coordinated-turn path
        break;
    }
    dyn.A_p = Eigen::Matrix3d::Identity();
    dyn.Q_r = priors.q_kin;
    dyn.Q_p = priors.q_shape;
    return dyn;
  }
};

namespace detail {

inline double unwrap_towards(double angle, double previous) {
  while (angle - previous > std::numbers::pi) angle -= 2.0 * std::numbers::pi;
  while (angle - previous < -std::numbers::pi) angle += 2.0 * std::numbers::pi;
  return angle;
}

inline GroundTruth truth_stationary(const ScenarioSpec& spec) {
  GroundTruth gt;
  TruthStep st;
  st.center = spec.waypoints.empty() ? Eigen::Vector2d::Zero().eval() : spec.waypoints.front();
  st.orientation = spec.alpha0;
  st.semi_axes = spec.axes;
  gt.steps.assign(static_cast<std::size_t>(spec.steps), st);
  return gt;
}

inline GroundTruth truth_cv_waypoints(const ScenarioSpec& spec) {
  if (spec.waypoints.size() < 2)
    throw std::invalid_argument("cv_waypoints scenario needs at least two waypoints");
  struct Leg {
    Eigen::Vector2d start, dir;
    double length;
  };
  std::vector<Leg> legs;
  for (std::size_t i = 0; i + 1 < spec.waypoints.size(); ++i) {
    const Eigen::Vector2d d = spec.waypoints[i + 1] - spec.waypoints[i];
    const double len = d.norm();
    if (len <= 0.0) throw std::invalid_argument("infeasible waypoints: zero-length leg");
    legs.push_back({spec.waypoints[i], d / len, len});
  }

  GroundTruth gt;
  gt.steps.resize(static_cast<std::size_t>(spec.steps));
  double prev_heading = std::atan2(legs.front().dir(1), legs.front().dir(0));
  for (int k = 0; k < spec.steps; ++k) {
    double s = spec.speed_mps * spec.T * k;  // arc length travelled
    std::size_t leg = 0;
    while (leg + 1 < legs.size() && s > legs[leg].length) {
      s -= legs[leg].length;
      ++leg;
    }
    TruthStep& st = gt.steps[static_cast<std::size_t>(k)];
    st.center = legs[leg].start + s * legs[leg].dir;  // extends past the last waypoint
    const double heading =
        unwrap_towards(std::atan2(legs[leg].dir(1), legs[leg].dir(0)), prev_heading);
    prev_heading = heading;
    st.orientation = heading;
    st.velocity = spec.speed_mps * legs[leg].dir;
    st.semi_axes = spec.axes;
  }
  return gt;
}

// Maneuver profile: constant-velocity lead-in, 20 steps ramping the turn rate
// up to 20 deg/s, 20 steps ramping back down, 5 closing constant-velocity
// steps. The lead-in absorbs any extra configured steps.
inline GroundTruth truth_variable_turn(const ScenarioSpec& spec) {
  constexpr double kMaxTurn = 20.0 * std::numbers::pi / 180.0;  // rad/s
  const int ramp = 20;
  const int tail = 5;
  const int lead = std::max(0, spec.steps - (2 * ramp + tail));

  Eigen::Vector2d pos =
      spec.waypoints.empty() ? Eigen::Vector2d(100.0, 100.0) : spec.waypoints.front();
  double heading = spec.alpha0;

  GroundTruth gt;
  gt.steps.resize(static_cast<std::size_t>(spec.steps));
  for (int k = 0; k < spec.steps; ++k) {
    double omega = 0.0;
    if (k >= lead && k < lead + ramp) {
      omega = kMaxTurn * static_cast<double>(k - lead + 1) / ramp;
    } else if (k >= lead + ramp && k < lead + 2 * ramp) {
      omega = kMaxTurn * static_cast<double>(2 * ramp - (k - lead) - 1) / ramp;
    }
    TruthStep& st = gt.steps[static_cast<std::size_t>(k)];
    st.center = pos;
    st.orientation = heading;
    st.velocity = spec.speed_mps * Eigen::Vector2d(std::cos(heading), std::sin(heading));
    st.semi_axes = spec.axes;
    st.turn_rate = omega;

    // advance along the exact circular arc
    if (std::abs(omega) < 1e-12) {
      pos += spec.T * st.velocity;
    } else {
      const double radius = spec.speed_mps / omega;
      const double next = heading + omega * spec.T;
      pos += radius * Eigen::Vector2d(std::sin(next) - std::sin(heading),
                                      std::cos(heading) - std::cos(next));
      heading = next;
    }
  }
  return gt;
}

}  // namespace detail

inline GroundTruth gen_truth(const ScenarioSpec& spec) {
  if (spec.steps <= 0) throw std::invalid_argument("scenario must have a positive step count");
  switch (spec.kind) {
    case ScenarioKind::kStationary: return detail::truth_stationary(spec);
    case ScenarioKind::kCvWaypoints: return detail::truth_cv_waypoints(spec);
    case ScenarioKind::kVariableTurn: return detail::truth_variable_turn(spec);
  }
  throw std::invalid_argument("unknown scenario kind");
}

/// Per step: the detection count is Poisson, each source is uniform on the
/// elliptical extent (exact disk mapping r = sqrt(u), uniform angle, then the
/// shape matrix), and detections add Gaussian sensor noise. Step k draws from
/// substream(seed, k).
inline std::vector<MeasurementBatch> gen_measurements(const GroundTruth& truth,
                                                      const SensorModel& sensor,
                                                      std::uint64_t seed) {
  const Eigen::Matrix2d noise_root = spd_sqrt(sensor.meas_noise_cov);
  std::vector<MeasurementBatch> batches;
  batches.reserve(truth.steps.size());
  for (std::size_t k = 0; k < truth.steps.size(); ++k) {
    const TruthStep& st = truth.steps[k];
    const Eigen::Matrix2d s =
        shape_matrix({st.orientation, st.semi_axes(0), st.semi_axes(1)});
    SplitMix64 gen(substream(seed, k));
    MeasurementBatch batch;
    batch.time_index = static_cast<int>(k);
    const int count = poisson(gen, sensor.poisson_mean);
    batch.detections.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const double radius = std::sqrt(uniform01(gen));
      const double angle = 2.0 * std::numbers::pi * uniform01(gen);
      const Eigen::Vector2d on_disk(radius * std::cos(angle), radius * std::sin(angle));
      const NormalPair z = normal_pair(gen);
      batch.detections.push_back(st.center + s * on_disk +
                                 noise_root * Eigen::Vector2d(z.a, z.b));
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace memekf
