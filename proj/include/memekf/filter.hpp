#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "memekf/moments.hpp"
#include "memekf/motion.hpp"
#include "memekf/small_linalg.hpp"
#include "memekf/state.hpp"

// Recursive estimator for center, orientation and semi-axis lengths of an
// elliptical extended object (MEM-EKF*). Detections of a scan are folded in
// sequentially; the kinematic state is updated with the raw detection and the
// shape parameters with a quadratic pseudo-measurement whose first two
// moments follow from the measurement covariance in closed form.

namespace memekf {

class FilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An innovation covariance failed the invertibility guard. `matrix_name`
/// identifies which matrix; `detection_index` is filled in by update_scan.
class SingularInnovation : public FilterError {
 public:
  SingularInnovation(std::string name, double cond)
      : FilterError("singular innovation covariance " + name), matrix_name(std::move(name)),
        condition(cond) {}

  std::string matrix_name;
  double condition = 0.0;
  int detection_index = -1;
};

class DimensionMismatch : public FilterError {
 public:
  using FilterError::FilterError;
};

struct FilterConfig {
  SensorModel sensor;
  DynamicsModel dynamics;
  Eigen::MatrixXd H;                          // always [I2 0]
  double axis_floor = 1e-4;                   // meters
  std::string ordering_policy = "as-given";   // detections are folded in stored order

  static FilterConfig make(SensorModel sensor, DynamicsModel dynamics) {
    FilterConfig cfg;
    cfg.sensor = std::move(sensor);
    const auto n = dynamics.A_r.rows();
    cfg.dynamics = std::move(dynamics);
    cfg.H = Eigen::MatrixXd::Zero(2, n);
    cfg.H.leftCols<2>() = Eigen::Matrix2d::Identity();
    return cfg;
  }
};

struct FilterState {
  KinematicState kin;
  ShapeState shape;
  int time_index = 0;
};

/// Every intermediate of one measurement update, for diagnostics and for
/// checking the analytic moments against the Monte-Carlo oracle.
struct UpdateDiagnostics {
  Eigen::Matrix2d shape_mat;        // S at the pre-update shape mean
  Eigen::Matrix<double, 2, 3> j1;
  Eigen::Matrix<double, 2, 3> j2;
  Eigen::Matrix2d c1;               // spread from multiplicative noise
  Eigen::Matrix2d c2;               // spread from shape uncertainty
  Eigen::Matrix3d sensitivity;      // M
  Eigen::Vector2d meas_pred;        // y_bar
  Eigen::Matrix2d innovation_cov;   // C^y
  Eigen::Vector3d pseudo;           // Y
  Eigen::Vector3d pseudo_pred;      // Y_bar
  Eigen::Matrix3d pseudo_cov;       // C^Y
  Eigen::Matrix3d shape_cross_cov;  // C^{pY}
  bool axis_clamped = false;
};

struct ScanStats {
  long clamp_events = 0;
};

namespace detail {

constexpr double kMaxCondition = 1e12;

inline void check_condition(const Eigen::Matrix2d& m, const char* name) {
  const double cond = sym_condition(m);
  if (!(cond < kMaxCondition)) throw SingularInnovation(name, cond);
}

inline void check_condition(const Eigen::Matrix3d& m, const char* name) {
  const double cond = sym_condition(m);
  if (!(cond < kMaxCondition)) throw SingularInnovation(name, cond);
}

}  // namespace detail

/// One sequential measurement update. Moments are evaluated at the current
/// (pre-update) shape mean; both posterior covariances are symmetrized and
/// the semi-axes are clamped at the configured floor.
inline FilterState update_single(const FilterState& state, const Eigen::Vector2d& y,
                                 const FilterConfig& cfg, UpdateDiagnostics* diag = nullptr) {
  const Eigen::Matrix2d& cov_h = cfg.sensor.mult_noise_cov;

  const ShapeDerivatives sd = shape_jacobians(state.shape.mean);
  const SpreadCovariance spread = spread_covariance(state.shape.mean, state.shape.cov, cov_h);
  const Eigen::Matrix3d sens = pseudo_meas_sensitivity(sd, cov_h);

  const Eigen::Vector2d y_bar = cfg.H * state.kin.mean;
  const Eigen::MatrixXd cross_kin = state.kin.cov * cfg.H.transpose();
  const Eigen::Matrix2d cov_y = symmetrized(
      Eigen::Matrix2d(cfg.H * state.kin.cov * cfg.H.transpose()) + spread.c1 + spread.c2 +
      cfg.sensor.meas_noise_cov);
  detail::check_condition(cov_y, "C^y");
  const Eigen::Matrix2d cov_y_inv = inverse2(cov_y);

  const Eigen::Vector3d pseudo = pseudo_meas(y, y_bar);
  const Eigen::Vector3d pseudo_pred = pseudo_meas_mean(cov_y);
  const Eigen::Matrix3d cross_shape = state.shape.cov * sens.transpose();
  const Eigen::Matrix3d cov_pseudo = symmetrized(pseudo_meas_cov_kron(cov_y));
  detail::check_condition(cov_pseudo, "C^Y");
  const Eigen::Matrix3d cov_pseudo_inv = inverse3(cov_pseudo);

  FilterState out = state;
  out.kin.mean = state.kin.mean + cross_kin * cov_y_inv * (y - y_bar);
  out.kin.cov = symmetrized(state.kin.cov - cross_kin * cov_y_inv * cross_kin.transpose());
  out.shape.mean = state.shape.mean + cross_shape * cov_pseudo_inv * (pseudo - pseudo_pred);
  out.shape.cov =
      symmetrized(state.shape.cov - cross_shape * cov_pseudo_inv * cross_shape.transpose());

  bool clamped = false;
  for (int i = 1; i <= 2; ++i) {
    if (out.shape.mean(i) < cfg.axis_floor) {
      out.shape.mean(i) = cfg.axis_floor;
      clamped = true;
    }
  }

  if (diag != nullptr) {
    diag->shape_mat = sd.S;
    diag->j1 = sd.J1;
    diag->j2 = sd.J2;
    diag->c1 = spread.c1;
    diag->c2 = spread.c2;
    diag->sensitivity = sens;
    diag->meas_pred = y_bar;
    diag->innovation_cov = cov_y;
    diag->pseudo = pseudo;
    diag->pseudo_pred = pseudo_pred;
    diag->pseudo_cov = cov_pseudo;
    diag->shape_cross_cov = cross_shape;
    diag->axis_clamped = clamped;
  }
  return out;
}

/// Folds update_single over the detections in stored order. An empty scan
/// leaves the state unchanged. Results depend (slightly) on the ordering;
/// the stored order keeps runs reproducible.
inline FilterState update_scan(const FilterState& state, const MeasurementBatch& batch,
                               const FilterConfig& cfg, ScanStats* stats = nullptr) {
  FilterState current = state;
  UpdateDiagnostics diag;
  for (std::size_t i = 0; i < batch.detections.size(); ++i) {
    try {
      current = update_single(current, batch.detections[i], cfg, &diag);
    } catch (SingularInnovation& e) {
      e.detection_index = static_cast<int>(i);
      throw;
    }
    if (stats != nullptr && diag.axis_clamped) ++stats->clamp_events;
  }
  current.time_index = batch.time_index;
  return current;
}

/// Standard linear time update for both the kinematic state and the shape
/// parameters.
inline FilterState predict(const FilterState& state, const FilterConfig& cfg) {
  const DynamicsModel& dyn = cfg.dynamics;
  FilterState out = state;
  out.kin.mean = dyn.A_r * state.kin.mean;
  out.kin.cov = symmetrized(Eigen::MatrixXd(dyn.A_r * state.kin.cov * dyn.A_r.transpose()) + dyn.Q_r);
  out.shape.mean = dyn.A_p * state.shape.mean;
  out.shape.cov = symmetrized(Eigen::Matrix3d(dyn.A_p * state.shape.cov * dyn.A_p.transpose()) + dyn.Q_p);
  out.time_index = state.time_index + 1;
  return out;
}

/// Time update with the orientation coupled to the estimated turn rate: the
/// angle advances by sampling_period * omega and inherits the turn-rate
/// uncertainty, while the kinematics follow a coordinated-turn transition.
/// Requires a 5-dimensional kinematic state.
inline FilterState predict_turn_coupled(const FilterState& state, const FilterConfig& cfg) {
  if (state.kin.mean.size() != 5)
    throw DimensionMismatch("turn-coupled prediction requires a 5-dimensional kinematic state");
  const DynamicsModel& dyn = cfg.dynamics;
  const double period = dyn.sampling_period;

  Eigen::Matrix<double, 3, 5> b = Eigen::Matrix<double, 3, 5>::Zero();
  b(0, 4) = period;

  FilterState out = state;
  out.shape.mean = b * state.kin.mean + dyn.A_p * state.shape.mean;
  out.shape.cov = symmetrized(Eigen::Matrix3d(b * state.kin.cov * b.transpose()) +
                              Eigen::Matrix3d(dyn.A_p * state.shape.cov * dyn.A_p.transpose()) +
                              dyn.Q_p);

  const CtStep step = constant_turn_step(state.kin.mean, period);
  out.kin.mean = step.mean;
  out.kin.cov =
      symmetrized(Eigen::MatrixXd(step.jacobian * state.kin.cov * step.jacobian.transpose()) +
                  dyn.Q_r);
  out.time_index = state.time_index + 1;
  return out;
}

/// Single-detection likelihood: Gaussian density of y around the predicted
/// position with covariance S Ch S^T + Cv, evaluated at the current means.
inline double likelihood(const FilterState& state, const Eigen::Vector2d& y,
                         const FilterConfig& cfg) {
  const Eigen::Matrix2d s = shape_matrix(state.shape.mean);
  const Eigen::Matrix2d cov = symmetrized(
      Eigen::Matrix2d(s * cfg.sensor.mult_noise_cov * s.transpose()) + cfg.sensor.meas_noise_cov);
  detail::check_condition(cov, "C^y'");
  const Eigen::Vector2d d = y - cfg.H * state.kin.mean;
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  const double quad = d.dot(inverse2(cov) * d);
  return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
}

inline std::optional<Violation> validate(const FilterState& state) {
  if (auto v = validate(state.kin)) return v;
  if (auto v = validate(state.shape)) return v;
  return std::nullopt;
}

inline std::optional<Violation> validate(const FilterConfig& cfg) {
  if (cfg.H.rows() != 2 || cfg.H.cols() != cfg.dynamics.A_r.rows())
    return Violation{"H", "must be 2 x n_r"};
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(2, cfg.H.cols());
  expected.leftCols<2>() = Eigen::Matrix2d::Identity();
  if (cfg.H != expected) return Violation{"H", "must equal [I2 0]"};
  if (!(cfg.axis_floor > 0.0)) return Violation{"axis_floor", "must be positive"};
  if (cfg.ordering_policy != "as-given") return Violation{"ordering_policy", "unsupported"};
  if (auto v = validate(cfg.sensor)) return v;
  if (auto v = validate(cfg.dynamics)) return v;
  return std::nullopt;
}

}  // namespace memekf
