#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

// Domain types shared by the estimators, the simulator, and the metrics.
// All types are plain immutable-style value objects and may be shared freely
// across threads.

namespace memekf {

/// Kinematic state: position in meters is always the first two entries,
/// followed by velocity in m/s and, for constant-turn models, the turn rate
/// in rad/s as the last entry. The dimension (4 or 5) is fixed per filter
/// instance; mixing dimensions is an error, never a silent resize.
struct KinematicState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Vector2d position() const { return mean.head<2>(); }
};

/// Ellipse parameters: counterclockwise orientation angle from the x-axis in
/// radians and the two semi-axis lengths in meters, with their joint 3x3
/// covariance. The angle is stored unwrapped; consumers that compare shapes
/// must go through the SPD extent form (see to_ellipse_summary), which is
/// invariant under the parameterization ambiguities.
struct ShapeState {
  Eigen::Vector3d mean;  // (alpha, l1, l2)
  Eigen::Matrix3d cov;

  double alpha() const { return mean(0); }
  double l1() const { return mean(1); }
  double l2() const { return mean(2); }
};

/// Sensor description: additive measurement noise covariance (m^2), the
/// covariance of the dimensionless multiplicative spread term, and the
/// expected number of detections per scan. The default multiplicative
/// covariance I/4 matches the second moments of a uniform distribution over
/// the elliptical extent.
struct SensorModel {
  Eigen::Matrix2d meas_noise_cov = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d mult_noise_cov = 0.25 * Eigen::Matrix2d::Identity();
  double poisson_mean = 20.0;
};

/// All detections of one scan. An empty scan is legal.
struct MeasurementBatch {
  int time_index = 0;
  std::vector<Eigen::Vector2d> detections;
};

/// Linear dynamics for the kinematic state and the shape parameters.
/// When turn_coupling is set, the prediction advances the orientation by
/// sampling_period times the estimated turn rate and uses a constant-turn
/// kinematic transition (requires a 5-dimensional kinematic state).
struct DynamicsModel {
  Eigen::MatrixXd A_r;
  Eigen::Matrix3d A_p = Eigen::Matrix3d::Identity();
  Eigen::MatrixXd Q_r;
  Eigen::Matrix3d Q_p = Eigen::Matrix3d::Zero();
  double sampling_period = 1.0;
  bool turn_coupling = false;
};

/// Parameterization-free ellipse: center plus SPD extent matrix (m^2). This
/// is the form used by the error metric and by result files.
struct EllipseSummary {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Matrix2d extent = Eigen::Matrix2d::Identity();
};

/// Shape matrix S = R(alpha) * diag(l1, l2) evaluated inline; the extent is
/// S * S^T, which absorbs the sign/ordering ambiguities of the parameters.
inline EllipseSummary to_ellipse_summary(const KinematicState& kin, const ShapeState& shape) {
  const double c = std::cos(shape.alpha());
  const double s = std::sin(shape.alpha());
  Eigen::Matrix2d shape_mat;
  shape_mat << shape.l1() * c, -shape.l2() * s, shape.l1() * s, shape.l2() * c;
  EllipseSummary out;
  out.center = kin.mean.head<2>();
  out.extent = shape_mat * shape_mat.transpose();
  return out;
}

/// First violated invariant, or empty when the object is well formed.
struct Violation {
  std::string field;
  std::string message;
};

namespace detail {

inline bool is_symmetric(const Eigen::MatrixXd& a, double tol = 1e-9) {
  const double scale = std::max(1.0, a.norm());
  return (a - a.transpose()).norm() <= tol * scale;
}

inline bool is_psd(const Eigen::MatrixXd& a, double tol = 1e-9) {
  if (!is_symmetric(a, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const double scale = std::max(1.0, a.norm());
  return eig.eigenvalues().minCoeff() >= -tol * scale;
}

inline bool is_spd(const Eigen::MatrixXd& a, double tol = 1e-12) {
  if (!is_symmetric(a)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  return eig.eigenvalues().minCoeff() > tol * std::max(1.0, a.norm());
}

}  // namespace detail

inline std::optional<Violation> validate(const KinematicState& kin) {
  const auto n = kin.mean.size();
  if (n != 4 && n != 5) return Violation{"mean", "dimension must be 4 or 5"};
  if (kin.cov.rows() != n || kin.cov.cols() != n)
    return Violation{"cov", "dimension mismatch with mean"};
  if (!detail::is_psd(kin.cov)) return Violation{"cov", "not PSD"};
  return std::nullopt;
}

inline std::optional<Violation> validate(const ShapeState& shape) {
  if (!(shape.l1() > 0.0)) return Violation{"l1", "semi-axis not positive"};
  if (!(shape.l2() > 0.0)) return Violation{"l2", "semi-axis not positive"};
  if (!detail::is_psd(shape.cov)) return Violation{"cov", "not PSD"};
  return std::nullopt;
}

inline std::optional<Violation> validate(const SensorModel& sensor) {
  if (!detail::is_spd(sensor.meas_noise_cov)) return Violation{"meas_noise_cov", "not SPD"};
  if (!detail::is_spd(sensor.mult_noise_cov)) return Violation{"mult_noise_cov", "not SPD"};
  if (!(sensor.poisson_mean > 0.0)) return Violation{"poisson_mean", "must be positive"};
  return std::nullopt;
}

inline std::optional<Violation> validate(const DynamicsModel& dyn) {
  if (!(dyn.sampling_period > 0.0)) return Violation{"sampling_period", "must be positive"};
  if (!detail::is_psd(dyn.Q_r)) return Violation{"Q_r", "not PSD"};
  if (!detail::is_psd(dyn.Q_p)) return Violation{"Q_p", "not PSD"};
  if (dyn.A_r.rows() != dyn.A_r.cols()) return Violation{"A_r", "must be square"};
  if (dyn.Q_r.rows() != dyn.A_r.rows()) return Violation{"Q_r", "dimension mismatch with A_r"};
  return std::nullopt;
}

inline std::optional<Violation> validate(const EllipseSummary& summary) {
  if (!detail::is_psd(summary.extent)) return Violation{"extent", "not PSD"};
  return std::nullopt;
}

}  // namespace memekf
