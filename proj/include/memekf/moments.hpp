#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "memekf/small_linalg.hpp"

// Analytic moments of the multiplicative-error measurement model. Everything
// here is a pure function of the shape parameter vector p = (alpha, l1, l2)
// and small covariance matrices; the filter recursion is assembled from these
// pieces. All operations are total for PSD inputs.

namespace memekf {

/// Row selectors that reduce the 2-fold Kronecker square of a 2-vector
/// (y1^2, y1y2, y2y1, y2^2) to its three distinct entries. F picks the
/// (1,4,2) components, F_tilde the (1,4,3) components.
struct FMatrices {
  Eigen::Matrix<double, 3, 4> F;
  Eigen::Matrix<double, 3, 4> F_tilde;
};

inline const FMatrices& f_matrices() {
  static const FMatrices fm = [] {
    FMatrices m;
    m.F << 1, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0;
    m.F_tilde << 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0;
    return m;
  }();
  return fm;
}

/// Shape matrix S = R(alpha) * diag(l1, l2): rotation times axis scaling.
inline Eigen::Matrix2d shape_matrix(const Eigen::Vector3d& p) {
  const double c = std::cos(p(0));
  const double s = std::sin(p(0));
  Eigen::Matrix2d out;
  out << p(1) * c, -p(2) * s, p(1) * s, p(2) * c;
  return out;
}

/// S together with its rows S1, S2 and their Jacobians with respect to p.
struct ShapeDerivatives {
  Eigen::Matrix2d S;
  Eigen::RowVector2d S1;
  Eigen::RowVector2d S2;
  Eigen::Matrix<double, 2, 3> J1;  // d S1 / d p
  Eigen::Matrix<double, 2, 3> J2;  // d S2 / d p
};

inline ShapeDerivatives shape_jacobians(const Eigen::Vector3d& p) {
  const double c = std::cos(p(0));
  const double s = std::sin(p(0));
  const double l1 = p(1);
  const double l2 = p(2);
  ShapeDerivatives d;
  d.S << l1 * c, -l2 * s, l1 * s, l2 * c;
  d.S1 = d.S.row(0);
  d.S2 = d.S.row(1);
  d.J1 << -l1 * s, c, 0, -l2 * c, 0, -s;
  d.J2 << l1 * c, s, 0, -l2 * s, 0, c;
  return d;
}

/// Covariance of the on-object spread S(p)h, split into the contribution of
/// the multiplicative noise at the mean shape (c1 = S Ch S^T) and the
/// first-order contribution of shape-parameter uncertainty (c2, trace form).
/// c2 is symmetric analytically; it is re-symmetrized to keep floating-point
/// asymmetry out of the Kalman gain.
struct SpreadCovariance {
  Eigen::Matrix2d c1;
  Eigen::Matrix2d c2;

  Eigen::Matrix2d total() const { return c1 + c2; }
};

inline SpreadCovariance spread_covariance(const Eigen::Vector3d& p, const Eigen::Matrix3d& cov_p,
                                          const Eigen::Matrix2d& cov_h) {
  const ShapeDerivatives d = shape_jacobians(p);
  SpreadCovariance out;
  out.c1 = d.S * cov_h * d.S.transpose();
  const Eigen::Matrix<double, 2, 3>* jac[2] = {&d.J1, &d.J2};
  Eigen::Matrix2d c2;
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      c2(m, n) = (cov_p * jac[n]->transpose() * cov_h * (*jac[m])).trace();
  out.c2 = symmetrized(c2);
  return out;
}

/// Pseudo-measurement: the reduced, shifted 2-fold Kronecker square of a
/// detection, ((y1-yb1)^2, (y2-yb2)^2, (y1-yb1)(y2-yb2)).
inline Eigen::Vector3d pseudo_meas(const Eigen::Vector2d& y, const Eigen::Vector2d& y_bar) {
  const Eigen::Vector2d d = y - y_bar;
  return {d(0) * d(0), d(1) * d(1), d(0) * d(1)};
}

/// Expected pseudo-measurement: the distinct second moments (c11, c22, c12)
/// of the measurement covariance.
inline Eigen::Vector3d pseudo_meas_mean(const Eigen::Matrix2d& cov_y) {
  return {cov_y(0, 0), cov_y(1, 1), cov_y(0, 1)};
}

/// Pseudo-measurement covariance from the Gaussian fourth-moment identities,
/// written out entrywise.
inline Eigen::Matrix3d pseudo_meas_cov(const Eigen::Matrix2d& cov_y) {
  const double c11 = cov_y(0, 0);
  const double c22 = cov_y(1, 1);
  const double c12 = 0.5 * (cov_y(0, 1) + cov_y(1, 0));
  Eigen::Matrix3d out;
  out << 2 * c11 * c11, 2 * c12 * c12, 2 * c11 * c12,
         2 * c12 * c12, 2 * c22 * c22, 2 * c22 * c12,
         2 * c11 * c12, 2 * c22 * c12, c11 * c22 + c12 * c12;
  return out;
}

/// The same covariance via the compact Kronecker route
/// F (cov_y x cov_y) (F + F_tilde)^T; agrees with pseudo_meas_cov to machine
/// precision and is the form used inside the filter.
inline Eigen::Matrix3d pseudo_meas_cov_kron(const Eigen::Matrix2d& cov_y) {
  Eigen::Matrix4d kron;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      kron.block<2, 2>(2 * i, 2 * j) = cov_y(i, j) * cov_y;
  const FMatrices& fm = f_matrices();
  return fm.F * kron * (fm.F + fm.F_tilde).transpose();
}

/// Expected Jacobian of the pseudo-measurement with respect to the shape
/// parameters; the rows combine the shape-matrix rows with their Jacobians.
inline Eigen::Matrix3d pseudo_meas_sensitivity(const ShapeDerivatives& d,
                                               const Eigen::Matrix2d& cov_h) {
  Eigen::Matrix3d m;
  m.row(0) = 2.0 * d.S1 * cov_h * d.J1;
  m.row(1) = 2.0 * d.S2 * cov_h * d.J2;
  m.row(2) = d.S1 * cov_h * d.J2 + d.S2 * cov_h * d.J1;
  return m;
}

/// Cross-covariance between the shape parameters and the pseudo-measurement,
/// cov_p * M^T with M the expected pseudo-measurement Jacobian.
inline Eigen::Matrix3d pseudo_cross_cov(const Eigen::Vector3d& p, const Eigen::Matrix3d& cov_p,
                                        const Eigen::Matrix2d& cov_h) {
  const ShapeDerivatives d = shape_jacobians(p);
  return cov_p * pseudo_meas_sensitivity(d, cov_h).transpose();
}

}  // namespace memekf
