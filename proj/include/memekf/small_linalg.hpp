#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>

// Closed-form routines for the fixed 2x2/3x3 symmetric matrices that occur in
// the filter recursions. General-purpose decompositions are avoided on these
// hot paths; sizes never vary.

namespace memekf {

template <typename Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& a) {
  return (0.5 * (a + a.transpose())).eval();
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::array<double, 2> sym_eigenvalues(const Eigen::Matrix2d& a) noexcept {
  const double mean = 0.5 * (a(0, 0) + a(1, 1));
  const double delta = 0.5 * (a(0, 0) - a(1, 1));
  const double radius = std::hypot(delta, 0.5 * (a(0, 1) + a(1, 0)));
  return {mean - radius, mean + radius};
}

/// Eigenvalues of a symmetric 3x3 matrix, ascending (trigonometric form).
inline std::array<double, 3> sym_eigenvalues(const Eigen::Matrix3d& a) noexcept {
  const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  if (off == 0.0) {
    std::array<double, 3> ev{a(0, 0), a(1, 1), a(2, 2)};
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
    if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
    return ev;
  }
  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * off;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  double r = 0.5 * b.determinant();
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double emax = q + 2.0 * p * std::cos(phi);
  const double emin = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  return {emin, 3.0 * q - emax - emin, emax};
}

struct SymEigen2 {
  std::array<double, 2> values;  // ascending
  Eigen::Matrix2d vectors;       // column i pairs with values[i]
};

/// Closed-form eigendecomposition of a symmetric 2x2 matrix.
inline SymEigen2 sym_eigendecomposition(const Eigen::Matrix2d& a) noexcept {
  SymEigen2 out;
  out.values = sym_eigenvalues(a);
  const double b = 0.5 * (a(0, 1) + a(1, 0));
  if (b == 0.0 && a(0, 0) == a(1, 1)) {
    out.vectors = Eigen::Matrix2d::Identity();
    return out;
  }
  // Angle of the eigenvector paired with the larger eigenvalue.
  const double theta = 0.5 * std::atan2(2.0 * b, a(0, 0) - a(1, 1));
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  out.vectors << -s, c, c, s;
  return out;
}

/// Symmetric PSD square root of a 2x2 matrix. Negative eigenvalues arising
/// from round-off are floored at zero; `floored` is set when that happens.
inline Eigen::Matrix2d spd_sqrt(const Eigen::Matrix2d& a, bool* floored = nullptr) noexcept {
  const SymEigen2 eig = sym_eigendecomposition(symmetrized(a));
  if (floored != nullptr && eig.values[0] < 0.0) *floored = true;
  const double r0 = std::sqrt(std::max(eig.values[0], 0.0));
  const double r1 = std::sqrt(std::max(eig.values[1], 0.0));
  const Eigen::Vector2d v0 = eig.vectors.col(0);
  const Eigen::Vector2d v1 = eig.vectors.col(1);
  return r0 * v0 * v0.transpose() + r1 * v1 * v1.transpose();
}

inline Eigen::Matrix2d inverse2(const Eigen::Matrix2d& a) noexcept {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  Eigen::Matrix2d inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv / det;
}

inline Eigen::Matrix3d inverse3(const Eigen::Matrix3d& a) noexcept {
  Eigen::Matrix3d adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double det = a(0, 0) * adj(0, 0) + a(0, 1) * adj(1, 0) + a(0, 2) * adj(2, 0);
  return adj / det;
}

/// Spectral condition number of a symmetric matrix; infinity when singular.
template <typename Matrix>
double sym_condition(const Matrix& a) noexcept {
  const auto ev = sym_eigenvalues(a);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : ev) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace memekf
