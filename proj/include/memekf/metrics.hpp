#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "memekf/small_linalg.hpp"
#include "memekf/state.hpp"

namespace memekf {

enum class Aggregation { kSingleRun, kRmsOverRuns };

struct ErrorPoint {
  int time_index = 0;
  double gw = 0.0;
};

/// Per-step error series of one run, or the RMS aggregate over runs.
struct ErrorSeries {
  std::vector<ErrorPoint> points;
  Aggregation tag = Aggregation::kSingleRun;
};

/// Gaussian Wasserstein distance between two ellipses,
/// d^2 = |c1 - c2|^2 + tr(E1 + E2 - 2 (sqrt(E1) E2 sqrt(E1))^(1/2)).
/// In two dimensions the cross term has the exact scalar form
/// tr((sqrt(E1) E2 sqrt(E1))^(1/2)) = sqrt(tr(E1 E2) + 2 sqrt(det E1 det E2)),
/// and the trace term is evaluated as a difference of squares; this keeps the
/// distance of an ellipse to itself at round-off level, which the matrix-root
/// route cannot do once the extents are ill conditioned. Negative round-off
/// determinants are floored at zero and flagged through `floored`.
inline double gw_distance(const EllipseSummary& a, const EllipseSummary& b,
                          bool* floored = nullptr) {
  if (a.center == b.center && a.extent == b.extent) return 0.0;
  const Eigen::Matrix2d& ea = a.extent;
  const Eigen::Matrix2d& eb = b.extent;
  double det_a = ea(0, 0) * ea(1, 1) - ea(0, 1) * ea(1, 0);
  double det_b = eb(0, 0) * eb(1, 1) - eb(0, 1) * eb(1, 0);
  if (det_a < 0.0 || det_b < 0.0) {
    if (floored != nullptr) *floored = true;
    det_a = std::max(det_a, 0.0);
    det_b = std::max(det_b, 0.0);
  }
  const double trace_sum = ea.trace() + eb.trace();
  const double cross_sq = (ea * eb).trace() + 2.0 * std::sqrt(det_a * det_b);
  const double cross = std::sqrt(std::max(cross_sq, 0.0));
  // tr(E1) + tr(E2) - 2 cross, written as (trace_sum^2 - 4 cross^2) over
  // (trace_sum + 2 cross) to avoid cancellation when the ellipses coincide.
  const double denom = trace_sum + 2.0 * cross;
  const double trace_term =
      denom > 0.0 ? (trace_sum * trace_sum - 4.0 * cross_sq) / denom : 0.0;
  const double d2 = (a.center - b.center).squaredNorm() + std::max(trace_term, 0.0);
  return std::sqrt(std::max(d2, 0.0));
}

/// Per-step root mean square over runs; distances are squared before
/// averaging. All runs must share length and time indexing.
inline ErrorSeries rms_series(const std::vector<ErrorSeries>& runs) {
  ErrorSeries out;
  out.tag = Aggregation::kRmsOverRuns;
  if (runs.empty()) return out;
  const std::size_t len = runs.front().points.size();
  for (const ErrorSeries& run : runs) {
    if (run.points.size() != len) throw std::invalid_argument("rms_series: length mismatch");
  }
  out.points.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    const int t = runs.front().points[k].time_index;
    double sum_sq = 0.0;
    for (const ErrorSeries& run : runs) {
      if (run.points[k].time_index != t)
        throw std::invalid_argument("rms_series: time index mismatch");
      sum_sq += run.points[k].gw * run.points[k].gw;
    }
    out.points[k] = {t, std::sqrt(sum_sq / static_cast<double>(runs.size()))};
  }
  return out;
}

}  // namespace memekf
