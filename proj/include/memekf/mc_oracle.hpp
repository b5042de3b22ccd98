#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "memekf/rng.hpp"
#include "memekf/state.hpp"

// Monte-Carlo estimators for the moments the filter computes analytically.
// These are the test oracles: they deliberately share no code with the
// analytic moment layer (the on-ellipse arithmetic is written out inline) and
// the filter never calls them. Standard errors come from 100 independent
// sample blocks, so k-sigma acceptance gates are straightforward.

namespace memekf {

struct McEstimate {
  Eigen::MatrixXd value;
  Eigen::MatrixXd standard_error;  // entrywise, from block means
  long samples = 0;
};

struct McMoments {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d mean_se = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d cov_se = Eigen::Matrix3d::Zero();
  long samples = 0;
};

namespace oracle_detail {

constexpr int kBlocks = 100;

inline void require_samples(long n, long minimum) {
  if (n < minimum)
    throw std::invalid_argument("oracle sample count below minimum of " +
                                std::to_string(minimum));
}

/// Symmetric PSD factor L with L L^T = a (works for singular covariances).
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

inline Eigen::Vector3d draw3(SplitMix64& gen, const Eigen::Vector3d& mean,
                             const Eigen::MatrixXd& factor) {
  const NormalPair ab = normal_pair(gen);
  const NormalPair cd = normal_pair(gen);
  return mean + factor * Eigen::Vector3d(ab.a, ab.b, cd.a);
}

inline Eigen::Vector2d draw2(SplitMix64& gen, const Eigen::MatrixXd& factor) {
  const NormalPair ab = normal_pair(gen);
  return factor * Eigen::Vector2d(ab.a, ab.b);
}

/// Streaming covariance accumulator with block bookkeeping.
template <int Rows, int Cols>
class BlockedCov {
 public:
  using Block = Eigen::Matrix<double, Rows, Cols>;

  void add(const Eigen::Matrix<double, Rows, 1>& left,
           const Eigen::Matrix<double, Cols, 1>& right) {
    sum_left_ += left;
    sum_right_ += right;
    sum_outer_ += left * right.transpose();
    ++count_;
  }

  void close_block() {
    blocks_.push_back(finish(sum_left_, sum_right_, sum_outer_, count_));
    total_left_ += sum_left_;
    total_right_ += sum_right_;
    total_outer_ += sum_outer_;
    total_count_ += count_;
    sum_left_.setZero();
    sum_right_.setZero();
    sum_outer_.setZero();
    count_ = 0;
  }

  Block value() const { return finish(total_left_, total_right_, total_outer_, total_count_); }

  Eigen::Matrix<double, Rows, 1> mean_left() const {
    return total_left_ / static_cast<double>(total_count_);
  }

  Block standard_error() const {
    Block mean = Block::Zero();
    for (const Block& b : blocks_) mean += b;
    mean /= static_cast<double>(blocks_.size());
    Block var = Block::Zero();
    for (const Block& b : blocks_) var += (b - mean).cwiseProduct(b - mean);
    var /= static_cast<double>(blocks_.size() - 1);
    return (var / static_cast<double>(blocks_.size())).cwiseSqrt();
  }

  long total_count() const { return total_count_; }

 private:
  static Block finish(const Eigen::Matrix<double, Rows, 1>& sl,
                      const Eigen::Matrix<double, Cols, 1>& sr, const Block& so, long n) {
    const double dn = static_cast<double>(n);
    return (so - sl * sr.transpose() / dn) / (dn - 1.0);
  }

  Eigen::Matrix<double, Rows, 1> sum_left_ = Eigen::Matrix<double, Rows, 1>::Zero();
  Eigen::Matrix<double, Cols, 1> sum_right_ = Eigen::Matrix<double, Cols, 1>::Zero();
  Block sum_outer_ = Block::Zero();
  long count_ = 0;

  Eigen::Matrix<double, Rows, 1> total_left_ = Eigen::Matrix<double, Rows, 1>::Zero();
  Eigen::Matrix<double, Cols, 1> total_right_ = Eigen::Matrix<double, Cols, 1>::Zero();
  Block total_outer_ = Block::Zero();
  long total_count_ = 0;
  std::vector<Block> blocks_;
};

/// One point of the elliptical spread: S(p) h, written out longhand.
inline Eigen::Vector2d ellipse_spread_point(const Eigen::Vector3d& p, const Eigen::Vector2d& h) {
  const double c = std::cos(p(0));
  const double s = std::sin(p(0));
  return {p(1) * c * h(0) - p(2) * s * h(1), p(1) * s * h(0) + p(2) * c * h(1)};
}

}  // namespace oracle_detail

/// Empirical covariance of S(p)h with p ~ N(p_mean, p_cov), h ~ N(0, h_cov):
/// the exact nonlinear quantity the analytic spread covariance approximates.
inline McEstimate mc_spread_cov(const Eigen::Vector3d& p_mean, const Eigen::Matrix3d& p_cov,
                                const Eigen::Matrix2d& h_cov, long samples, std::uint64_t seed) {
  using namespace oracle_detail;
  require_samples(samples, 10000);
  const Eigen::MatrixXd lp = psd_factor(p_cov);
  const Eigen::MatrixXd lh = psd_factor(h_cov);
  const long per_block = samples / kBlocks;
  BlockedCov<2, 2> acc;
  for (int b = 0; b < kBlocks; ++b) {
    SplitMix64 gen(substream(seed, static_cast<std::uint64_t>(b)));
    for (long i = 0; i < per_block; ++i) {
      const Eigen::Vector3d p = draw3(gen, p_mean, lp);
      const Eigen::Vector2d h = draw2(gen, lh);
      const Eigen::Vector2d v = ellipse_spread_point(p, h);
      acc.add(v, v);
    }
    acc.close_block();
  }
  return {acc.value(), acc.standard_error(), acc.total_count()};
}

/// Empirical mean and covariance of the quadratic pseudo-measurement
/// (d1^2, d2^2, d1 d2) of a zero-mean Gaussian d with covariance y_cov.
inline McMoments mc_pseudo_moments(const Eigen::Matrix2d& y_cov, long samples,
                                   std::uint64_t seed) {
  using namespace oracle_detail;
  require_samples(samples, 10000);
  const Eigen::MatrixXd ly = psd_factor(y_cov);
  const long per_block = samples / kBlocks;
  BlockedCov<3, 3> acc;
  Eigen::Matrix<double, 3, Eigen::Dynamic> block_means(3, kBlocks);
  for (int b = 0; b < kBlocks; ++b) {
    SplitMix64 gen(substream(seed, static_cast<std::uint64_t>(b)));
    Eigen::Vector3d block_sum = Eigen::Vector3d::Zero();
    for (long i = 0; i < per_block; ++i) {
      const Eigen::Vector2d d = draw2(gen, ly);
      const Eigen::Vector3d pseudo(d(0) * d(0), d(1) * d(1), d(0) * d(1));
      acc.add(pseudo, pseudo);
      block_sum += pseudo;
    }
    acc.close_block();
    block_means.col(b) = block_sum / static_cast<double>(per_block);
  }
  McMoments out;
  out.cov = acc.value();
  out.cov_se = acc.standard_error();
  out.mean = acc.mean_left();
  const Eigen::Vector3d grand = block_means.rowwise().mean();
  Eigen::Vector3d var = Eigen::Vector3d::Zero();
  for (int b = 0; b < kBlocks; ++b) var += (block_means.col(b) - grand).cwiseAbs2();
  var /= static_cast<double>(kBlocks - 1);
  out.mean_se = (var / static_cast<double>(kBlocks)).cwiseSqrt();
  out.samples = acc.total_count();
  return out;
}

/// Empirical cross-covariance between the shape parameters and the
/// pseudo-measurement under the full generative measurement model
/// y = [I 0] r + S(p) h + v, with the pseudo-measurement shifted by the
/// predicted position of r_mean.
inline McEstimate mc_cross_cov(const Eigen::Vector3d& p_mean, const Eigen::Matrix3d& p_cov,
                               const Eigen::Matrix2d& h_cov, const Eigen::Matrix2d& v_cov,
                               const Eigen::VectorXd& r_mean, const Eigen::MatrixXd& r_cov,
                               long samples, std::uint64_t seed) {
  using namespace oracle_detail;
  require_samples(samples, 100000);
  const Eigen::MatrixXd lp = psd_factor(p_cov);
  const Eigen::MatrixXd lh = psd_factor(h_cov);
  const Eigen::MatrixXd lv = psd_factor(v_cov);
  const Eigen::MatrixXd lr = psd_factor(r_cov);
  const auto dim_r = r_mean.size();
  const Eigen::Vector2d y_bar = r_mean.head<2>();
  const long per_block = samples / kBlocks;
  BlockedCov<3, 3> acc;
  for (int b = 0; b < kBlocks; ++b) {
    SplitMix64 gen(substream(seed, static_cast<std::uint64_t>(b)));
    for (long i = 0; i < per_block; ++i) {
      Eigen::VectorXd z(dim_r);
      for (Eigen::Index j = 0; j < dim_r; j += 2) {
        const NormalPair ab = normal_pair(gen);
        z(j) = ab.a;
        if (j + 1 < dim_r) z(j + 1) = ab.b;
      }
      const Eigen::VectorXd r = r_mean + lr * z;
      const Eigen::Vector3d p = draw3(gen, p_mean, lp);
      const Eigen::Vector2d h = draw2(gen, lh);
      const Eigen::Vector2d v = draw2(gen, lv);
      const Eigen::Vector2d y = r.head<2>() + ellipse_spread_point(p, h) + v;
      const Eigen::Vector2d d = y - y_bar;
      acc.add(p, Eigen::Vector3d(d(0) * d(0), d(1) * d(1), d(0) * d(1)));
    }
    acc.close_block();
  }
  return {acc.value(), acc.standard_error(), acc.total_count()};
}

/// Comparison record between an analytic moment and its Monte-Carlo estimate.
struct OracleReport {
  std::string target;
  Eigen::MatrixXd analytic;
  Eigen::MatrixXd mc;
  long samples = 0;
  double rel_frobenius = 0.0;
  double mc_standard_error = 0.0;  // Frobenius norm of the entrywise SEs
};

inline OracleReport make_report(std::string target, const Eigen::MatrixXd& analytic,
                                const McEstimate& estimate) {
  OracleReport report;
  report.target = std::move(target);
  report.analytic = analytic;
  report.mc = estimate.value;
  report.samples = estimate.samples;
  const double denom = estimate.value.norm();
  report.rel_frobenius = denom > 0.0 ? (analytic - estimate.value).norm() / denom : 0.0;
  report.mc_standard_error = estimate.standard_error.norm();
  return report;
}

}  // namespace memekf
