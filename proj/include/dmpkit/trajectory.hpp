#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace dmpkit {

/// Time-stamped d-dimensional samples; one row per sample.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd positions;
  std::optional<Eigen::MatrixXd> velocities;
  std::optional<Eigen::MatrixXd> accelerations;

  int samples() const { return static_cast<int>(times.size()); }
  int dims() const { return static_cast<int>(positions.cols()); }
  double duration() const { return times.back() - times.front(); }

  Eigen::VectorXd start() const { return positions.row(0).transpose(); }
  Eigen::VectorXd end() const { return positions.row(positions.rows() - 1).transpose(); }

  /// Checks n >= min_samples, strictly increasing times, finite rows, matching shapes.
  void validate(int min_samples = 4) const;

  /// Largest pairwise distance between samples.
  double diameter() const;

  /// Linear interpolation of positions at time t (clamped to the sampled range).
  Eigen::VectorXd position_at(double t) const;
};

/// Largest pointwise distance between `a` and `b` evaluated at the sample times of `a`
/// (b is linearly interpolated).
double max_pointwise_error(const Trajectory& a, const Trajectory& b);

}  // namespace dmpkit
