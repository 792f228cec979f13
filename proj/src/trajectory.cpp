#include "dmpkit/trajectory.hpp"

#include "dmpkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace dmpkit {

void Trajectory::validate(int min_samples) const {
  const int n = samples();
  require(n >= min_samples, ErrorKind::InvalidArgument,
          "trajectory needs at least " + std::to_string(min_samples) + " samples, got " +
              std::to_string(n));
  require(positions.rows() == n && positions.cols() >= 1, ErrorKind::InvalidArgument,
          "position array does not match the time stamps");
  for (int k = 0; k < n; ++k) {
    require(std::isfinite(times[k]), ErrorKind::InvalidArgument, "non-finite time stamp");
    if (k > 0) {
      require(times[k] > times[k - 1], ErrorKind::InvalidArgument,
              "times must be strictly increasing");
    }
  }
  require(positions.allFinite(), ErrorKind::InvalidArgument, "non-finite position sample");
  for (const auto* d : {&velocities, &accelerations}) {
    if (*d) {
      require((*d)->rows() == n && (*d)->cols() == positions.cols(), ErrorKind::InvalidArgument,
              "derivative array does not match positions");
      require((*d)->allFinite(), ErrorKind::InvalidArgument, "non-finite derivative sample");
    }
  }
}

double Trajectory::diameter() const {
  double best = 0.0;
  const Eigen::Index n = positions.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      best = std::max(best, (positions.row(i) - positions.row(j)).squaredNorm());
    }
  }
  return std::sqrt(best);
}

Eigen::VectorXd Trajectory::position_at(double t) const {
  if (t <= times.front()) return start();
  if (t >= times.back()) return end();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<Eigen::Index>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  return ((1.0 - w) * positions.row(k - 1) + w * positions.row(k)).transpose();
}

double max_pointwise_error(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (int k = 0; k < a.samples(); ++k) {
    const Eigen::VectorXd pa = a.positions.row(k).transpose();
    worst = std::max(worst, (pa - b.position_at(a.times[k])).norm());
  }
  return worst;
}

}  // namespace dmpkit
