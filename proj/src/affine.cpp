#include "dmpkit/affine.hpp"

#include "dmpkit/error.hpp"

#include <cmath>

namespace dmpkit {

AffineMap::AffineMap(double scale, Eigen::MatrixXd rotation)
    : scale_(scale), rotation_(std::move(rotation)) {
  require(scale_ > 0.0 && std::isfinite(scale_), ErrorKind::InvalidArgument,
          "roto-dilatation scale must be positive");
  require(rotation_.rows() == rotation_.cols(), ErrorKind::InvalidArgument,
          "rotation must be square");
  matrix_ = scale_ * rotation_;
}

AffineMap AffineMap::identity(int dims) { return AffineMap(1.0, Eigen::MatrixXd::Identity(dims, dims)); }

AffineMap AffineMap::inverse() const { return AffineMap(1.0 / scale_, rotation_.transpose()); }

Eigen::MatrixXd rotation_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  require(u.size() == v.size() && u.size() >= 1, ErrorKind::InvalidArgument,
          "rotation needs two vectors of the same dimension");
  const double nu = u.norm();
  const double nv = v.norm();
  require(nu > 0.0 && nv > 0.0, ErrorKind::InvalidArgument, "cannot rotate a zero vector");
  const Eigen::Index d = u.size();
  const Eigen::VectorXd uh = u / nu;
  const Eigen::VectorXd vh = v / nv;

  const double cosine = uh.dot(vh);
  Eigen::VectorXd w = vh - cosine * uh;
  double wn = w.norm();
  double sine = wn;
  if (wn <= 1e-14) {
    if (cosine > 0.0) return Eigen::MatrixXd::Identity(d, d);
    // On a line the only orthogonal map reversing direction is the reflection.
    if (d == 1) return -Eigen::MatrixXd::Identity(1, 1);
    // Antiparallel: half-turn in the plane of u and the least aligned axis.
    Eigen::Index axis = 0;
    uh.cwiseAbs().minCoeff(&axis);
    w = Eigen::VectorXd::Unit(d, axis) - uh(axis) * uh;
    wn = w.norm();
    sine = 0.0;
  }
  w /= wn;
  // Second Gram-Schmidt pass: w comes from a difference of nearly equal vectors
  // when u and v are close to (anti)parallel.
  w -= w.dot(uh) * uh;
  w.normalize();

  const double angle = std::atan2(sine, cosine);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d, d);
  r += (c - 1.0) * (uh * uh.transpose() + w * w.transpose());
  r += s * (w * uh.transpose() - uh * w.transpose());
  return r;
}

AffineMap rotodilatation(const Eigen::VectorXd& x0, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& x0p, const Eigen::VectorXd& gp) {
  require(x0.size() == g.size() && x0p.size() == gp.size() && x0.size() == x0p.size(),
          ErrorKind::InvalidArgument, "endpoint dimensions differ");
  const Eigen::VectorXd chord = g - x0;
  const Eigen::VectorXd target = gp - x0p;
  const double from = chord.norm();
  const double to = target.norm();
  require(from > 0.0, ErrorKind::NullTransform,
          "learned start and goal coincide; the roto-dilatation would be a null matrix");
  require(to > 0.0, ErrorKind::NullTransform,
          "new start and goal coincide; the roto-dilatation would be a null matrix");
  return AffineMap(to / from, rotation_between(chord, target));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> conjugate_gains(const Gains& gains,
                                                            const AffineMap& map) {
  const Eigen::MatrixXd k = gains.elastic.asDiagonal();
  const Eigen::MatrixXd d = gains.damping.asDiagonal();
  if (gains.scalar()) return {k, d};
  const Eigen::MatrixXd inv = map.inverse().matrix();
  return {map.matrix() * k * inv, map.matrix() * d * inv};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> conjugate_gains(const Gains& gains,
                                                            const Eigen::MatrixXd& transform) {
  const Eigen::MatrixXd k = gains.elastic.asDiagonal();
  const Eigen::MatrixXd d = gains.damping.asDiagonal();
  if (gains.scalar()) return {k, d};
  const Eigen::MatrixXd inv = transform.partialPivLu().inverse();
  return {transform * k * inv, transform * d * inv};
}

}  // namespace dmpkit
