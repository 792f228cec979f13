#pragma once

#include "dmpkit/learn.hpp"

#include <Eigen/Dense>

#include <utility>

namespace dmpkit {

/// Roto-dilatation S = scale * rotation.
class AffineMap {
 public:
  AffineMap() = default;
  AffineMap(double scale, Eigen::MatrixXd rotation);

  static AffineMap identity(int dims);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Eigen::MatrixXd& rotation() const { return rotation_; }
  double scale() const { return scale_; }
  int dims() const { return static_cast<int>(matrix_.rows()); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix_ * x; }

  /// S^-1 = R^T / scale; no numerical inversion.
  AffineMap inverse() const;

 private:
  double scale_ = 1.0;
  Eigen::MatrixXd rotation_;
  Eigen::MatrixXd matrix_;
};

/// Rotation taking u/|u| to v/|v| inside their common plane and acting as the
/// identity on its orthogonal complement. In one dimension a reversed
/// direction yields the reflection -1.
Eigen::MatrixXd rotation_between(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Map taking the chord g - x0 onto gp - x0p.
AffineMap rotodilatation(const Eigen::VectorXd& x0, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& x0p, const Eigen::VectorXd& gp);

/// K' = S K S^-1, D' = S D S^-1. Scalar gains are returned unchanged.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> conjugate_gains(const Gains& gains,
                                                            const AffineMap& map);

/// Same conjugation for an arbitrary invertible transform.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> conjugate_gains(const Gains& gains,
                                                            const Eigen::MatrixXd& transform);

}  // namespace dmpkit
