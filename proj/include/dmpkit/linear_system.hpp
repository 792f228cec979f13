#pragma once

#include <Eigen/Dense>

namespace dmpkit {

/// Symmetric normal-equations system A w = b. `bandwidth` is the structural
/// half-bandwidth: entries with |h - k| > bandwidth are exactly zero.
struct LinearSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  int bandwidth = 0;

  int size() const { return static_cast<int>(matrix.rows()); }

  /// Storage the solver picks: banded when bandwidth < size / 4.
  bool prefers_banded() const { return 4 * bandwidth < size(); }

  /// Entries that may be nonzero under the structural band.
  long structural_nonzeros() const;
  /// Entries that are exactly zero in floating point.
  long numeric_zeros() const;
};

enum class SolvePath { Auto, Dense, Banded };

struct SolveResult {
  Eigen::VectorXd weights;
  double residual = 0.0;  ///< ||A w - b|| / ||b|| (0 when b = 0)
  SolvePath path = SolvePath::Auto;
};

/// Lower-triangular band Cholesky factor stored by diagonals:
/// band(j, c) holds L(c + j, c).
class BandCholesky {
 public:
  /// Factors the band of `a`; returns false when a pivot is not safely positive.
  bool factor(const Eigen::MatrixXd& a, int bandwidth);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  Eigen::MatrixXd band_;
  int bandwidth_ = 0;
};

/// Symmetric positive-definite solve. Throws ConditioningError when the
/// matrix is singular to working precision.
SolveResult solve_weights(const LinearSystem& sys, SolvePath path = SolvePath::Auto);

/// Spectral condition number (ratio of extreme singular values); +inf when singular.
double condition_number(const Eigen::MatrixXd& a);
inline double condition_number(const LinearSystem& sys) { return condition_number(sys.matrix); }

}  // namespace dmpkit
