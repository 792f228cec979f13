#pragma once

#include "dmpkit/basis.hpp"
#include "dmpkit/linear_system.hpp"
#include "dmpkit/phase.hpp"
#include "dmpkit/quadrature.hpp"
#include "dmpkit/trajectory.hpp"

#include <Eigen/Dense>

#include <vector>

namespace dmpkit {

/// Diagonal elastic (K) and damping (D) gains, one entry per dimension.
struct Gains {
  Eigen::VectorXd elastic;
  Eigen::VectorXd damping;

  /// D = 2 sqrt(K) per component.
  static Gains critically_damped(const Eigen::VectorXd& elastic);
  static Gains critically_damped(double k, int dims);

  int dims() const { return static_cast<int>(elastic.size()); }
  /// Same K and D in every component (K and D are multiples of the identity).
  bool scalar() const;
  void validate() const;
};

/// How the demonstration is turned into forcing samples.
enum class ExtractionForm {
  Original,   ///< f = (dv - K(g - x) + D v) / (g - x0)
  Classical,  ///< f = (dv + D v) / K - (g - x) + (g - x0) s
};

/// Forcing values at decreasing phases; one row per sample.
struct ForcingSamples {
  std::vector<double> phases;
  Eigen::MatrixXd values;

  /// Piecewise-linear interpolation in s, clamped at the sampled extremes.
  double at(double s, int dim) const;
  /// Same interpolation at increasing phases, in one sweep.
  std::vector<double> at(std::span<const double> increasing_s, int dim) const;
};

/// Learned skill.
struct DmpModel {
  Gains gains;
  PhaseConfig phase;
  BasisSet basis;
  Eigen::MatrixXd weights;  ///< d x (N + 1)
  Eigen::MatrixXd biases;   ///< d x (N + 1) when basis.biased(), else empty
  Eigen::VectorXd learned_x0;
  Eigen::VectorXd learned_g;

  int dims() const { return static_cast<int>(weights.rows()); }
  /// Regressor coefficients for one dimension: [w] or [w; beta].
  Eigen::VectorXd coefficients(int dim) const;
  void set_coefficients(int dim, const Eigen::VectorXd& coeffs);
};

/// Fills velocities and accelerations by divided differences (three-point
/// central in the interior, second-order one-sided at the ends). Derivative
/// arrays already present are left untouched.
Trajectory differentiate(Trajectory traj);

/// Forcing samples from a demonstration with derivatives. Times are shifted
/// so the first sample is t = 0; learning uses tau = 1, x0 = first sample and
/// g = last sample.
ForcingSamples extract_forcing(const Trajectory& traj, const Gains& gains,
                               const PhaseConfig& phase, ExtractionForm form);

/// Quadrature grid used for all normal-equation integrals over [s_lo, s_hi]:
/// Simpson panels between the basis centers, support edges and (when given)
/// the phases of the forcing samples inside the interval.
Quadrature learning_quadrature(const BasisSet& basis, double s_lo, double s_hi,
                               std::span<const double> sample_phases = {});

/// Regressor rows of `basis` evaluated on a quadrature grid, stored sparsely
/// (only entries that are nonzero in floating point).
class RegressorTable {
 public:
  RegressorTable(const BasisSet& basis, const Quadrature& quad);

  const Quadrature& quadrature() const { return quad_; }
  int row_size() const { return row_size_; }

  /// Normal matrix sum_k w_k r_k r_k^T.
  Eigen::MatrixXd gram() const;
  /// Moment vector sum_k w_k r_k y_k for target values y at the nodes.
  Eigen::VectorXd moments(std::span<const double> target) const;
  /// Model output r_k . coeffs at every node.
  std::vector<double> evaluate(const Eigen::VectorXd& coeffs) const;

 private:
  Quadrature quad_;
  int row_size_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<int> index_;
  std::vector<double> value_;
};

/// A and b for dimension `dim` over the full phase range [exp(-alpha T), 1]:
/// a_hk = int r_h r_k ds, b_h = int r_h f ds, with r the normalized regressor row.
LinearSystem assemble_system(const BasisSet& basis, const ForcingSamples& forcing, int dim,
                             const PhaseConfig& phase);

/// Bandwidth recorded in an assembled system: structural for unbiased
/// compact sets, dense otherwise.
int system_bandwidth(const BasisSet& basis);

/// differentiate -> classical extraction -> assemble -> solve, per dimension.
DmpModel learn_dmp(const Trajectory& traj, const Gains& gains, const PhaseConfig& phase,
                   const BasisSet& basis);

/// L2 distance (in s) between the model forcing and the forcing samples of
/// dimension `dim`, with the learning quadrature.
double forcing_l2_error(const DmpModel& model, const ForcingSamples& forcing, int dim);

struct UpdateResult {
  DmpModel model;
  std::vector<int> indices;  ///< updated weight indices, increasing
};

/// Indices whose compact supports meet the phase window of [t0, t1].
std::vector<int> update_indices(const BasisSet& basis, const PhaseConfig& phase, double t0,
                                double t1);

/// Re-solves only the weights whose supports meet [t0, t1], using the forcing
/// of `new_traj` on the union of the selected supports. Other weights are
/// copied bitwise.
UpdateResult update_segment(const DmpModel& model, const Trajectory& new_traj, double t0,
                            double t1);

}  // namespace dmpkit
