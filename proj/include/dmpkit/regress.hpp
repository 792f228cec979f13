#pragma once

#include "dmpkit/affine.hpp"
#include "dmpkit/learn.hpp"

#include <vector>

namespace dmpkit {

struct DemoSet {
  std::vector<Trajectory> demos;

  int dims() const { return demos.empty() ? 0 : demos.front().dims(); }
  void validate() const;
};

/// Demonstrations mapped onto the chord 0 -> 1 and the time domain [0, T].
struct AlignedDemoSet {
  std::vector<Trajectory> demos;
  std::vector<AffineMap> maps;
  double horizon = 1.0;
};

/// Per demo: x~(t) = S (x(t0 + (t1 - t0) t / T) - x(t0)) with S the
/// roto-dilatation of the demo chord onto the all-ones vector. Endpoints are
/// written as exact zeros and ones. Derivatives are dropped.
AlignedDemoSet align_demos(const DemoSet& set, double horizon = 1.0);

/// Shared 2M-scaled normal matrix and summed right-hand sides, one weight
/// vector per dimension. The model's learned endpoints are 0 and 1.
DmpModel regress_weights(const AlignedDemoSet& aligned, const Gains& gains,
                         const PhaseConfig& phase, const BasisSet& basis);

/// The 2M-scaled matrix on its own (identical for every dimension and demo).
/// `sample_phases` are extra quadrature breakpoints, as used during regression.
Eigen::MatrixXd regression_matrix(const BasisSet& basis, const PhaseConfig& phase, int demos,
                                  std::span<const double> sample_phases = {});

}  // namespace dmpkit
