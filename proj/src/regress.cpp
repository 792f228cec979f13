#include "dmpkit/regress.hpp"

#include "dmpkit/error.hpp"

#include <cmath>

namespace dmpkit {

void DemoSet::validate() const {
  require(!demos.empty(), ErrorKind::InvalidArgument, "demo set is empty");
  const int d = demos.front().dims();
  for (std::size_t j = 0; j < demos.size(); ++j) {
    demos[j].validate(4);
    require(demos[j].dims() == d, ErrorKind::InvalidArgument,
            "demo " + std::to_string(j) + " has dimension " + std::to_string(demos[j].dims()) +
                ", expected " + std::to_string(d));
  }
}

AlignedDemoSet align_demos(const DemoSet& set, double horizon) {
  set.validate();
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::InvalidArgument,
          "horizon must be positive");
  const int d = set.dims();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(d);

  AlignedDemoSet out;
  out.horizon = horizon;
  for (std::size_t j = 0; j < set.demos.size(); ++j) {
    const Trajectory& demo = set.demos[j];
    const Eigen::VectorXd x0 = demo.start();
    if ((demo.end() - x0).norm() == 0.0) {
      throw AlignmentError("demo " + std::to_string(j) + " starts and ends at the same point", j);
    }
    const AffineMap map = rotodilatation(x0, demo.end(), zero, one);

    Trajectory aligned;
    const int n = demo.samples();
    const double t0 = demo.times.front();
    const double span = demo.duration();
    aligned.times.resize(n);
    for (int k = 0; k < n; ++k) aligned.times[k] = (demo.times[k] - t0) * horizon / span;
    aligned.times.front() = 0.0;
    aligned.times.back() = horizon;

    aligned.positions =
        (demo.positions.rowwise() - x0.transpose()) * map.matrix().transpose();
    aligned.positions.row(0).setZero();
    aligned.positions.row(n - 1).setOnes();

    out.demos.push_back(std::move(aligned));
    out.maps.push_back(map);
  }
  return out;
}

Eigen::MatrixXd regression_matrix(const BasisSet& basis, const PhaseConfig& phase, int demos,
                                  std::span<const double> sample_phases) {
  require(demos >= 1, ErrorKind::InvalidArgument, "regression needs at least one demo");
  phase.validate();
  const RegressorTable table(
      basis, learning_quadrature(basis, phase.final_phase(), 1.0, sample_phases));
  return (2.0 * demos) * table.gram();
}

DmpModel regress_weights(const AlignedDemoSet& aligned, const Gains& gains,
                         const PhaseConfig& phase, const BasisSet& basis) {
  require(!aligned.demos.empty(), ErrorKind::InvalidArgument, "no aligned demos");
  require(basis.size() >= 2, ErrorKind::InvalidArgument, "regression needs N >= 1");
  gains.validate();
  phase.validate();
  require(std::abs(phase.horizon - aligned.horizon) <= 1e-12 * aligned.horizon,
          ErrorKind::InvalidArgument, "phase horizon differs from the alignment horizon");
  const int d = aligned.demos.front().dims();
  require(gains.dims() == d, ErrorKind::InvalidArgument,
          "gain dimension does not match the demos");
  const auto m = static_cast<int>(aligned.demos.size());

  std::vector<ForcingSamples> forcing;
  forcing.reserve(aligned.demos.size());
  for (const Trajectory& demo : aligned.demos) {
    require(std::abs(demo.duration() - phase.horizon) <= 1e-9 * phase.horizon,
            ErrorKind::InvalidArgument, "aligned demo does not span the phase horizon");
    forcing.push_back(
        extract_forcing(differentiate(demo), gains, phase, ExtractionForm::Classical));
  }

  // One grid for every demo: all sample phases are breakpoints, so A is shared.
  std::vector<double> phases;
  for (const auto& f : forcing) phases.insert(phases.end(), f.phases.begin(), f.phases.end());
  const RegressorTable table(basis, learning_quadrature(basis, phase.final_phase(), 1.0, phases));
  const Quadrature& quad = table.quadrature();

  DmpModel model;
  model.gains = gains;
  model.phase = phase;
  model.phase.tau = 1.0;
  model.basis = basis;
  model.weights.setZero(d, basis.size());
  if (basis.biased()) model.biases.setZero(d, basis.size());
  model.learned_x0 = Eigen::VectorXd::Zero(d);
  model.learned_g = Eigen::VectorXd::Ones(d);

  LinearSystem sys;
  sys.matrix = (2.0 * m) * table.gram();
  sys.bandwidth = system_bandwidth(basis);
  for (int p = 0; p < d; ++p) {
    sys.rhs = Eigen::VectorXd::Zero(basis.row_size());
    for (const ForcingSamples& f : forcing) sys.rhs += 2.0 * table.moments(f.at(quad.nodes, p));
    model.set_coefficients(p, solve_weights(sys).weights);
  }
  return model;
}

}  // namespace dmpkit
