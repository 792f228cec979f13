#include "dmpkit/learn.hpp"

#include "dmpkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dmpkit {

namespace {

// Fornberg's recursion: weights w such that sum_j w_j f(nodes_j) approximates
// the `order`-th derivative of f at x.
std::vector<double> fd_weights(double x, std::span<const double> nodes, int order) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][order];
  return w;
}

Eigen::MatrixXd derivative(const Trajectory& traj, const Eigen::MatrixXd& values, int order) {
  const int n = traj.samples();
  // Interior: three-point stencil. Ends: one-sided, second-order accurate
  // (three points for the first derivative, four for the second).
  const int end_width = order == 1 ? 3 : 4;
  Eigen::MatrixXd out(values.rows(), values.cols());
  for (int k = 0; k < n; ++k) {
    int first;
    int width;
    if (k == 0) {
      first = 0;
      width = end_width;
    } else if (k == n - 1) {
      first = n - end_width;
      width = end_width;
    } else {
      first = k - 1;
      width = 3;
    }
    const std::span<const double> nodes(traj.times.data() + first, width);
    const auto w = fd_weights(traj.times[k], nodes, order);
    // stencil weights sum to zero; differencing against row k keeps constants exact
    out.row(k).setZero();
    for (int j = 0; j < width; ++j) out.row(k) += w[j] * (values.row(first + j) - values.row(k));
  }
  return out;
}

std::vector<double> window_breakpoints(const BasisSet& basis, double s_lo, double s_hi,
                                       std::span<const double> sample_phases) {
  std::vector<double> pts{s_lo, s_hi};
  auto add = [&](double p) {
    if (p > s_lo && p < s_hi) pts.push_back(p);
  };
  for (int i = 0; i < basis.size(); ++i) {
    const double c = basis.centers()[i];
    add(c);
    if (basis.family().compact()) {
      const SupportInterval sup = basis.support(i);
      add(sup.lower);
      add(sup.upper);
    } else if (basis.family().tag == BasisFamily::Tag::TruncatedGaussian) {
      add(basis.support(i).upper);
    }
  }
  for (double p : sample_phases) add(p);
  std::sort(pts.begin(), pts.end());
  // Merge points that coincide up to roundoff relative to their magnitude.
  std::vector<double> merged;
  for (double p : pts) {
    if (!merged.empty() && p - merged.back() <= 1e-9 * std::abs(p)) {
      if (p == s_hi) merged.back() = s_hi;
      continue;
    }
    merged.push_back(p);
  }
  if (merged.size() < 2) merged = {s_lo, s_hi};
  merged.front() = s_lo;
  merged.back() = s_hi;
  return merged;
}

void check_basis_matches_phase(const BasisSet& basis, const PhaseConfig& phase) {
  if (basis.size() < 2) return;
  const double expected = phase.final_phase();
  const double last = basis.centers().back();
  require(std::abs(last - expected) <= 1e-9 * expected, ErrorKind::InvalidArgument,
          "basis centers do not match the phase configuration (last center " +
              std::to_string(last) + ", exp(-alpha T) = " + std::to_string(expected) + ")");
}

std::vector<double> node_targets(const Quadrature& quad, const ForcingSamples& forcing, int dim) {
  return forcing.at(quad.nodes, dim);
}

}  // namespace

Gains Gains::critically_damped(const Eigen::VectorXd& elastic) {
  Gains g{elastic, 2.0 * elastic.cwiseSqrt()};
  g.validate();
  return g;
}

Gains Gains::critically_damped(double k, int dims) {
  return critically_damped(Eigen::VectorXd::Constant(dims, k));
}

bool Gains::scalar() const {
  return (elastic.array() == elastic(0)).all() && (damping.array() == damping(0)).all();
}

void Gains::validate() const {
  require(elastic.size() >= 1 && elastic.size() == damping.size(), ErrorKind::InvalidArgument,
          "elastic and damping gains must have the same positive length");
  require((elastic.array() > 0.0).all() && (damping.array() > 0.0).all() && elastic.allFinite() &&
              damping.allFinite(),
          ErrorKind::InvalidArgument, "gains must be positive");
}

double ForcingSamples::at(double s, int dim) const {
  const auto n = phases.size();
  if (s >= phases.front()) return values(0, dim);
  if (s <= phases.back()) return values(static_cast<Eigen::Index>(n - 1), dim);
  // phases decrease: first sample strictly below s
  const auto it = std::upper_bound(phases.begin(), phases.end(), s, std::greater<>());
  const auto k = static_cast<Eigen::Index>(it - phases.begin());
  const double s_hi = phases[k - 1];
  const double s_lo = phases[k];
  const double w = (s - s_lo) / (s_hi - s_lo);
  return w * values(k - 1, dim) + (1.0 - w) * values(k, dim);
}

std::vector<double> ForcingSamples::at(std::span<const double> increasing_s, int dim) const {
  std::vector<double> out(increasing_s.size());
  const auto n = static_cast<Eigen::Index>(phases.size());
  // phases decrease, so walk them from the back
  Eigen::Index k = n - 1;
  for (std::size_t i = 0; i < increasing_s.size(); ++i) {
    const double s = increasing_s[i];
    if (i > 0 && s < increasing_s[i - 1]) {
      out[i] = at(s, dim);
      continue;
    }
    if (s <= phases[n - 1]) {
      out[i] = values(n - 1, dim);
      continue;
    }
    if (s >= phases[0]) {
      out[i] = values(0, dim);
      continue;
    }
    while (k > 0 && phases[k - 1] < s) --k;
    while (k < n - 1 && phases[k] >= s) ++k;
    // phases[k] < s <= phases[k - 1]
    const double s_hi = phases[k - 1];
    const double s_lo = phases[k];
    const double w = (s - s_lo) / (s_hi - s_lo);
    out[i] = w * values(k - 1, dim) + (1.0 - w) * values(k, dim);
  }
  return out;
}

Eigen::VectorXd DmpModel::coefficients(int dim) const {
  const int n = basis.size();
  Eigen::VectorXd c(basis.row_size());
  c.head(n) = weights.row(dim).transpose();
  if (basis.biased()) c.tail(n) = biases.row(dim).transpose();
  return c;
}

void DmpModel::set_coefficients(int dim, const Eigen::VectorXd& coeffs) {
  const int n = basis.size();
  weights.row(dim) = coeffs.head(n).transpose();
  if (basis.biased()) biases.row(dim) = coeffs.tail(n).transpose();
}

Trajectory differentiate(Trajectory traj) {
  traj.validate(4);
  if (!traj.velocities) traj.velocities = derivative(traj, traj.positions, 1);
  if (!traj.accelerations) traj.accelerations = derivative(traj, traj.positions, 2);
  return traj;
}

ForcingSamples extract_forcing(const Trajectory& traj, const Gains& gains,
                               const PhaseConfig& phase, ExtractionForm form) {
  traj.validate(2);
  gains.validate();
  require(traj.velocities && traj.accelerations, ErrorKind::InvalidArgument,
          "forcing extraction needs velocities and accelerations");
  require(gains.dims() == traj.dims(), ErrorKind::InvalidArgument,
          "gain dimension does not match the trajectory");
  const int n = traj.samples();
  const int d = traj.dims();
  const Eigen::VectorXd x0 = traj.start();
  const Eigen::VectorXd g = traj.end();
  const Eigen::MatrixXd& v = *traj.velocities;
  const Eigen::MatrixXd& a = *traj.accelerations;

  if (form == ExtractionForm::Original) {
    for (int p = 0; p < d; ++p) {
      require(g(p) != x0(p), ErrorKind::ZeroScale,
              "goal equals start in component " + std::to_string(p) +
                  "; the original formulation cannot scale the forcing term");
    }
  }

  ForcingSamples out;
  out.phases.resize(n);
  out.values.resize(n, d);
  for (int k = 0; k < n; ++k) {
    const double s = std::exp(-phase.alpha * (traj.times[k] - traj.times[0]));
    out.phases[k] = s;
    for (int p = 0; p < d; ++p) {
      const double K = gains.elastic(p);
      const double D = gains.damping(p);
      const double x = traj.positions(k, p);
      if (form == ExtractionForm::Original) {
        out.values(k, p) = (a(k, p) - K * (g(p) - x) + D * v(k, p)) / (g(p) - x0(p));
      } else {
        out.values(k, p) = (a(k, p) + D * v(k, p)) / K - (g(p) - x) + (g(p) - x0(p)) * s;
      }
    }
  }
  return out;
}

Quadrature learning_quadrature(const BasisSet& basis, double s_lo, double s_hi,
                               std::span<const double> sample_phases) {
  require(s_lo > 0.0 && s_hi > s_lo, ErrorKind::InvalidArgument, "empty integration window");
  const int min_nodes = std::max(10 * basis.size() + 1, 1001);
  // With the sample phases as breakpoints every panel sees a linear piece of
  // the forcing interpolant, so two subintervals per panel are enough.
  const int per_panel = sample_phases.empty() ? 10 : 2;
  return composite_simpson(window_breakpoints(basis, s_lo, s_hi, sample_phases), min_nodes,
                           per_panel);
}

RegressorTable::RegressorTable(const BasisSet& basis, const Quadrature& quad)
    : quad_(quad), row_size_(basis.row_size()) {
  std::vector<double> row(row_size_);
  offsets_.reserve(quad_.size() + 1);
  offsets_.push_back(0);
  for (double s : quad_.nodes) {
    basis.forcing_row(s, row);
    for (int i = 0; i < row_size_; ++i) {
      if (row[i] != 0.0) {
        index_.push_back(i);
        value_.push_back(row[i]);
      }
    }
    offsets_.push_back(index_.size());
  }
}

Eigen::MatrixXd RegressorTable::gram() const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(row_size_, row_size_);
  for (std::size_t k = 0; k < quad_.size(); ++k) {
    const double w = quad_.weights[k];
    for (std::size_t a = offsets_[k]; a < offsets_[k + 1]; ++a) {
      const double wa = w * value_[a];
      for (std::size_t b = a; b < offsets_[k + 1]; ++b) {
        g(index_[a], index_[b]) += wa * value_[b];
      }
    }
  }
  // Rows are stored with increasing index, so only the upper triangle was filled.
  g.triangularView<Eigen::StrictlyLower>() = g.transpose().triangularView<Eigen::StrictlyLower>();
  return g;
}

Eigen::VectorXd RegressorTable::moments(std::span<const double> target) const {
  require(target.size() == quad_.size(), ErrorKind::InvalidArgument,
          "target length does not match the quadrature grid");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(row_size_);
  for (std::size_t k = 0; k < quad_.size(); ++k) {
    const double wy = quad_.weights[k] * target[k];
    if (wy == 0.0) continue;
    for (std::size_t a = offsets_[k]; a < offsets_[k + 1]; ++a) m(index_[a]) += wy * value_[a];
  }
  return m;
}

std::vector<double> RegressorTable::evaluate(const Eigen::VectorXd& coeffs) const {
  std::vector<double> out(quad_.size(), 0.0);
  for (std::size_t k = 0; k < quad_.size(); ++k) {
    double acc = 0.0;
    for (std::size_t a = offsets_[k]; a < offsets_[k + 1]; ++a) acc += value_[a] * coeffs(index_[a]);
    out[k] = acc;
  }
  return out;
}

int system_bandwidth(const BasisSet& basis) {
  if (basis.biased()) return basis.row_size() - 1;
  return basis.structural_bandwidth();
}

LinearSystem assemble_system(const BasisSet& basis, const ForcingSamples& forcing, int dim,
                             const PhaseConfig& phase) {
  phase.validate();
  check_basis_matches_phase(basis, phase);
  require(!forcing.phases.empty(), ErrorKind::InvalidArgument, "no forcing samples");
  require(dim >= 0 && dim < forcing.values.cols(), ErrorKind::IndexOutOfRange,
          "forcing dimension out of range");
  const RegressorTable table(
      basis, learning_quadrature(basis, phase.final_phase(), 1.0, forcing.phases));
  LinearSystem sys;
  sys.matrix = table.gram();
  sys.rhs = table.moments(node_targets(table.quadrature(), forcing, dim));
  sys.bandwidth = system_bandwidth(basis);
  return sys;
}

DmpModel learn_dmp(const Trajectory& traj, const Gains& gains, const PhaseConfig& phase,
                   const BasisSet& basis) {
  traj.validate(4);
  gains.validate();
  phase.validate();
  require(basis.size() >= 2, ErrorKind::InvalidArgument, "learning needs N >= 1");
  require(std::abs(traj.duration() - phase.horizon) <= 1e-9 * phase.horizon,
          ErrorKind::InvalidArgument,
          "trajectory duration " + std::to_string(traj.duration()) +
              " does not match the phase horizon " + std::to_string(phase.horizon));
  check_basis_matches_phase(basis, phase);

  const ForcingSamples forcing =
      extract_forcing(differentiate(traj), gains, phase, ExtractionForm::Classical);
  const RegressorTable table(
      basis, learning_quadrature(basis, phase.final_phase(), 1.0, forcing.phases));

  DmpModel model;
  model.gains = gains;
  model.phase = phase;
  model.phase.tau = 1.0;
  model.basis = basis;
  model.weights.setZero(traj.dims(), basis.size());
  if (basis.biased()) model.biases.setZero(traj.dims(), basis.size());
  model.learned_x0 = traj.start();
  model.learned_g = traj.end();

  LinearSystem sys;
  sys.matrix = table.gram();
  sys.bandwidth = system_bandwidth(basis);
  for (int p = 0; p < traj.dims(); ++p) {
    sys.rhs = table.moments(node_targets(table.quadrature(), forcing, p));
    model.set_coefficients(p, solve_weights(sys).weights);
  }
  return model;
}

double forcing_l2_error(const DmpModel& model, const ForcingSamples& forcing, int dim) {
  const RegressorTable table(
      model.basis,
      learning_quadrature(model.basis, model.phase.final_phase(), 1.0, forcing.phases));
  const auto fitted = table.evaluate(model.coefficients(dim));
  const auto& q = table.quadrature();
  double acc = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double e = fitted[k] - forcing.at(q.nodes[k], dim);
    acc += q.weights[k] * e * e;
  }
  return std::sqrt(std::max(acc, 0.0));
}

std::vector<int> update_indices(const BasisSet& basis, const PhaseConfig& phase, double t0,
                                double t1) {
  if (!basis.family().compact()) {
    fail(ErrorKind::FullSupport,
         basis.family().label() +
             " bases are not compactly supported: every weight must be re-computed (relearn)");
  }
  require(t0 >= 0.0 && t1 >= t0 && t1 <= phase.horizon * (1.0 + 1e-12),
          ErrorKind::InvalidArgument, "update window must satisfy 0 <= t0 <= t1 <= T");
  const double s0 = std::exp(-phase.alpha * t0);
  const double s1 = std::exp(-phase.alpha * t1);
  std::vector<int> out;
  for (int i = 0; i < basis.size(); ++i) {
    const SupportInterval sup = basis.support(i);
    if (sup.lower <= s0 && sup.upper >= s1) out.push_back(i);
  }
  return out;
}

UpdateResult update_segment(const DmpModel& model, const Trajectory& new_traj, double t0,
                            double t1) {
  const BasisSet& basis = model.basis;
  std::vector<int> indices = update_indices(basis, model.phase, t0, t1);
  new_traj.validate(4);
  require(new_traj.dims() == model.dims(), ErrorKind::InvalidArgument,
          "new trajectory dimension does not match the model");
  require(std::abs(new_traj.duration() - model.phase.horizon) <= 1e-9 * model.phase.horizon,
          ErrorKind::InvalidArgument, "new trajectory duration does not match the model horizon");

  UpdateResult out{model, indices};
  if (indices.empty()) return out;

  double lo = basis.support(indices.front()).lower;
  double hi = basis.support(indices.front()).upper;
  for (int i : indices) {
    lo = std::min(lo, basis.support(i).lower);
    hi = std::max(hi, basis.support(i).upper);
  }
  lo = std::max(lo, model.phase.final_phase());
  hi = std::min(hi, 1.0);

  const int n = basis.size();
  std::vector<int> selected(indices);
  if (basis.biased()) {
    for (int i : indices) selected.push_back(n + i);
  }
  std::vector<bool> is_selected(basis.row_size(), false);
  for (int i : selected) is_selected[i] = true;

  const ForcingSamples forcing =
      extract_forcing(differentiate(new_traj), model.gains, model.phase, ExtractionForm::Classical);
  const RegressorTable table(basis, learning_quadrature(basis, lo, hi, forcing.phases));
  const Eigen::MatrixXd gram = table.gram();
  const auto m = static_cast<int>(selected.size());

  LinearSystem sys;
  sys.matrix.resize(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) sys.matrix(a, b) = gram(selected[a], selected[b]);
  }
  sys.bandwidth = basis.biased() ? m - 1 : std::min(system_bandwidth(basis), m - 1);

  for (int p = 0; p < model.dims(); ++p) {
    // The weights kept fixed still contribute inside the window; fit the remainder.
    Eigen::VectorXd fixed = model.coefficients(p);
    for (int i : selected) fixed(i) = 0.0;
    const auto fixed_part = table.evaluate(fixed);
    std::vector<double> target = node_targets(table.quadrature(), forcing, p);
    for (std::size_t k = 0; k < target.size(); ++k) target[k] -= fixed_part[k];
    const Eigen::VectorXd full_rhs = table.moments(target);
    sys.rhs.resize(m);
    for (int a = 0; a < m; ++a) sys.rhs(a) = full_rhs(selected[a]);
    const Eigen::VectorXd solved = solve_weights(sys).weights;

    Eigen::VectorXd coeffs = model.coefficients(p);
    for (int a = 0; a < m; ++a) coeffs(selected[a]) = solved(a);
    out.model.set_coefficients(p, coeffs);
  }
  return out;
}

}  // namespace dmpkit
