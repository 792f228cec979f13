#include "dmpkit/dmp.hpp"

#include "dmpkit/error.hpp"

#include <cmath>

namespace dmpkit {

namespace {

Eigen::MatrixXd coefficient_matrix(const DmpModel& model) {
  Eigen::MatrixXd c(model.dims(), model.basis.row_size());
  for (int p = 0; p < model.dims(); ++p) c.row(p) = model.coefficients(p).transpose();
  return c;
}

Eigen::VectorXd forcing_with(const DmpModel& model, const Eigen::MatrixXd& coeffs, double s) {
  const BasisSet& basis = model.basis;
  if (basis.family().compact()) {
    // Below the last center the only remaining support edge is the floor; near it
    // the mollifier underflows to exact zero before s reaches the edge itself.
    if (s <= basis.coverage_floor() ||
        (s < basis.centers().back() && basis.denominator(s) == 0.0)) {
      return Eigen::VectorXd::Zero(model.dims());
    }
  }
  return coeffs * basis.forcing_row(s);
}

struct Derivative {
  Eigen::VectorXd dx;
  Eigen::VectorXd dv;
};

// Right-hand side for one step, with every goal-dependent quantity frozen.
struct StepDynamics {
  const DmpModel& model;
  const Eigen::MatrixXd& coeffs;
  Formulation::Tag tag;
  double tau;
  Eigen::VectorXd x0;
  Eigen::VectorXd goal;
  Eigen::MatrixXd elastic;  // K or K'
  Eigen::MatrixXd damping;  // D or D'
  Eigen::MatrixXd transform;  // S (extended only)

  Derivative operator()(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
    const double s = std::exp(-model.phase.alpha * t / tau);
    const Eigen::VectorXd f = forcing_with(model, coeffs, s);
    Eigen::VectorXd acc = elastic * (goal - x) - damping * v;
    switch (tag) {
      case Formulation::Tag::Original:
        acc += (goal - x0).cwiseProduct(f);
        break;
      case Formulation::Tag::Classical:
        acc += elastic * (f - (goal - x0) * s);
        break;
      case Formulation::Tag::Extended:
        acc += elastic * (transform * f - (goal - x0) * s);
        break;
    }
    return {v / tau, acc / tau};
  }
};

}  // namespace

Formulation Formulation::parse(const std::string& label) {
  if (label == "original") return original();
  if (label == "classical") return classical();
  if (label == "extended") return extended();
  fail(ErrorKind::InvalidArgument, "unknown formulation '" + label + "'");
}

Eigen::VectorXd forcing_value(const DmpModel& model, double s) {
  return forcing_with(model, coefficient_matrix(model), s);
}

Trajectory rollout(const DmpModel& model, const Eigen::VectorXd& x0, const Goal& goal,
                   const RolloutOptions& options) {
  const int d = model.dims();
  require(x0.size() == d, ErrorKind::InvalidArgument, "start dimension does not match the model");
  require(options.tau > 0.0, ErrorKind::InvalidArgument, "tau must be positive");
  const double horizon = model.phase.horizon;
  const double duration = options.duration > 0.0 ? options.duration : 2.0 * horizon;
  const double dt = options.dt > 0.0 ? options.dt : horizon / 1000.0;
  const long steps = std::max(1L, std::lround(duration / dt));
  const double h = duration / static_cast<double>(steps);

  const bool moving = std::holds_alternative<GoalPath>(goal);
  auto goal_at = [&](double t) -> Eigen::VectorXd {
    Eigen::VectorXd g = moving ? std::get<GoalPath>(goal)(t) : std::get<Eigen::VectorXd>(goal);
    require(g.size() == d, ErrorKind::InvalidArgument, "goal dimension does not match the model");
    return g;
  };

  const Eigen::MatrixXd coeffs = coefficient_matrix(model);
  const Formulation& form = options.formulation;
  StepDynamics dyn{model,
                   coeffs,
                   form.tag,
                   options.tau,
                   x0,
                   goal_at(0.0),
                   model.gains.elastic.asDiagonal(),
                   model.gains.damping.asDiagonal(),
                   Eigen::MatrixXd::Identity(d, d)};

  auto refresh_transform = [&]() {
    if (form.tag != Formulation::Tag::Extended) return;
    if (form.transform) {
      require(form.transform->rows() == d && form.transform->cols() == d,
              ErrorKind::InvalidArgument, "transform dimension does not match the model");
      dyn.transform = *form.transform;
      std::tie(dyn.elastic, dyn.damping) = conjugate_gains(model.gains, dyn.transform);
    } else {
      const AffineMap map = rotodilatation(model.learned_x0, model.learned_g, x0, dyn.goal);
      dyn.transform = map.matrix();
      std::tie(dyn.elastic, dyn.damping) = conjugate_gains(model.gains, map);
    }
  };
  refresh_transform();

  Trajectory out;
  out.times.resize(steps + 1);
  out.positions.resize(steps + 1, d);
  out.velocities = Eigen::MatrixXd(steps + 1, d);
  out.accelerations = Eigen::MatrixXd(steps + 1, d);

  Eigen::VectorXd x = x0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    if (moving && k > 0) {
      dyn.goal = goal_at(t);
      if (!form.transform) refresh_transform();
    }
    const Derivative k1 = dyn(t, x, v);
    out.times[k] = t;
    out.positions.row(k) = x.transpose();
    out.velocities->row(k) = v.transpose();
    out.accelerations->row(k) = k1.dv.transpose();
    if (k == steps) break;

    const Derivative k2 = dyn(t + 0.5 * h, x + 0.5 * h * k1.dx, v + 0.5 * h * k1.dv);
    const Derivative k3 = dyn(t + 0.5 * h, x + 0.5 * h * k2.dx, v + 0.5 * h * k2.dv);
    const Derivative k4 = dyn(t + h, x + h * k3.dx, v + h * k3.dv);
    x += (h / 6.0) * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    v += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    if (!x.allFinite() || !v.allFinite()) {
      fail(ErrorKind::Divergence, "rollout diverged at t = " + std::to_string(t + h));
    }
  }
  return out;
}

}  // namespace dmpkit
