#pragma once

#include "dmpkit/affine.hpp"
#include "dmpkit/learn.hpp"
#include "dmpkit/trajectory.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <optional>
#include <variant>

namespace dmpkit {

/// Second-order system used at execution time.
struct Formulation {
  enum class Tag {
    Original,   ///< tau dv = K(g - x) - D v + (g - x0) .* f(s)
    Classical,  ///< tau dv = K(g - x) - D v - K(g - x0) s + K f(s)
    Extended,   ///< classical conjugated by S: K' = S K S^-1, D' = S D S^-1, f' = S f
  };

  Tag tag = Tag::Classical;
  /// Extended only: a fixed invertible transform. When absent, the
  /// roto-dilatation from the learned chord to the requested one is used.
  std::optional<Eigen::MatrixXd> transform;

  static Formulation original() { return {Tag::Original, std::nullopt}; }
  static Formulation classical() { return {Tag::Classical, std::nullopt}; }
  static Formulation extended() { return {Tag::Extended, std::nullopt}; }
  static Formulation extended(Eigen::MatrixXd s) { return {Tag::Extended, std::move(s)}; }

  static Formulation parse(const std::string& label);
};

struct RolloutState {
  Eigen::VectorXd position;
  Eigen::VectorXd velocity;
  double phase = 1.0;
  double time = 0.0;
};

using GoalPath = std::function<Eigen::VectorXd(double)>;
using Goal = std::variant<Eigen::VectorXd, GoalPath>;

struct RolloutOptions {
  double tau = 1.0;
  double duration = 0.0;  ///< 0 selects 2T
  double dt = 0.0;        ///< 0 selects T / 1000
  Formulation formulation;
};

/// Forcing vector f(s) of the learned model. Exactly zero below the lowest
/// compact support.
Eigen::VectorXd forcing_value(const DmpModel& model, double s);

/// Fixed-step classical RK4 integration from (x0, v = 0, s = 1). A moving goal
/// is sampled at the start of every step and held over it; in extended mode
/// S, K' and D' are rebuilt from the sampled goal each step.
Trajectory rollout(const DmpModel& model, const Eigen::VectorXd& x0, const Goal& goal,
                   const RolloutOptions& options);

}  // namespace dmpkit
