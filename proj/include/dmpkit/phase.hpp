#pragma once

#include <cmath>

namespace dmpkit {

/// Canonical system parameters. The phase decays as tau * ds/dt = -alpha * s.
struct PhaseConfig {
  double alpha = 4.0;
  double tau = 1.0;
  double horizon = 1.0;  ///< learned final time T, seconds

  void validate() const;

  /// Phase value at the learned horizon, exp(-alpha * T).
  double final_phase() const { return std::exp(-alpha * horizon); }
};

/// s(t) = exp(-alpha * t / tau). Closed form of the canonical system with s(0) = 1.
inline double phase_at(double t, const PhaseConfig& cfg) {
  return std::exp(-cfg.alpha * t / cfg.tau);
}

/// Inverse map: time at which the phase reaches s (s in (0, 1]).
inline double time_at_phase(double s, const PhaseConfig& cfg) {
  return -cfg.tau * std::log(s) / cfg.alpha;
}

}  // namespace dmpkit
