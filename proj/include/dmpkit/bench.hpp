#pragma once

#include "dmpkit/basis.hpp"
#include "dmpkit/learn.hpp"
#include "dmpkit/regress.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace dmpkit {

/// Portable seeded generator: std::mt19937_64 (sequence fixed by the standard)
/// with hand-rolled uniform and Box-Muller normal draws, since the standard
/// distributions are implementation-defined. Stream j of seed s is seeded
/// with splitmix64(s + 0x9e3779b97f4a7c15 * (j + 1)).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  double uniform();  ///< [0, 1), 53 random bits
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();   ///< standard normal

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class TargetKind { HatEta, PlaneCurve, SpiralCurve };
TargetKind parse_target_kind(const std::string& label);

/// eta(t) = t^2 cos(pi t) on [0, 1]; (t, sin^2 t) on [0, pi];
/// (t^2 cos t, t sin t) on [0, 2 pi]. Uniform grid, analytic derivatives.
Trajectory gen_target(TargetKind kind, int samples);

/// Clamped cubic spline (prescribed end slopes), one column per dimension.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> knots, Eigen::MatrixXd values,
              Eigen::VectorXd start_slope, Eigen::VectorXd end_slope);

  Eigen::VectorXd operator()(double t) const;

 private:
  std::vector<double> knots_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd second_;  ///< second derivatives at the knots
};

/// Pair of demonstrations identical outside [t0, t1]: a clamped spline and
/// the same spline with a smooth bump confined to the window.
struct UpdatePair {
  Trajectory original;
  Trajectory modified;
  double t0;
  double t1;
};
UpdatePair gen_update_pair(int samples = 1001, double t0 = 0.3, double t1 = 0.6);

/// Planar system with an attracting origin, integrated with RK4 at step 1e-3
/// from radius in (0.8, 1), angle in [0, 2 pi), up to a final time in (5, 10).
DemoSet gen_limit_cycle_dataset(int count, std::uint64_t seed);
/// Single trajectory of the same system from a given start.
Trajectory integrate_limit_cycle(const Eigen::Vector2d& start, double final_time,
                                 double step = 1e-3);

/// Independent N(0, variance) noise on every coordinate of every sample.
DemoSet add_noise(const DemoSet& set, double variance, std::uint64_t seed);

struct SweepFamily {
  BasisFamily family;
  bool biased = false;

  std::string label() const;
  static SweepFamily parse(const std::string& label);
  /// Learned parameters for N + 1 bases.
  int parameters(int n) const { return biased ? 2 * (n + 1) : n + 1; }
};

struct SweepRow {
  std::string family;
  int n;
  std::string metric;
  double value;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double alpha = 4.0;
  double horizon = 1.0;
  double overlap = 1.0;
  std::uint64_t seed = 0;

  /// First value matching (family, n, metric); NaN when absent.
  double value(const std::string& family, int n, const std::string& metric) const;

  void write_csv(std::ostream& out) const;
  void write_json(std::ostream& out) const;
};

struct SweepSettings {
  double alpha = 4.0;
  double horizon = 1.0;
  double overlap = 1.0;
  double elastic = 150.0;
  std::uint64_t seed = 0;
  int threads = 1;  ///< worker count for independent cells
};

/// Forcing L2 error per family and N against the classical forcing of `target`.
/// Metrics: "l2_error", "parameters".
SweepReport run_error_sweep(const std::vector<SweepFamily>& families,
                            const std::vector<int>& n_values, const Trajectory& target,
                            const SweepSettings& settings = {});

/// Metric "cond".
SweepReport run_condition_sweep(const std::vector<SweepFamily>& families,
                                const std::vector<int>& n_values,
                                const SweepSettings& settings = {});

/// Mean seconds per solve over `rhs_count` seeded right-hand sides (one
/// warm-up excluded, median over `batches` batch means). Metrics: "seconds",
/// "banded" (1 when the banded path was used). Runs serially.
SweepReport run_timing_sweep(const std::vector<SweepFamily>& families,
                             const std::vector<int>& n_values, int rhs_count = 30,
                             const SweepSettings& settings = {}, int batches = 5);

/// Metrics: "nnz" (structural), "bandwidth", "numeric_zeros", "offband_max_abs".
SweepReport run_sparsity(const SweepFamily& family, const std::vector<int>& n_values,
                         const SweepSettings& settings = {});

/// Thread count from DMPKIT_THREADS (default 1).
int bench_threads_from_env();

}  // namespace dmpkit
