#include "dmpkit/bench.hpp"

#include "dmpkit/error.hpp"
#include "dmpkit/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

namespace dmpkit {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

PhaseConfig sweep_phase(const SweepSettings& s) {
  PhaseConfig phase{s.alpha, 1.0, s.horizon};
  phase.validate();
  return phase;
}

BasisSet sweep_basis(const SweepFamily& f, int n, const SweepSettings& s) {
  return BasisSet::make(f.family, n, s.alpha, s.horizon, s.overlap, f.biased);
}

Eigen::MatrixXd normal_matrix(const BasisSet& basis, const PhaseConfig& phase) {
  return RegressorTable(basis, learning_quadrature(basis, phase.final_phase(), 1.0)).gram();
}

SweepReport empty_report(const SweepSettings& s) {
  SweepReport r;
  r.alpha = s.alpha;
  r.horizon = s.horizon;
  r.overlap = s.overlap;
  r.seed = s.seed;
  return r;
}

struct Cell {
  SweepFamily family;
  int n;
};

std::vector<Cell> cells(const std::vector<SweepFamily>& families, const std::vector<int>& ns) {
  std::vector<Cell> out;
  for (const auto& f : families) {
    for (int n : ns) out.push_back({f, n});
  }
  return out;
}

Trajectory sample_curve(int samples, double t_end,
                        const std::function<void(double, double*, double*, double*)>& eval,
                        int dims) {
  require(samples >= 4, ErrorKind::InvalidArgument, "target needs at least 4 samples");
  Trajectory tr;
  tr.times.resize(samples);
  tr.positions.resize(samples, dims);
  Eigen::MatrixXd vel(samples, dims);
  Eigen::MatrixXd acc(samples, dims);
  double x[2], v[2], a[2];
  for (int k = 0; k < samples; ++k) {
    const double t = k == samples - 1 ? t_end : t_end * k / (samples - 1);
    tr.times[k] = t;
    eval(t, x, v, a);
    for (int p = 0; p < dims; ++p) {
      tr.positions(k, p) = x[p];
      vel(k, p) = v[p];
      acc(k, p) = a[p];
    }
  }
  tr.velocities = vel;
  tr.accelerations = acc;
  return tr;
}

Eigen::Vector2d limit_cycle_field(const Eigen::Vector2d& x) {
  const double x1 = x(0);
  const double x2 = x(1);
  return {x1 * x1 * x1 + x2 * x2 * x1 - x1 - x2, x2 * x2 * x2 + x1 * x1 * x2 + x1 - x2};
}

}  // namespace

// ---------------------------------------------------------------- random

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(seed + kGolden * (index + 1)));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

// ---------------------------------------------------------------- targets

TargetKind parse_target_kind(const std::string& label) {
  if (label == "hat_eta") return TargetKind::HatEta;
  if (label == "plane_curve") return TargetKind::PlaneCurve;
  if (label == "spiral_curve") return TargetKind::SpiralCurve;
  fail(ErrorKind::InvalidArgument,
       "unknown target '" + label + "' (expected hat_eta, plane_curve or spiral_curve)");
}

Trajectory gen_target(TargetKind kind, int samples) {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case TargetKind::HatEta:
      return sample_curve(samples, 1.0, [](double t, double* x, double* v, double* a) {
        const double c = cos(pi * t);
        const double s = sin(pi * t);
        x[0] = t * t * c;
        v[0] = 2 * t * c - pi * t * t * s;
        a[0] = 2 * c - 4 * pi * t * s - pi * pi * t * t * c;
      }, 1);
    case TargetKind::PlaneCurve:
      return sample_curve(samples, pi, [](double t, double* x, double* v, double* a) {
        const double s = sin(t);
        x[0] = t;
        x[1] = s * s;
        v[0] = 1.0;
        v[1] = sin(2 * t);
        a[0] = 0.0;
        a[1] = 2 * cos(2 * t);
      }, 2);
    case TargetKind::SpiralCurve:
      return sample_curve(samples, 2 * pi, [](double t, double* x, double* v, double* a) {
        const double c = cos(t);
        const double s = sin(t);
        x[0] = t * t * c;
        x[1] = t * s;
        v[0] = 2 * t * c - t * t * s;
        v[1] = s + t * c;
        a[0] = 2 * c - 4 * t * s - t * t * c;
        a[1] = 2 * c - t * s;
      }, 2);
  }
  fail(ErrorKind::InvalidArgument, "unknown target kind");
}

// ---------------------------------------------------------------- splines

CubicSpline::CubicSpline(std::vector<double> knots, Eigen::MatrixXd values,
                         Eigen::VectorXd start_slope, Eigen::VectorXd end_slope)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const int n = static_cast<int>(knots_.size());
  require(n >= 2 && values_.rows() == n, ErrorKind::InvalidArgument,
          "spline needs one value row per knot (at least two)");
  require(start_slope.size() == values_.cols() && end_slope.size() == values_.cols(),
          ErrorKind::InvalidArgument, "spline slope dimension mismatch");
  for (int i = 1; i < n; ++i) {
    require(knots_[i] > knots_[i - 1], ErrorKind::InvalidArgument,
            "spline knots must be strictly increasing");
  }
  // Tridiagonal system for the knot second derivatives, clamped ends.
  Eigen::MatrixXd rhs(n, values_.cols());
  std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0);
  auto h = [&](int i) { return knots_[i + 1] - knots_[i]; };
  diag[0] = h(0) / 3.0;
  sup[0] = h(0) / 6.0;
  rhs.row(0) = (values_.row(1) - values_.row(0)) / h(0) - start_slope.transpose();
  for (int i = 1; i < n - 1; ++i) {
    sub[i] = h(i - 1) / 6.0;
    diag[i] = (h(i - 1) + h(i)) / 3.0;
    sup[i] = h(i) / 6.0;
    rhs.row(i) = (values_.row(i + 1) - values_.row(i)) / h(i) -
                 (values_.row(i) - values_.row(i - 1)) / h(i - 1);
  }
  sub[n - 1] = h(n - 2) / 6.0;
  diag[n - 1] = h(n - 2) / 3.0;
  rhs.row(n - 1) = end_slope.transpose() - (values_.row(n - 1) - values_.row(n - 2)) / h(n - 2);

  for (int i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs.row(i) -= m * rhs.row(i - 1);
  }
  second_.resize(n, values_.cols());
  second_.row(n - 1) = rhs.row(n - 1) / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    second_.row(i) = (rhs.row(i) - sup[i] * second_.row(i + 1)) / diag[i];
  }
}

Eigen::VectorXd CubicSpline::operator()(double t) const {
  const int n = static_cast<int>(knots_.size());
  t = std::clamp(t, knots_.front(), knots_.back());
  int i = static_cast<int>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin()) - 1;
  i = std::clamp(i, 0, n - 2);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - t) / h;
  const double b = (t - knots_[i]) / h;
  const Eigen::RowVectorXd y = a * values_.row(i) + b * values_.row(i + 1) +
                               ((a * a * a - a) * second_.row(i) +
                                (b * b * b - b) * second_.row(i + 1)) *
                                   (h * h / 6.0);
  return y.transpose();
}

UpdatePair gen_update_pair(int samples, double t0, double t1) {
  require(samples >= 4, ErrorKind::InvalidArgument, "update pair needs at least 4 samples");
  require(0.0 < t0 && t0 < t1 && t1 < 1.0, ErrorKind::InvalidArgument,
          "update window must lie strictly inside (0, 1)");
  const std::vector<double> knots{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  Eigen::MatrixXd values(6, 2);
  values << 0.0, 0.0,
            0.25, 0.45,
            0.45, 0.70,
            0.60, 0.65,
            0.80, 0.35,
            1.00, 0.20;
  const CubicSpline spline(knots, values, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero());

  UpdatePair pair{{}, {}, t0, t1};
  pair.original.times.resize(samples);
  pair.original.positions.resize(samples, 2);
  for (int k = 0; k < samples; ++k) {
    const double t = k == samples - 1 ? 1.0 : static_cast<double>(k) / (samples - 1);
    pair.original.times[k] = t;
    pair.original.positions.row(k) = spline(t).transpose();
  }
  pair.modified = pair.original;
  // C2 bump 64 u^3 (1 - u)^3, peak 1 at the window middle, zero outside.
  const Eigen::RowVector2d lift(-0.05, 0.15);
  for (int k = 0; k < samples; ++k) {
    const double t = pair.original.times[k];
    if (t <= t0 || t >= t1) continue;
    const double u = (t - t0) / (t1 - t0);
    const double w = 1.0 - u;
    pair.modified.positions.row(k) += 64.0 * u * u * u * w * w * w * lift;
  }
  return pair;
}

// ---------------------------------------------------------------- limit cycle

Trajectory integrate_limit_cycle(const Eigen::Vector2d& start, double final_time, double step) {
  require(final_time > 0.0 && step > 0.0, ErrorKind::InvalidArgument,
          "final time and step must be positive");
  const long steps = std::max(1L, std::lround(final_time / step));
  const double h = final_time / static_cast<double>(steps);
  Trajectory tr;
  tr.times.resize(steps + 1);
  tr.positions.resize(steps + 1, 2);
  Eigen::Vector2d x = start;
  for (long k = 0; k <= steps; ++k) {
    tr.times[k] = k == steps ? final_time : static_cast<double>(k) * h;
    tr.positions.row(k) = x.transpose();
    if (k == steps) break;
    const Eigen::Vector2d k1 = limit_cycle_field(x);
    const Eigen::Vector2d k2 = limit_cycle_field(x + 0.5 * h * k1);
    const Eigen::Vector2d k3 = limit_cycle_field(x + 0.5 * h * k2);
    const Eigen::Vector2d k4 = limit_cycle_field(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    require(x.allFinite(), ErrorKind::Divergence, "limit-cycle integration diverged");
  }
  return tr;
}

DemoSet gen_limit_cycle_dataset(int count, std::uint64_t seed) {
  require(count >= 1, ErrorKind::InvalidArgument, "demo count must be at least 1");
  DemoSet set;
  for (int j = 0; j < count; ++j) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(j));
    // Starts close to the unit circle decay slowly; redraw until the demo
    // settles within 2% of the origin.
    for (;;) {
      const double radius = rng.uniform(0.8, 1.0);
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double final_time = rng.uniform(5.0, 10.0);
      if (radius <= 0.8 || final_time <= 5.0) continue;  // open intervals
      Trajectory demo = integrate_limit_cycle(
          Eigen::Vector2d(radius * std::cos(angle), radius * std::sin(angle)), final_time);
      if (demo.end().norm() < 0.02) {
        set.demos.push_back(std::move(demo));
        break;
      }
    }
  }
  return set;
}

DemoSet add_noise(const DemoSet& set, double variance, std::uint64_t seed) {
  require(variance > 0.0 && std::isfinite(variance), ErrorKind::InvalidArgument,
          "noise variance must be positive");
  const double sigma = std::sqrt(variance);
  DemoSet out = set;
  for (std::size_t j = 0; j < out.demos.size(); ++j) {
    Rng rng = Rng::stream(seed, j);
    Trajectory& demo = out.demos[j];
    for (Eigen::Index k = 0; k < demo.positions.rows(); ++k) {
      for (Eigen::Index p = 0; p < demo.positions.cols(); ++p) {
        demo.positions(k, p) += sigma * rng.normal();
      }
    }
    demo.velocities.reset();
    demo.accelerations.reset();
  }
  return out;
}

// ---------------------------------------------------------------- sweeps

std::string SweepFamily::label() const { return family.label() + (biased ? "_biased" : ""); }

SweepFamily SweepFamily::parse(const std::string& label) {
  constexpr std::string_view suffix = "_biased";
  if (label.size() > suffix.size() && label.ends_with(suffix)) {
    return {BasisFamily::parse(label.substr(0, label.size() - suffix.size())), true};
  }
  return {BasisFamily::parse(label), false};
}

double SweepReport::value(const std::string& family, int n, const std::string& metric) const {
  for (const auto& r : rows) {
    if (r.family == family && r.n == n && r.metric == metric) return r.value;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

void SweepReport::write_csv(std::ostream& out) const {
  out << "family,N,metric,value,seed\n";
  for (const auto& r : rows) {
    out << r.family << ',' << r.n << ',' << r.metric << ',' << format_double(r.value) << ','
        << seed << '\n';
  }
}

void SweepReport::write_json(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["horizon"] = horizon;
  j["overlap"] = overlap;
  j["seed"] = seed;
  auto& arr = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["family"] = r.family;
    row["N"] = r.n;
    row["metric"] = r.metric;
    // JSON has no infinity; keep the sentinel explicit.
    if (std::isfinite(r.value)) {
      row["value"] = r.value;
    } else {
      row["value"] = format_double(r.value);
    }
    arr.push_back(std::move(row));
  }
  out << j.dump(2) << '\n';
}

SweepReport run_error_sweep(const std::vector<SweepFamily>& families,
                            const std::vector<int>& n_values, const Trajectory& target,
                            const SweepSettings& settings) {
  const PhaseConfig phase = sweep_phase(settings);
  const Gains gains = Gains::critically_damped(settings.elastic, target.dims());
  const Trajectory demo = differentiate(target);
  const ForcingSamples forcing = extract_forcing(demo, gains, phase, ExtractionForm::Classical);

  const auto grid = cells(families, n_values);
  std::vector<double> errors(grid.size(), kInf);
  parallel_for(static_cast<int>(grid.size()), settings.threads, [&](int c) {
    const Cell& cell = grid[c];
    try {
      const DmpModel model = learn_dmp(demo, gains, phase, sweep_basis(cell.family, cell.n, settings));
      double sq = 0.0;
      for (int p = 0; p < model.dims(); ++p) {
        const double e = forcing_l2_error(model, forcing, p);
        sq += e * e;
      }
      errors[c] = std::sqrt(sq);
    } catch (const ConditioningError&) {
      errors[c] = kInf;
    }
  });

  SweepReport report = empty_report(settings);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const std::string label = grid[c].family.label();
    report.rows.push_back({label, grid[c].n, "l2_error", errors[c]});
    report.rows.push_back(
        {label, grid[c].n, "parameters", static_cast<double>(grid[c].family.parameters(grid[c].n))});
  }
  return report;
}

SweepReport run_condition_sweep(const std::vector<SweepFamily>& families,
                                const std::vector<int>& n_values, const SweepSettings& settings) {
  const PhaseConfig phase = sweep_phase(settings);
  const auto grid = cells(families, n_values);
  std::vector<double> conds(grid.size(), kInf);
  parallel_for(static_cast<int>(grid.size()), settings.threads, [&](int c) {
    conds[c] = condition_number(normal_matrix(sweep_basis(grid[c].family, grid[c].n, settings), phase));
  });
  SweepReport report = empty_report(settings);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    report.rows.push_back({grid[c].family.label(), grid[c].n, "cond", conds[c]});
  }
  return report;
}

SweepReport run_timing_sweep(const std::vector<SweepFamily>& families,
                             const std::vector<int>& n_values, int rhs_count,
                             const SweepSettings& settings, int batches) {
  require(rhs_count >= 1 && batches >= 1, ErrorKind::InvalidArgument,
          "timing needs at least one right-hand side and one batch");
  const PhaseConfig phase = sweep_phase(settings);
  const auto grid = cells(families, n_values);
  SweepReport report = empty_report(settings);
  using clock = std::chrono::steady_clock;

  for (std::size_t c = 0; c < grid.size(); ++c) {
    const BasisSet basis = sweep_basis(grid[c].family, grid[c].n, settings);
    LinearSystem sys;
    sys.matrix = normal_matrix(basis, phase);
    sys.bandwidth = system_bandwidth(basis);
    const int n = sys.size();
    const bool banded = sys.prefers_banded();

    Rng rng = Rng::stream(settings.seed, c);
    std::vector<Eigen::VectorXd> rhs(rhs_count, Eigen::VectorXd(n));
    for (auto& b : rhs) {
      for (int i = 0; i < n; ++i) b(i) = rng.uniform(-1.0, 1.0);
    }

    // Factorization is part of every solve. Singular Gaussian matrices are
    // timed all the same: the cost of the attempt is what is being measured.
    double sink = 0.0;
    auto solve = [&](const Eigen::VectorXd& b) {
      if (banded) {
        BandCholesky chol;
        chol.factor(sys.matrix, sys.bandwidth);
        sink += chol.solve(b)(0);
      } else {
        Eigen::LLT<Eigen::MatrixXd> llt(sys.matrix);
        sink += llt.solve(b)(0);
      }
    };
    solve(rhs.front());  // warm-up

    std::vector<double> means;
    for (int batch = 0; batch < batches; ++batch) {
      const auto start = clock::now();
      for (const auto& b : rhs) solve(b);
      const std::chrono::duration<double> elapsed = clock::now() - start;
      means.push_back(elapsed.count() / rhs_count);
    }
    std::nth_element(means.begin(), means.begin() + batches / 2, means.end());
    volatile double keep = sink;
    (void)keep;

    const std::string label = grid[c].family.label();
    report.rows.push_back({label, grid[c].n, "seconds", means[batches / 2]});
    report.rows.push_back({label, grid[c].n, "banded", banded ? 1.0 : 0.0});
  }
  return report;
}

SweepReport run_sparsity(const SweepFamily& family, const std::vector<int>& n_values,
                         const SweepSettings& settings) {
  const PhaseConfig phase = sweep_phase(settings);
  SweepReport report = empty_report(settings);
  std::vector<std::vector<SweepRow>> rows(n_values.size());
  parallel_for(static_cast<int>(n_values.size()), settings.threads, [&](int c) {
    const int n = n_values[c];
    const BasisSet basis = sweep_basis(family, n, settings);
    LinearSystem sys;
    sys.matrix = normal_matrix(basis, phase);
    sys.bandwidth = system_bandwidth(basis);
    double offband = 0.0;
    for (int i = 0; i < sys.size(); ++i) {
      for (int k = 0; k < sys.size(); ++k) {
        if (std::abs(i - k) > sys.bandwidth) offband = std::max(offband, std::abs(sys.matrix(i, k)));
      }
    }
    const std::string label = family.label();
    rows[c] = {{label, n, "nnz", static_cast<double>(sys.structural_nonzeros())},
               {label, n, "bandwidth", static_cast<double>(sys.bandwidth)},
               {label, n, "numeric_zeros", static_cast<double>(sys.numeric_zeros())},
               {label, n, "offband_max_abs", offband}};
  });
  for (auto& r : rows) report.rows.insert(report.rows.end(), r.begin(), r.end());
  return report;
}

int bench_threads_from_env() {
  const char* raw = std::getenv("DMPKIT_THREADS");
  if (raw == nullptr) return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) return 1;
  return static_cast<int>(std::min(v, 256L));
}

}  // namespace dmpkit
