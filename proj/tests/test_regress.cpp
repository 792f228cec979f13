#include "dmpkit/bench.hpp"
#include "dmpkit/dmp.hpp"
#include "dmpkit/error.hpp"
#include "dmpkit/regress.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>

using namespace dmpkit;

namespace {

const PhaseConfig kPhase{4.0, 1.0, 1.0};

Trajectory line_demo(double t0, double t1, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     int n = 201) {
  Trajectory tr;
  tr.times.resize(n);
  tr.positions.resize(n, 2);
  for (int k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / (n - 1);
    tr.times[k] = t0 + (t1 - t0) * u;
    const double w = u * u * (3 - 2 * u);
    tr.positions.row(k) = (a + w * (b - a)).transpose();
    tr.positions(k, 1) += 0.3 * std::sin(M_PI * u);
  }
  return tr;
}

DemoSet small_set() {
  DemoSet set = gen_limit_cycle_dataset(4, 11);
  return set;
}

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("a demo already on the unit chord is unchanged") {
  Trajectory tr;
  const int n = 50;
  tr.times.resize(n);
  tr.positions.resize(n, 1);
  for (int k = 0; k < n; ++k) {
    tr.times[k] = k / (n - 1.0);
    tr.positions(k, 0) = std::pow(tr.times[k], 1.5);
  }
  const auto aligned = align_demos({{tr}}, 1.0);
  CHECK(aligned.maps[0].scale() == 1.0);
  CHECK(aligned.maps[0].matrix()(0, 0) == 1.0);
  CHECK(rel_diff(aligned.demos[0].positions, tr.positions) == 0.0);
  CHECK(aligned.demos[0].times == tr.times);
}

TEST_CASE("alignment of a shifted, scaled demo") {
  const Eigen::Vector2d a(2, 0), b(4, 0);
  const auto demo = line_demo(2.0, 4.0, a, b);
  const double horizon = 1.5;
  const auto aligned = align_demos({{demo}}, horizon);
  const auto& map = aligned.maps[0];
  CHECK(map.scale() == doctest::Approx(std::sqrt(2.0) / 2.0));

  // hand-built map: rotate by 45 degrees, scale by sqrt(2)/2
  const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
  Eigen::Matrix2d expected;
  expected << c, -s, s, c;
  expected *= std::sqrt(2.0) / 2.0;
  CHECK((map.matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);

  const auto& out = aligned.demos[0];
  CHECK(out.times.front() == 0.0);
  CHECK(out.times.back() == horizon);
  for (int k = 0; k < out.samples(); ++k) {
    CHECK(out.times[k] == doctest::Approx((demo.times[k] - 2.0) * horizon / 2.0));
    const Eigen::Vector2d want = expected * (demo.positions.row(k).transpose() - a);
    CHECK((out.positions.row(k).transpose() - want).norm() < 1e-14);
  }
  CHECK(!out.velocities.has_value());
}

TEST_CASE("aligned endpoints are exact") {
  const auto aligned = align_demos(small_set(), 1.0);
  for (const auto& tr : aligned.demos) {
    CHECK((tr.start().array() == 0.0).all());
    CHECK((tr.end().array() == 1.0).all());
  }
}

TEST_CASE("alignment errors name the offending demo") {
  DemoSet set = small_set();
  Trajectory loop = set.demos[0];
  loop.positions.row(loop.samples() - 1) = loop.positions.row(0);
  set.demos.insert(set.demos.begin() + 2, loop);
  try {
    align_demos(set, 1.0);
    FAIL("expected an alignment error");
  } catch (const AlignmentError& e) {
    CHECK(e.kind() == ErrorKind::Alignment);
    CHECK(e.demo_index() == 2);
  }

  CHECK_THROWS_AS(align_demos(DemoSet{}, 1.0), Error);
  DemoSet mixed = small_set();
  Trajectory one_d;
  one_d.times = {0, 1, 2, 3};
  one_d.positions = Eigen::MatrixXd::Constant(4, 1, 1.0);
  one_d.positions(3, 0) = 2.0;
  mixed.demos.push_back(one_d);
  CHECK_THROWS_AS(align_demos(mixed, 1.0), Error);
}

TEST_CASE("duplicated demos reproduce single-demo learning") {
  const auto gains = Gains::critically_damped(150.0, 2);
  const auto basis = BasisSet::make(BasisFamily::mollifier(), 30, 4.0, 1.0);
  DemoSet set = small_set();
  set.demos.resize(1);
  const auto single = align_demos(set, 1.0);
  const auto learned = learn_dmp(single.demos[0], gains, kPhase, basis);

  for (int m : {1, 3, 7}) {
    DemoSet copies;
    for (int j = 0; j < m; ++j) copies.demos.push_back(set.demos[0]);
    const auto model = regress_weights(align_demos(copies, 1.0), gains, kPhase, basis);
    CHECK(rel_diff(model.weights, learned.weights) < 1e-10);
    CHECK(model.learned_x0.isZero());
    CHECK(model.learned_g.isOnes());
  }
}

TEST_CASE("doubling the set leaves the weights alone") {
  const auto gains = Gains::critically_damped(150.0, 2);
  const auto basis = BasisSet::make(BasisFamily::gaussian(), 25, 4.0, 1.0);
  const DemoSet set = small_set();
  DemoSet twice = set;
  twice.demos.insert(twice.demos.end(), set.demos.begin(), set.demos.end());
  const auto a = regress_weights(align_demos(set, 1.0), gains, kPhase, basis);
  const auto b = regress_weights(align_demos(twice, 1.0), gains, kPhase, basis);
  CHECK(rel_diff(b.weights, a.weights) < 1e-10);
}

TEST_CASE("the regression matrix is shared and carries 2M") {
  const auto gains = Gains::critically_damped(150.0, 2);
  const auto basis = BasisSet::make(BasisFamily::wendland(3), 20, 4.0, 1.0);
  const auto aligned = align_demos(small_set(), 1.0);
  const int m = static_cast<int>(aligned.demos.size());

  std::vector<ForcingSamples> forcing;
  std::vector<double> phases;
  for (const auto& tr : aligned.demos) {
    forcing.push_back(extract_forcing(differentiate(tr), gains, kPhase, ExtractionForm::Classical));
    phases.insert(phases.end(), forcing.back().phases.begin(), forcing.back().phases.end());
  }
  const Eigen::MatrixXd big = regression_matrix(basis, kPhase, m, phases);

  // rebuild per demo and per dimension on the common breakpoints; values differ, A must not
  std::vector<double> sorted = phases;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (const auto& f : forcing) {
    ForcingSamples resampled;
    resampled.phases = sorted;
    resampled.values.resize(static_cast<Eigen::Index>(sorted.size()), 2);
    for (std::size_t k = 0; k < sorted.size(); ++k)
      for (int p = 0; p < 2; ++p) resampled.values(static_cast<Eigen::Index>(k), p) = f.at(sorted[k], p);
    for (int p = 0; p < 2; ++p) {
      const auto sys = assemble_system(basis, resampled, p, kPhase);
      CHECK(rel_diff(2.0 * m * sys.matrix, big) < 1e-14);
    }
  }
  CHECK(rel_diff(regression_matrix(basis, kPhase, 2 * m, phases), 2.0 * big) == 0.0);
}

TEST_CASE("a common rotation of every demo does not change the result") {
  const auto gains = Gains::critically_damped(150.0, 2);
  const auto basis = BasisSet::make(BasisFamily::mollifier(), 40, 4.0, 1.0);
  const DemoSet set = small_set();
  const double angle = 0.7;
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  DemoSet turned = set;
  for (auto& tr : turned.demos) tr.positions = tr.positions * r.transpose();

  const auto a = regress_weights(align_demos(set, 1.0), gains, kPhase, basis);
  const auto b = regress_weights(align_demos(turned, 1.0), gains, kPhase, basis);

  RolloutOptions ext;
  ext.formulation = Formulation::extended();
  const auto& demo = set.demos[0];
  const auto base = rollout(a, demo.start(), Goal(demo.end()), ext);
  const auto other = rollout(b, r * demo.start(), Goal(Eigen::VectorXd(r * demo.end())), ext);
  const Eigen::MatrixXd back = other.positions * r;  // rows times r = (r^T x)^T
  CHECK((back - base.positions).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("horizon and gains must agree with the aligned set") {
  const auto aligned = align_demos(small_set(), 2.0);
  const auto basis = BasisSet::make(BasisFamily::mollifier(), 20, 4.0, 1.0);
  CHECK_THROWS_AS(regress_weights(aligned, Gains::critically_damped(150.0, 2), kPhase, basis), Error);
  const auto ok = align_demos(small_set(), 1.0);
  CHECK_THROWS_AS(regress_weights(ok, Gains::critically_damped(150.0, 3), kPhase, basis), Error);
}
