#include "dmpkit/basis.hpp"
#include "dmpkit/error.hpp"
#include "dmpkit/learn.hpp"
#include "dmpkit/linear_system.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <random>

using namespace dmpkit;

namespace {

LinearSystem system_of(Eigen::MatrixXd a, Eigen::VectorXd b, int bw) {
  LinearSystem sys;
  sys.matrix = std::move(a);
  sys.rhs = std::move(b);
  sys.bandwidth = bw;
  return sys;
}

}  // namespace

TEST_CASE("trivial solves") {
  const int n = 5;
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n);
  e1(0) = 1.0;
  const auto r = solve_weights(system_of(Eigen::MatrixXd::Identity(n, n), e1, 0));
  CHECK((r.weights - e1).norm() == 0.0);
  CHECK(r.residual == 0.0);

  const auto d = solve_weights(
      system_of(Eigen::Vector2d(1, 10).asDiagonal(), Eigen::Vector2d(1, 10), 0));
  CHECK(d.weights(0) == doctest::Approx(1.0));
  CHECK(d.weights(1) == doctest::Approx(1.0));
}

TEST_CASE("condition numbers") {
  CHECK(condition_number(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0));
  CHECK(condition_number(Eigen::MatrixXd(Eigen::Vector2d(1, 10).asDiagonal())) ==
        doctest::Approx(10.0));
  Eigen::MatrixXd singular = Eigen::MatrixXd::Ones(3, 3);
  CHECK(condition_number(singular) == std::numeric_limits<double>::infinity());
}

TEST_CASE("singular systems raise a conditioning error") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  for (SolvePath path : {SolvePath::Dense, SolvePath::Banded}) {
    try {
      solve_weights(system_of(a, Eigen::VectorXd::Ones(3), 0), path);
      FAIL("expected a conditioning error");
    } catch (const ConditioningError& e) {
      CHECK(e.kind() == ErrorKind::Conditioning);
      CHECK(e.cond_estimate() > 1e15);
    }
  }
}

TEST_CASE("banded and dense paths agree") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (const auto& family : {BasisFamily::mollifier(), BasisFamily::wendland(3)}) {
    for (int n : {40, 120}) {
      const auto basis = BasisSet::make(family, n, 4.0, 1.0);
      const PhaseConfig phase{4.0, 1.0, 1.0};
      const RegressorTable table(basis, learning_quadrature(basis, phase.final_phase(), 1.0));
      Eigen::VectorXd b(basis.size());
      for (auto& v : b) v = nd(gen);
      const auto sys = system_of(table.gram(), b, system_bandwidth(basis));
      CHECK(sys.prefers_banded());
      const auto banded = solve_weights(sys, SolvePath::Banded);
      const auto dense = solve_weights(sys, SolvePath::Dense);
      CHECK(banded.path == SolvePath::Banded);
      CHECK(dense.path == SolvePath::Dense);
      CHECK((banded.weights - dense.weights).norm() <= 1e-10 * dense.weights.norm());
      CHECK(solve_weights(sys).path == SolvePath::Banded);
    }
  }
}

TEST_CASE("residual respects the conditioning bound") {
  const auto basis = BasisSet::make(BasisFamily::wendland(4), 30, 4.0, 1.0);
  const PhaseConfig phase{4.0, 1.0, 1.0};
  const RegressorTable table(basis, learning_quadrature(basis, phase.final_phase(), 1.0));
  Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(basis.size(), -1.0, 2.0);
  const auto sys = system_of(table.gram(), b, system_bandwidth(basis));
  const auto r = solve_weights(sys);

  // reference in extended precision via iterative refinement on long double
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const MatL al = sys.matrix.cast<long double>();
  const VecL ref = al.ldlt().solve(b.cast<long double>());
  const double rel_err =
      static_cast<double>((r.weights.cast<long double>() - ref).norm() / ref.norm());
  CHECK(rel_err <= condition_number(sys) * r.residual + 1e-14);
  CHECK(r.residual < 1e-10);
}

TEST_CASE("sparsity bookkeeping") {
  const auto basis = BasisSet::make(BasisFamily::mollifier(), 64, 4.0, 1.0);
  const PhaseConfig phase{4.0, 1.0, 1.0};
  const RegressorTable table(basis, learning_quadrature(basis, phase.final_phase(), 1.0));
  LinearSystem sys = system_of(table.gram(), Eigen::VectorXd::Ones(basis.size()),
                               system_bandwidth(basis));
  const int n = sys.size();
  const int bw = sys.bandwidth;
  CHECK(sys.structural_nonzeros() == static_cast<long>(n) * (2 * bw + 1) - static_cast<long>(bw) * (bw + 1));
  CHECK(sys.numeric_zeros() >= static_cast<long>(n) * n - sys.structural_nonzeros());
  for (int h = 0; h < n; ++h) {
    for (int k = 0; k < n; ++k) {
      if (std::abs(h - k) > bw) CHECK(sys.matrix(h, k) == 0.0);
    }
  }
}
