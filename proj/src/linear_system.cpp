#include "dmpkit/linear_system.hpp"

#include "dmpkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dmpkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// A pivot that keeps less than this fraction of its diagonal entry means the
// leading block is singular to working precision.
double pivot_floor(int band) { return 4.0 * (band + 1) * kEps; }

[[noreturn]] void throw_singular(const Eigen::MatrixXd& a, const char* path) {
  const double cond = condition_number(a);
  std::ostringstream msg;
  msg << "matrix is singular to working precision (" << path
      << " Cholesky, cond estimate " << cond << ")";
  throw ConditioningError(msg.str(), cond);
}

}  // namespace

long LinearSystem::structural_nonzeros() const {
  const long n = size();
  const long b = std::min<long>(bandwidth, std::max<long>(n - 1, 0));
  return n + 2 * (b * n - b * (b + 1) / 2);
}

long LinearSystem::numeric_zeros() const { return (matrix.array() == 0.0).count(); }

bool BandCholesky::factor(const Eigen::MatrixXd& a, int bandwidth) {
  const int n = static_cast<int>(a.rows());
  bandwidth_ = std::clamp(bandwidth, 0, std::max(n - 1, 0));
  const int b = bandwidth_;
  band_.setZero(b + 1, n);
  auto l = [&](int r, int c) -> double& { return band_(r - c, c); };
  for (int c = 0; c < n; ++c) {
    double pivot = a(c, c);
    for (int k = std::max(0, c - b); k < c; ++k) pivot -= l(c, k) * l(c, k);
    if (!(pivot > pivot_floor(b) * std::abs(a(c, c)))) return false;
    const double d = std::sqrt(pivot);
    l(c, c) = d;
    for (int r = c + 1; r <= std::min(n - 1, c + b); ++r) {
      double v = a(r, c);
      for (int k = std::max(0, r - b); k < c; ++k) v -= l(r, k) * l(c, k);
      l(r, c) = v / d;
    }
  }
  return true;
}

Eigen::VectorXd BandCholesky::solve(const Eigen::VectorXd& rhs) const {
  const int n = static_cast<int>(band_.cols());
  const int b = bandwidth_;
  auto l = [&](int r, int c) { return band_(r - c, c); };
  Eigen::VectorXd y = rhs;
  for (int r = 0; r < n; ++r) {
    double v = y(r);
    for (int k = std::max(0, r - b); k < r; ++k) v -= l(r, k) * y(k);
    y(r) = v / l(r, r);
  }
  for (int r = n - 1; r >= 0; --r) {
    double v = y(r);
    for (int k = r + 1; k <= std::min(n - 1, r + b); ++k) v -= l(k, r) * y(k);
    y(r) = v / l(r, r);
  }
  return y;
}

SolveResult solve_weights(const LinearSystem& sys, SolvePath path) {
  const int n = sys.size();
  require(n > 0 && sys.matrix.cols() == n && sys.rhs.size() == n, ErrorKind::InvalidArgument,
          "linear system shape mismatch");
  if (path == SolvePath::Auto) path = sys.prefers_banded() ? SolvePath::Banded : SolvePath::Dense;

  SolveResult out;
  out.path = path;
  if (path == SolvePath::Banded) {
    BandCholesky chol;
    if (!chol.factor(sys.matrix, sys.bandwidth)) throw_singular(sys.matrix, "banded");
    out.weights = chol.solve(sys.rhs);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(sys.matrix);
    if (llt.info() != Eigen::Success) throw_singular(sys.matrix, "dense");
    const Eigen::MatrixXd& lower = llt.matrixLLT();
    for (int c = 0; c < n; ++c) {
      if (!(lower(c, c) * lower(c, c) > pivot_floor(n - 1) * std::abs(sys.matrix(c, c)))) {
        throw_singular(sys.matrix, "dense");
      }
    }
    out.weights = llt.solve(sys.rhs);
  }
  if (!out.weights.allFinite()) throw_singular(sys.matrix, "non-finite");
  const double bnorm = sys.rhs.norm();
  out.residual = bnorm > 0.0 ? (sys.matrix * out.weights - sys.rhs).norm() / bnorm
                             : (sys.matrix * out.weights).norm();
  return out;
}

double condition_number(const Eigen::MatrixXd& a) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorKind::InvalidArgument,
          "condition number needs a square matrix");
  double hi = 0.0;
  double lo = 0.0;
  if (a.isApprox(a.transpose(), 1e-12)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd mags = eig.eigenvalues().cwiseAbs();
    hi = mags.maxCoeff();
    lo = mags.minCoeff();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    hi = svd.singularValues().maxCoeff();
    lo = svd.singularValues().minCoeff();
  }
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  const double c = hi / lo;
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

}  // namespace dmpkit
