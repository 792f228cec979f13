#include "dmpkit/basis.hpp"

#include "dmpkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmpkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wendland(int order, double r) {
  const double p = std::max(1.0 - r, 0.0);
  if (p == 0.0) return 0.0;
  switch (order) {
    case 2: return p * p;
    case 3: return p * p * p;
    case 4: return std::pow(p, 4) * (4.0 * r + 1.0);
    case 5: return std::pow(p, 5) * (5.0 * r + 1.0);
    case 6: return std::pow(p, 6) * ((35.0 * r + 18.0) * r + 3.0);
    case 7: return std::pow(p, 7) * ((16.0 * r + 7.0) * r + 1.0);
    case 8: return std::pow(p, 8) * (((32.0 * r + 25.0) * r + 8.0) * r + 1.0);
    default: break;
  }
  fail(ErrorKind::InvalidArgument, "wendland order must be in 2..8");
}

}  // namespace

BasisFamily BasisFamily::parse(const std::string& label) {
  if (label == "gaussian") return gaussian();
  if (label == "truncated_gaussian") return truncated_gaussian();
  if (label == "mollifier") return mollifier();
  const std::string prefix = "wendland_";
  if (label.rfind(prefix, 0) == 0 && label.size() == prefix.size() + 1) {
    const int k = label.back() - '0';
    BasisFamily f = wendland(k);
    f.validate();
    return f;
  }
  fail(ErrorKind::InvalidArgument, "unknown basis family '" + label + "'");
}

std::string BasisFamily::label() const {
  switch (tag) {
    case Tag::Gaussian: return "gaussian";
    case Tag::TruncatedGaussian: return "truncated_gaussian";
    case Tag::Mollifier: return "mollifier";
    case Tag::Wendland: return "wendland_" + std::to_string(wendland_order);
  }
  return "unknown";
}

void BasisFamily::validate() const {
  if (tag == Tag::Wendland) {
    require(wendland_order >= 2 && wendland_order <= 8, ErrorKind::InvalidArgument,
            "wendland order must be in 2..8");
  }
  if (tag == Tag::TruncatedGaussian) {
    require(trunc_kappa > 0.0 && std::isfinite(trunc_kappa), ErrorKind::InvalidArgument,
            "trunc_kappa must be positive");
  }
}

std::vector<double> make_centers(int n, double alpha, double horizon) {
  require(alpha > 0.0 && horizon > 0.0, ErrorKind::InvalidArgument,
          "centers need positive alpha and horizon");
  require(n >= 0, ErrorKind::InvalidArgument, "basis count must be non-negative");
  if (n == 0) return {1.0};
  std::vector<double> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = std::exp(-alpha * i * horizon / n);
  return c;
}

std::vector<double> make_widths(const BasisFamily& family, std::span<const double> centers,
                                double overlap) {
  require(centers.size() >= 2, ErrorKind::InvalidArgument, "width rule needs N >= 1");
  require(overlap > 0.0, ErrorKind::InvalidArgument, "overlap must be positive");
  const std::size_t n = centers.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    require(centers[i + 1] != centers[i], ErrorKind::InvalidArgument,
            "adjacent centers coincide (zero gap)");
  }
  std::vector<double> w(n + 1);
  if (family.gaussian_type()) {
    for (std::size_t i = 0; i < n; ++i) {
      const double gap = centers[i + 1] - centers[i];
      w[i] = overlap / (gap * gap);
    }
    w[n] = w[n - 1];
  } else {
    for (std::size_t i = 1; i <= n; ++i) w[i] = overlap / std::abs(centers[i] - centers[i - 1]);
    w[0] = w[1];
  }
  return w;
}

BasisSet::BasisSet(BasisFamily family, std::vector<double> centers, std::vector<double> widths,
                   double overlap, bool biased)
    : family_(family),
      centers_(std::move(centers)),
      widths_(std::move(widths)),
      overlap_(overlap),
      biased_(biased) {
  family_.validate();
  require(!centers_.empty(), ErrorKind::InvalidArgument, "basis set is empty");
  require(centers_.size() == widths_.size(), ErrorKind::InvalidArgument,
          "centers and widths differ in length");
  require(std::abs(centers_[0] - 1.0) <= 1e-12, ErrorKind::InvalidArgument,
          "first center must be 1");
  for (std::size_t i = 1; i < centers_.size(); ++i) {
    require(centers_[i] < centers_[i - 1] && centers_[i] > 0.0, ErrorKind::InvalidArgument,
            "centers must be positive and strictly decreasing");
  }
  for (double w : widths_) {
    require(w > 0.0 && std::isfinite(w), ErrorKind::InvalidArgument, "widths must be positive");
  }
  require(overlap_ > 0.0, ErrorKind::InvalidArgument, "overlap must be positive");
}

BasisSet BasisSet::make(BasisFamily family, int n, double alpha, double horizon, double overlap,
                        bool biased) {
  auto centers = make_centers(n, alpha, horizon);
  std::vector<double> widths;
  if (n == 0) {
    // Degenerate single basis: wide enough to cover the whole phase range.
    const double span = 1.0 - std::exp(-alpha * horizon);
    widths = {family.gaussian_type() ? overlap / (span * span) : overlap / (2.0 * span)};
  } else {
    widths = make_widths(family, centers, overlap);
  }
  return BasisSet(family, std::move(centers), std::move(widths), overlap, biased);
}

void BasisSet::check_index(int i) const {
  require(i >= 0 && i < size(), ErrorKind::IndexOutOfRange,
          "basis index " + std::to_string(i) + " outside [0, " + std::to_string(size() - 1) + "]");
}

double BasisSet::theta(int i) const {
  check_index(i);
  return family_.trunc_kappa / std::sqrt(widths_[i]);
}

double BasisSet::eval(int i, double s) const {
  check_index(i);
  const double c = centers_[i];
  const double w = widths_[i];
  switch (family_.tag) {
    case BasisFamily::Tag::Gaussian:
      return std::exp(-w * (s - c) * (s - c));
    case BasisFamily::Tag::TruncatedGaussian:
      return (s - c <= theta(i)) ? std::exp(-0.5 * w * (s - c) * (s - c)) : 0.0;
    case BasisFamily::Tag::Mollifier: {
      const double r = std::abs(w * (s - c));
      return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0;
    }
    case BasisFamily::Tag::Wendland:
      return wendland(family_.wendland_order, std::abs(w * (s - c)));
  }
  return 0.0;
}

SupportInterval BasisSet::support(int i) const {
  check_index(i);
  switch (family_.tag) {
    case BasisFamily::Tag::Gaussian:
      return {-kInf, kInf};
    case BasisFamily::Tag::TruncatedGaussian:
      return {-kInf, centers_[i] + theta(i), true};
    default:
      return {centers_[i] - 1.0 / widths_[i], centers_[i] + 1.0 / widths_[i]};
  }
}

double BasisSet::denominator(double s) const {
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += eval(i, s);
  return acc;
}

void BasisSet::forcing_row(double s, std::span<double> row) const {
  const int n = size();
  require(static_cast<int>(row.size()) == row_size(), ErrorKind::InvalidArgument,
          "forcing row has the wrong length");
  if (family_.gaussian_type()) {
    // Normalize in log space so far-away Gaussians cannot underflow the sum.
    const bool truncated = family_.tag == BasisFamily::Tag::TruncatedGaussian;
    const double scale = truncated ? 0.5 : 1.0;
    double top = -kInf;
    for (int i = 0; i < n; ++i) {
      const double d = s - centers_[i];
      const double l = (truncated && d > theta(i)) ? -kInf : -scale * widths_[i] * d * d;
      row[i] = l;
      top = std::max(top, l);
    }
    if (top == -kInf) {
      fail(ErrorKind::DegenerateCoverage,
           "no basis function covers s = " + std::to_string(s) + " (overlap too small)");
    }
    double den = 0.0;
    for (int i = 0; i < n; ++i) {
      row[i] = std::exp(row[i] - top);
      den += row[i];
    }
    for (int i = 0; i < n; ++i) row[i] /= den;
  } else {
    double den = 0.0;
    for (int i = 0; i < n; ++i) {
      row[i] = eval(i, s);
      den += row[i];
    }
    if (!(den > 0.0)) {
      fail(ErrorKind::DegenerateCoverage,
           "no basis function covers s = " + std::to_string(s) + " (overlap too small)");
    }
    for (int i = 0; i < n; ++i) row[i] /= den;
  }
  if (biased_) {
    for (int i = 0; i < n; ++i) row[n + i] = row[i];
  }
  for (int i = 0; i < n; ++i) row[i] *= s;
}

Eigen::VectorXd BasisSet::forcing_row(double s) const {
  Eigen::VectorXd row(row_size());
  forcing_row(s, std::span<double>(row.data(), row.size()));
  return row;
}

double BasisSet::coverage_floor() const {
  if (!family_.compact()) return -kInf;
  double lo = kInf;
  for (int i = 0; i < size(); ++i) lo = std::min(lo, centers_[i] - 1.0 / widths_[i]);
  return lo;
}

int BasisSet::structural_bandwidth() const {
  const int n = size();
  if (!family_.compact()) return n - 1;
  int band = 0;
  for (int h = 0; h < n; ++h) {
    const double lo_h = centers_[h] - 1.0 / widths_[h];
    for (int k = h + 1; k < n; ++k) {
      if (centers_[k] + 1.0 / widths_[k] > lo_h) band = std::max(band, k - h);
    }
  }
  return band;
}

}  // namespace dmpkit
