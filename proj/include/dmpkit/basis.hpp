#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace dmpkit {

/// The five basis-function families (Wendland carries its order 2..8).
struct BasisFamily {
  enum class Tag { Gaussian, TruncatedGaussian, Mollifier, Wendland };

  Tag tag = Tag::Mollifier;
  int wendland_order = 0;    ///< only meaningful for Tag::Wendland
  double trunc_kappa = 3.0;  ///< theta_i = trunc_kappa / sqrt(h_i), truncated Gaussian only

  static BasisFamily gaussian() { return {Tag::Gaussian}; }
  static BasisFamily truncated_gaussian(double kappa = 3.0) { return {Tag::TruncatedGaussian, 0, kappa}; }
  static BasisFamily mollifier() { return {Tag::Mollifier}; }
  static BasisFamily wendland(int order) { return {Tag::Wendland, order}; }

  /// Parses "gaussian", "truncated_gaussian", "mollifier", "wendland_<k>".
  static BasisFamily parse(const std::string& label);
  std::string label() const;

  /// Mollifier and Wendland bases vanish outside a bounded interval.
  bool compact() const { return tag == Tag::Mollifier || tag == Tag::Wendland; }
  /// Gaussian-type families use the squared-gap width rule.
  bool gaussian_type() const { return !compact(); }

  void validate() const;

  friend bool operator==(const BasisFamily&, const BasisFamily&) = default;
};

/// Interval in s. Bounds may be infinite; `upper_closed` marks the one-sided
/// truncated-Gaussian cutoff (-inf, c + theta].
struct SupportInterval {
  double lower;
  double upper;
  bool upper_closed = false;

  bool contains(double s) const { return s > lower && (upper_closed ? s <= upper : s < upper); }
};

/// c_i = exp(-alpha * i * T / N), i = 0..N. N = 0 yields the single center 1.
std::vector<double> make_centers(int n, double alpha, double horizon);

/// Gaussian-type: h_i = overlap / (c_{i+1} - c_i)^2 with h_N = h_{N-1}.
/// Compact: a_i = overlap / |c_i - c_{i-1}| with a_0 = a_1.
std::vector<double> make_widths(const BasisFamily& family, std::span<const double> centers,
                                double overlap = 1.0);

class BasisSet {
 public:
  BasisSet() = default;

  /// Validates the centers/widths pair; used when loading stored models.
  BasisSet(BasisFamily family, std::vector<double> centers, std::vector<double> widths,
           double overlap, bool biased);

  /// Centers from the canonical-system parameters, widths from the family rule.
  static BasisSet make(BasisFamily family, int n, double alpha, double horizon,
                       double overlap = 1.0, bool biased = false);

  const BasisFamily& family() const { return family_; }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& widths() const { return widths_; }
  double overlap() const { return overlap_; }
  bool biased() const { return biased_; }

  /// Number of basis functions, N + 1.
  int size() const { return static_cast<int>(centers_.size()); }
  /// Regressor count: N + 1, or 2(N + 1) with bias terms.
  int row_size() const { return biased_ ? 2 * size() : size(); }

  /// Truncation offset theta_i (truncated Gaussian only).
  double theta(int i) const;

  double eval(int i, double s) const;
  SupportInterval support(int i) const;

  /// Sum of all basis values at s.
  double denominator(double s) const;

  /// Normalized regressor row at s, written into `row` (length row_size()).
  /// Unbiased: psi_i s / sum psi. Biased: [psi_i s / sum psi, psi_i / sum psi].
  /// Throws DegenerateCoverage when no basis covers s.
  void forcing_row(double s, std::span<double> row) const;
  Eigen::VectorXd forcing_row(double s) const;

  /// Lowest s covered by any compact basis (-inf for Gaussian-type families).
  double coverage_floor() const;

  /// Structural half-bandwidth of the normal matrix: largest index distance
  /// between two bases whose supports overlap.
  int structural_bandwidth() const;

 private:
  void check_index(int i) const;

  BasisFamily family_;
  std::vector<double> centers_;
  std::vector<double> widths_;
  double overlap_ = 1.0;
  bool biased_ = false;
};

}  // namespace dmpkit
