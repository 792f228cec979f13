#pragma once

#include <span>
#include <vector>

namespace dmpkit {

/// Composite Simpson rule on a piecewise-uniform grid. Each panel between two
/// consecutive breakpoints is split into the same even number of subintervals.
struct Quadrature {
  std::vector<double> nodes;    ///< increasing
  std::vector<double> weights;  ///< same length as nodes

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
    return acc;
  }
};

/// Builds the rule over [breakpoints.front(), breakpoints.back()]. The
/// breakpoints must be strictly increasing. The per-panel subinterval count
/// is the smallest even number >= max(min_per_panel, ceil(min_nodes / panels)).
Quadrature composite_simpson(std::span<const double> breakpoints, int min_nodes,
                             int min_per_panel = 10);

}  // namespace dmpkit
