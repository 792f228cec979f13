#include "dmpkit/quadrature.hpp"

#include "dmpkit/error.hpp"

#include <algorithm>
#include <cmath>

namespace dmpkit {

Quadrature composite_simpson(std::span<const double> breakpoints, int min_nodes,
                             int min_per_panel) {
  require(breakpoints.size() >= 2, ErrorKind::InvalidArgument,
          "quadrature needs at least two breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    require(breakpoints[i] > breakpoints[i - 1], ErrorKind::InvalidArgument,
            "quadrature breakpoints must be strictly increasing");
  }
  const int panels = static_cast<int>(breakpoints.size()) - 1;
  int per_panel = std::max(min_per_panel, (min_nodes - 1 + panels - 1) / panels);
  per_panel = std::max(per_panel, 2);
  if (per_panel % 2 != 0) ++per_panel;

  Quadrature q;
  const std::size_t total = static_cast<std::size_t>(panels) * per_panel + 1;
  q.nodes.reserve(total);
  q.weights.assign(total, 0.0);
  q.nodes.push_back(breakpoints[0]);
  for (int p = 0; p < panels; ++p) {
    const double a = breakpoints[p];
    const double b = breakpoints[p + 1];
    const double h = (b - a) / per_panel;
    const std::size_t base = static_cast<std::size_t>(p) * per_panel;
    for (int k = 1; k <= per_panel; ++k) {
      q.nodes.push_back(k == per_panel ? b : a + k * h);
    }
    for (int k = 0; k <= per_panel; ++k) {
      const double c = (k == 0 || k == per_panel) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      q.weights[base + k] += c * h / 3.0;
    }
  }
  return q;
}

}  // namespace dmpkit
