#include "dmpkit/phase.hpp"

#include "dmpkit/error.hpp"

namespace dmpkit {

void PhaseConfig::validate() const {
  require(alpha > 0.0 && std::isfinite(alpha), ErrorKind::InvalidArgument, "alpha must be positive");
  require(tau > 0.0 && std::isfinite(tau), ErrorKind::InvalidArgument, "tau must be positive");
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::InvalidArgument,
          "horizon must be positive");
}

}  // namespace dmpkit
