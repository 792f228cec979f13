#include "dmpkit/error.hpp"

namespace dmpkit {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::IndexOutOfRange: return "index_out_of_range";
    case ErrorKind::FullSupport: return "full_support";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::MalformedInput: return "malformed_input";
    case ErrorKind::DegenerateCoverage: return "degenerate_coverage";
    case ErrorKind::ZeroScale: return "zero_scale";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::NullTransform: return "null_transform";
    case ErrorKind::Divergence: return "divergence";
  }
  return "unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateCoverage:
    case ErrorKind::ZeroScale:
    case ErrorKind::Conditioning:
    case ErrorKind::NullTransform:
    case ErrorKind::Divergence:
      return true;
    default:
      return false;
  }
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace dmpkit
