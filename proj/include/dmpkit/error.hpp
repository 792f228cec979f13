#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dmpkit {

enum class ErrorKind {
  // validation (caller supplied something outside the contract)
  InvalidArgument,
  IndexOutOfRange,
  FullSupport,
  Alignment,
  MalformedInput,
  // numerical
  DegenerateCoverage,
  ZeroScale,
  Conditioning,
  NullTransform,
  Divergence,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// True for kinds that signal a numerical failure rather than a bad input.
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a linear system is singular to working precision.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double cond_estimate)
      : Error(ErrorKind::Conditioning, what), cond_(cond_estimate) {}

  double cond_estimate() const noexcept { return cond_; }

 private:
  double cond_;
};

/// Raised when a demonstration cannot be aligned (coincident endpoints).
class AlignmentError : public Error {
 public:
  AlignmentError(const std::string& what, std::size_t demo_index)
      : Error(ErrorKind::Alignment, what), index_(demo_index) {}

  std::size_t demo_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace dmpkit
