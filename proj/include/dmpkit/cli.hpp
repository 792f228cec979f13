#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dmpkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Dispatches one of learn, rollout, update, regress, bench, gen.
/// `args` excludes the program name. Diagnostics go to `err` as one line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dmpkit
