#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace oocl::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kNoConvergence = 3;
/// validate: some |RD| above the threshold.
inline constexpr int kValidationFailed = 4;

/// Runs one command line (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oocl::cli
