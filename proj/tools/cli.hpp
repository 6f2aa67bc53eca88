#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rwm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCriterionFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs one rwm-sim invocation; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rwm
