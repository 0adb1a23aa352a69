#pragma once

// The `psh` command line. Exit codes: 0 success, 1 a check failed,
// 2 usage or parse error, 3 an enumeration bound was refused.

#include <iosfwd>
#include <string>
#include <vector>

namespace psh {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRefused = 3;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psh
