#pragma once

// Command-line front end. Exit codes: 0 success, 2 usage or validation
// error, 3 physics-domain error.

#include <ostream>
#include <string>
#include <vector>

namespace biphoton::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitPhysics = 3;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace biphoton::cli
