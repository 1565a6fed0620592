#pragma once

#include <exception>

namespace oaknee::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCheck = 3;

/// Exit code for an exception escaping a subcommand: usage errors (bad flag
/// values) 1, data and file errors 2, anything else 3.
int exit_code_for(const std::exception& e);

/// Parses argv, runs one subcommand and returns the process exit code.
/// Diagnostics go to standard error.
int run(int argc, const char* const* argv);

}  // namespace oaknee::cli
