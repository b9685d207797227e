#pragma once

namespace hconv::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 every check passed, 1 a check failed, 2 usage, config or
/// resolution error, 3 numeric or accuracy failure.
int run_cli(int argc, char** argv);

}  // namespace hconv::cli
