#pragma once

#include <string>
#include <vector>

namespace gaitopt::cli {

/// Exit codes: 0 success, 1 invalid input, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNumerical = 2;

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace gaitopt::cli
