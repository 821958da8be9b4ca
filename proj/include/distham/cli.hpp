#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace distham::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kConfig = 2;
inline constexpr int kNumerical = 3;

/// Run one command line (without the program name). Reports go to `out`,
/// errors as a JSON object to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace distham::cli
