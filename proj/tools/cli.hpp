#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdchk::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one command. args excludes the program name. Reports go to --out or
/// `out`; one-line diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdchk::cli
