#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsui::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitComputation = 3;

/// Parses `args` (without the program name), runs the selected command and writes its
/// table or report to --out, or to `out` when no path is given. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// printf("%.17g") equivalent that ignores the locale; non-finite values give "nan"/"inf".
std::string format_number(double value);

}  // namespace tsui::cli
