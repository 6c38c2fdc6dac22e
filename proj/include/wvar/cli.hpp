#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wvar::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kDataError = 3,
    kNumericalError = 4,
};

/// Runs one `wvar` command line. `args` excludes the program name. Reports go
/// to `out` unless an output file is requested; diagnostics go to `err`.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wvar::cli
