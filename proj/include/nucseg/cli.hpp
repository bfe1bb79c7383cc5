#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nucseg::cli {

/// Runs the `nucseg` command line. Reports go to `out`, diagnostics to `err`.
/// Returns 0 on success, 2 on library errors, CLI11's code on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nucseg::cli
