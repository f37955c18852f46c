#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chis::cli {

/// Runs the `chis` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on a runtime/data error, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chis::cli
