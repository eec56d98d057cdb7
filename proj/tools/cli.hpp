#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace convbeers::cli {

/// Runs one CLI invocation. `args` excludes the program name. Reports go to
/// `out` as JSON; failures print an error JSON to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace convbeers::cli
