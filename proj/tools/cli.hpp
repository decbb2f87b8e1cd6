#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace residua {

/// Runs the command line front end on `args` (program name excluded).
/// Exit codes: 0 success, 1 usage or input error, 2 computation error
/// (size caps, non-convergence), 3 invariant violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace residua
