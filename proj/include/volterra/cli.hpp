#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace volterra::cli {

/// Entry point shared by the volterra executable and the tests.
/// Exit codes: 0 success, 1 validation failure, 2 solver failure
/// (diverged / infeasible), 3 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace volterra::cli
