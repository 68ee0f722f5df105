#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harmkit::cli {

// Runs one CLI invocation. args excludes the program name. Returns the
// process exit code: 0 success, 2 input/parse error, 3 inconsistent model,
// 4 unknown/unusable target, 5 no attack path, 6 campaign goal not reached.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace harmkit::cli
