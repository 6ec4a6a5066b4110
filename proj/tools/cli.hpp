#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rffs::cli {

enum ExitCode : int {
  kOk = 0,
  kPartialFailure = 1,  // some labels/files failed; the rest completed
  kError = 2,           // usage error or fatal failure
};

/// Runs one CLI invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rffs::cli
