#ifndef CLUSTSIG_CLI_HPP
#define CLUSTSIG_CLI_HPP

#include <string>
#include <vector>

namespace clustsig::cli {

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 success, 2 configuration/usage error, 3 statistical/runtime
// failure (with a machine-readable error report on stdout).
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace clustsig::cli

#endif
