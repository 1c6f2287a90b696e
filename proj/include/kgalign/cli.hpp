#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgalign::cli {

/// Process exit statuses.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kParseError = 3,
  kProviderError = 4,
  kOtherError = 5,
};

/// Name of the environment variable that overrides the remote endpoint from a config file.
inline constexpr const char* kEndpointEnv = "KGALIGN_EMBED_ENDPOINT";

/// Runs the command line `args` (args[0] is the program name). Metrics tables go to `out`,
/// logs and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kgalign::cli
