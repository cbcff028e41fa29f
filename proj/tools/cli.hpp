#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace botscan::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kUsageError = 2,
  kEnvironmentError = 3,
  kDataError = 4,
  kNetworkError = 5,
};

using Environment = std::map<std::string, std::string>;

/// Environment variable consulted for the API base URL when --base-url is
/// not given.
inline constexpr const char* kBaseUrlEnv = "GITHUB_API_URL";

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, const Environment& env, std::ostream& out,
        std::ostream& err);

}  // namespace botscan::cli
