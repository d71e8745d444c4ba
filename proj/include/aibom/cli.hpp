#pragma once

// Command-line front end. run_cli() is the whole program minus process
// setup, so tests drive it in-process with captured streams.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aibom {

class HttpTransport;

inline constexpr std::string_view kToolName = "AIBOM Generator";
inline constexpr std::string_view kToolVendor = "SACRO";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Exit codes shared by every command.
enum ExitCode : int { kExitClean = 0, kExitFinding = 1, kExitError = 2 };

struct CliEnvironment {
  /// Environment lookup; defaults to std::getenv. Reads NVD_API_KEY,
  /// AIBOM_KEY_PASSPHRASE, AIBOM_OSV_URL and AIBOM_NVD_URL.
  std::function<std::optional<std::string>(std::string_view)> getenv;
  /// Transport for live vulnerability sources; defaults to HTTPS.
  HttpTransport* transport = nullptr;
  /// Current time as RFC 3339; defaults to the system clock.
  std::function<std::string()> now;
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliEnvironment& env = {});

}  // namespace aibom
