#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace filminfo {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitUnphysical = 4,
};

struct CommandOptions {
  std::string config_path;
  std::string out_dir;  ///< overrides output.dir when non-empty
  bool svg = false;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  std::string input;  ///< fit commands: existing sweep CSV
};

/// Dispatches params | sweep-volume | sweep-area | mi-map | reconstruct |
/// fit-calabrese | fit-area. Library errors are mapped to exit codes and
/// reported on `err`.
int run_command(const std::string& name, const CommandOptions& options, std::ostream& out,
                std::ostream& err);

}  // namespace filminfo
