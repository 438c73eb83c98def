#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace starkqfi::cli {

using nlohmann::json;

enum ExitCode : int {
  exit_ok = 0,
  exit_unexpected = 1,
  exit_config = 2,
  exit_numerical = 3,
  exit_dimension_cap = 4,
};

/// Invalid or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line flags that override the config document.
struct Overrides {
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::optional<double> horizon;
  std::optional<double> window;
  bool strict = false;
  bool dense_oracle = false;
};

const std::vector<std::string>& command_names();

/// Default config of a command. Throws ConfigError for unknown commands.
json default_config(const std::string& command);

/// Defaults merged with `user` and the flag overrides. Keys absent from the
/// defaults are rejected with ConfigError.
json resolve_config(const std::string& command, const json& user, const Overrides& overrides);

/// Runs one command on a resolved config, writing its files under
/// config["out"]. Returns the JSON summary (also written as summary.json).
/// Exceptions propagate; see run() for the exit-code mapping.
json execute(const std::string& command, const json& config, std::ostream& log);

/// Resolves, prints and executes; maps failures to exit codes. With
/// `strict`, any failed cell turns a completed run into exit_numerical.
int run(const std::string& command, const json& user, const Overrides& overrides, std::ostream& log,
        std::ostream& err);

/// Entry point used by the executable.
int main(int argc, char** argv);

}  // namespace starkqfi::cli
