#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mann::cli {

enum class Command { solve, ode, bench, validate };

const char* to_string(Command c) noexcept;

/// Exit codes shared by every command.
enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kValidationError = 2,  // bad configuration, or a hypothesis that fails
  kNotConverged = 3,     // diverged, left_domain, iteration cap, failed bench cell
  kIoError = 4,
};

struct RunConfig {
  Command command = Command::solve;
  std::string map = "paper-sec4";

  std::string theta_family = "power";
  double alpha = 1.0;
  double theta_value = 0.5;

  std::string error_family = "zero";
  double amplitude = 0.1;

  std::optional<double> x0;  // nullopt: drawn from the seeded stream
  double epsilon = 1e-6;
  std::uint64_t max_iterations = 1'000'000;
  bool projected = true;
  double classify_tol = 0.05;

  double horizon = 100.0;
  double step = 1e-3;
  std::uint64_t stride = 1;

  std::uint64_t runs = 100;
  bool paper_tables = false;
  std::vector<double> amplitudes;
  std::vector<double> alphas;
  std::vector<double> epsilons;
  unsigned threads = 0;

  std::uint64_t seed = 0;
  /// "flag", "file", "env:MANN_SEED" or "default".
  std::string seed_source = "default";

  /// Empty or "-" means standard output.
  std::string output;
};

struct ParseOutcome {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;
  /// A config or knot file could not be read.
  bool io_error = false;
  /// Set when --help was requested; holds the help text.
  std::optional<std::string> help;
};

/// Flattened key/value pairs from a config file. Sections prefix their keys
/// ("[theta] alpha = 0.6" -> "theta.alpha"), inline tables do the same
/// ("theta = {alpha = 0.6}"), and arrays become comma-separated lists.
/// Command sections ([solve], [ode], [bench], [validate]) keep their keys
/// prefixed with the command name.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Builds a validated RunConfig from command-line arguments (argv[0]
/// excluded) and an optional config file; `--config FILE` in `args` is
/// equivalent. Flags override file values. Every problem found is reported,
/// each naming the offending key or path.
ParseOutcome parse_config(const std::vector<std::string>& args,
                          const std::optional<std::filesystem::path>& file = std::nullopt,
                          const std::optional<std::string>& env_seed = std::nullopt);

/// Runs the configured command. CSV goes to `config.output` (or `out` when
/// that is empty / "-"); the human-readable summary goes to `out` when the
/// CSV went to a file and to `err` otherwise.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + execute, reading MANN_SEED from the environment.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mann::cli
