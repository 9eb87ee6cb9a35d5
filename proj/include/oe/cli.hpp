#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "oe/harness.hpp"

namespace oe::cli {

enum class Verb { Run, Sweep, Table1, Validate };

struct Command {
    Verb verb = Verb::Run;
    ExperimentConfig config;
    // validate only
    double lambda = 3.0;
    std::size_t coverage_samples = 10000;
    std::size_t random_beliefs = 100;
};

/// Bad flag, missing field or out-of-range value. The message names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

/// Default parameter of each algorithm when --param is absent.
double default_param(Algorithm kind);

/// Parses `args` (without the program name). Precedence: defaults, then the
/// key=value file named by --config, then flags. Throws ConfigError.
Command parse_config(const std::vector<std::string>& args);

/// Effective configuration as one `key=value ...` line.
std::string describe(const Command& command);

/// Runs the command. Reports go to `out`, diagnostics to `err`.
int execute(const Command& command, std::ostream& out, std::ostream& err);

/// parse_config + execute with exit codes 0 / 1 (experiment failure) / 2 (config error).
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The five algorithms at their best no-prior parameters, in report order.
std::vector<ExperimentConfig> table1_configs(const ExperimentConfig& base);

}  // namespace oe::cli
