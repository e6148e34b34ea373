#pragma once

#include <optional>
#include <string>

#include "tctank/designer.hpp"
#include "tctank/impedance.hpp"
#include "tctank/metrics.hpp"
#include "tctank/tank.hpp"

namespace tctank {

enum class Command { analyze, modes, sweep, design, fom };
enum class OutputFormat { csv, json };

struct OutputSpec {
    std::string path;                    // empty: artifact goes to stdout
    std::optional<OutputFormat> format;  // default depends on the command
};

struct RunConfig {
    std::optional<Command> command;
    std::optional<TankParams> tank;
    std::optional<FrequencyGrid> grid;
    std::optional<SweepMethod> method;   // analyze evaluation path
    std::optional<SweepSpec> sweep;
    std::optional<DesignSpec> design;
    std::optional<OscMetricsInput> fom;
    OutputSpec output;
    long long seed = 0;  // accepted for config stability; everything here is
                         // deterministic and never consumes it
};

// Strict JSON parse: unknown keys are errors naming the key and the line it
// first appears on. Numeric unit-bearing fields accept engineering-notation
// strings ("300p", "24G").
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text,
                       const std::string& source_name);

// Canonical JSON for the loaded configuration; round-trips through
// parse_config.
std::string config_to_json_string(const RunConfig& c);

// Executes one command end to end: computes the artifact, writes it to the
// output path (atomically: temp file + rename) or stdout, prints a one-line
// summary, and returns the process exit status:
//   0 success, 2 config/validation error, 3 no feasible design,
//   4 numerical failure.
int run(const RunConfig& c);

} // namespace tctank
