#pragma once

#include "cmms/solver.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cmms::cli {

enum class Mode { uda, sda_homo, sda_hetero, ablate, selftest };

std::string to_string(Mode mode);

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kUsage = 2,
    kConfig = 3,
    kData = 4,       // file I/O or invalid input data
    kSolver = 5,
    kSelftestFailed = 6,
};

struct RunConfig {
    Mode mode = Mode::uda;
    std::filesystem::path source;
    std::filesystem::path source_labels;
    std::filesystem::path target;
    std::filesystem::path target_labels;  // optional for uda and ablate
    Hyperparams hyper;
    bool zscore = true;
    std::optional<int> pca;               // output dimension
    int per_class = 3;                    // labeled target samples per class
    std::uint64_t seed = 0;
    std::filesystem::path out = "cmms-out";
    std::string task;                     // defaults to "<source>-><target>"
    std::string init = "ridge";           // ridge or centroid
    std::vector<Variant> variants;        // ablate; empty means all
    std::optional<std::filesystem::path> benchmark_data;  // selftest
    std::optional<std::filesystem::path> config_file;

    /// Throws ConfigError when paths required by the mode are missing or a
    /// value is out of range.
    void validate() const;
};

/// Resolved settings as JSON, echoed into every report.
nlohmann::json to_json(const RunConfig& config);

/// Applies the keys of a config document on top of `config`. Unknown keys
/// and wrongly typed values raise ConfigError.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

struct ParseResult {
    std::optional<RunConfig> config;  // set when a run should happen
    int exit_code = kOk;              // meaningful when config is empty
};

/// Parses argv-style arguments (without the program name). Help and usage
/// errors are written to `out` / `err` and reported through exit_code.
/// Precedence is command-line flags, then --config file, then defaults.
ParseResult parse_config(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs one configuration, writing reports under config.out and the summary
/// table to `out`. Returns an exit code; diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Entry point used by the executable.
int main_entry(int argc, char** argv);

}  // namespace cmms::cli
