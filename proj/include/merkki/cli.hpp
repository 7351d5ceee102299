#pragma once

// Command implementations behind the `merkki` executable. Each returns the
// process exit code and writes diagnostics to `err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace merkki::cli {

enum ExitCode : int {
    kOk = 0,
    kParseFailure = 1,
    kValidationFailure = 2,
    kInvariantViolation = 3,
};

struct RunCommand {
    std::string scenario_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;  // wins over MERKKI_SEED
};

int cmd_run(const RunCommand& cmd, std::ostream& err);

enum class AnalysisKind { Stats, Heatmap, Graph, Repetition, Timeline };

struct AnalyzeCommand {
    std::string log_path;
    AnalysisKind which = AnalysisKind::Stats;
    // Empty writes to `out` instead of a file.
    std::string out_path;
    std::optional<std::uint32_t> picture;  // graph
    std::optional<std::uint32_t> device;   // timeline
    // Widens the universe to every scenario device and picture.
    std::optional<std::string> scenario_path;
};

int cmd_analyze(const AnalyzeCommand& cmd, std::ostream& out, std::ostream& err);

// Violations go to `out`, one per line.
int cmd_replay_check(const std::string& log_path, const std::string& scenario_path, std::ostream& out,
                     std::ostream& err);

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace merkki::cli
