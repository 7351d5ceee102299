#include "merkki/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "merkki/analysis.hpp"
#include "merkki/engine.hpp"
#include "merkki/replay.hpp"
#include "merkki/scenario_io.hpp"

namespace merkki::cli {
namespace {

bool write_file(const std::string& path, const std::string& content, std::ostream& err) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << content) || !f.flush()) {
        err << "error: cannot write '" << path << "'\n";
        return false;
    }
    return true;
}

// Loads and parses a scenario; on failure writes diagnostics and returns the
// exit code instead.
std::optional<Scenario> load(const std::string& path, std::ostream& err, int& code) {
    try {
        return load_scenario(read_file(path));
    } catch (const ScenarioValidationError& e) {
        for (const auto& v : e.violations()) {
            err << v << '\n';
        }
        code = kValidationFailure;
    } catch (const ScenarioParseError& e) {
        err << path << ": " << e.what() << '\n';
        code = kParseFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        code = kParseFailure;
    }
    return std::nullopt;
}

std::optional<EventLog> load_log(const std::string& path, std::ostream& err) {
    try {
        return parse_log(read_file(path));
    } catch (const LogParseError& e) {
        err << path << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return std::nullopt;
}

}  // namespace

int cmd_run(const RunCommand& cmd, std::ostream& err) {
    int code = kOk;
    auto scenario = load(cmd.scenario_path, err, code);
    if (!scenario) {
        return code;
    }
    const auto seed = cmd.seed ? cmd.seed : seed_from_environment();
    EventLog log;
    try {
        log = run(*scenario, seed);
    } catch (const ResourceLimitExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    return write_file(cmd.out_path, serialize_log(log), err) ? kOk : kParseFailure;
}

int cmd_analyze(const AnalyzeCommand& cmd, std::ostream& out, std::ostream& err) {
    auto log = load_log(cmd.log_path, err);
    if (!log) {
        return kParseFailure;
    }
    Universe universe = universe_from_log(*log);
    if (cmd.scenario_path) {
        int code = kOk;
        auto scenario = load(*cmd.scenario_path, err, code);
        if (!scenario) {
            return code;
        }
        universe = merge(universe_from_scenario(*scenario), universe);
    }

    std::string text;
    try {
        switch (cmd.which) {
            case AnalysisKind::Stats:
                text = format_stats(picture_stats(*log, universe));
                break;
            case AnalysisKind::Heatmap:
                text = format_matrix(share_heatmap(*log, universe));
                break;
            case AnalysisKind::Repetition:
                text = format_repetition(repetition_index(*log));
                break;
            case AnalysisKind::Graph:
                if (!cmd.picture) {
                    err << "error: graph needs --picture\n";
                    return kParseFailure;
                }
                text = export_graph(diffusion_graph(*log, PictureId{*cmd.picture}, universe));
                break;
            case AnalysisKind::Timeline:
                if (!cmd.device) {
                    err << "error: timeline needs --device\n";
                    return kParseFailure;
                }
                text = format_timeline(collection_timeline(*log, DeviceId{*cmd.device}, universe));
                break;
        }
    } catch (const UnknownPicture& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    } catch (const UnknownDevice& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }

    if (cmd.out_path.empty()) {
        out << text;
        return kOk;
    }
    return write_file(cmd.out_path, text, err) ? kOk : kParseFailure;
}

int cmd_replay_check(const std::string& log_path, const std::string& scenario_path, std::ostream& out,
                     std::ostream& err) {
    auto log = load_log(log_path, err);
    if (!log) {
        return kParseFailure;
    }
    int code = kOk;
    auto scenario = load(scenario_path, err, code);
    if (!scenario) {
        return code;
    }
    const auto violations = replay_check(*log, *scenario);
    for (const auto& v : violations) {
        out << v << '\n';
    }
    return violations.empty() ? kOk : kInvariantViolation;
}

int cmd_validate(const std::string& scenario_path, std::ostream& out, std::ostream& err) {
    Scenario scenario;
    try {
        scenario = parse_scenario(read_file(scenario_path));
    } catch (const std::exception& e) {
        err << scenario_path << ": " << e.what() << '\n';
        return kParseFailure;
    }
    const auto violations = validate_scenario(scenario);
    for (const auto& v : violations) {
        out << v << '\n';
    }
    return violations.empty() ? kOk : kValidationFailure;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Digi Merkki fleet simulator and log analysis"};
    app.require_subcommand(1);

    RunCommand run_cmd;
    auto* run_app = app.add_subcommand("run", "Run a scenario and write its event log");
    run_app->add_option("scenario", run_cmd.scenario_path, "Scenario file")->required();
    run_app->add_option("--out", run_cmd.out_path, "Output log path")->required();
    run_app->add_option("--seed", run_cmd.seed, "Seed override (takes precedence over MERKKI_SEED)");

    AnalyzeCommand an_cmd;
    std::string which;
    auto* an_app = app.add_subcommand("analyze", "Compute an artifact from an event log");
    an_app->add_option("log", an_cmd.log_path, "Event log")->required();
    an_app->add_option("which", which, "stats | heatmap | graph | repetition | timeline")
        ->required()
        ->check(CLI::IsMember({"stats", "heatmap", "graph", "repetition", "timeline"}));
    an_app->add_option("--out", an_cmd.out_path, "Output path (default: standard output)");
    an_app->add_option("--picture", an_cmd.picture, "Picture id for graph");
    an_app->add_option("--device", an_cmd.device, "Device id for timeline");
    an_app->add_option("--scenario", an_cmd.scenario_path, "Scenario defining the full device/picture universe");

    std::string rc_log;
    std::string rc_scenario;
    auto* rc_app = app.add_subcommand("replay-check", "Check a log against its scenario's invariants");
    rc_app->add_option("log", rc_log, "Event log")->required();
    rc_app->add_option("scenario", rc_scenario, "Scenario file")->required();

    std::string val_scenario;
    auto* val_app = app.add_subcommand("validate", "Validate a scenario file");
    val_app->add_option("scenario", val_scenario, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParseFailure;
    }

    if (run_app->parsed()) {
        return cmd_run(run_cmd, std::cerr);
    }
    if (an_app->parsed()) {
        static const std::map<std::string, AnalysisKind> kinds{{"stats", AnalysisKind::Stats},
                                                               {"heatmap", AnalysisKind::Heatmap},
                                                               {"graph", AnalysisKind::Graph},
                                                               {"repetition", AnalysisKind::Repetition},
                                                               {"timeline", AnalysisKind::Timeline}};
        an_cmd.which = kinds.at(which);
        return cmd_analyze(an_cmd, std::cout, std::cerr);
    }
    if (rc_app->parsed()) {
        return cmd_replay_check(rc_log, rc_scenario, std::cout, std::cerr);
    }
    return cmd_validate(val_scenario, std::cout, std::cerr);
}

}  // namespace merkki::cli
