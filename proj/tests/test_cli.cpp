#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "merkki/analysis.hpp"
#include "merkki/cli.hpp"
#include "merkki/engine.hpp"
#include "merkki/scenario_io.hpp"
#include "support.hpp"

using namespace merkki;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("merkki_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

int run_argv(std::vector<std::string> args) {
    args.insert(args.begin(), "merkki");
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("run writes the log and is repeatable") {
    TempDir tmp;
    const auto scn = testing::scenario_path("challenges.scn");
    std::ostringstream err;
    CHECK(cli::cmd_run({scn, tmp.file("a.log"), std::nullopt}, err) == 0);
    CHECK(cli::cmd_run({scn, tmp.file("b.log"), std::nullopt}, err) == 0);
    const auto a = read_file(tmp.file("a.log"));
    CHECK_FALSE(a.empty());
    CHECK(a == read_file(tmp.file("b.log")));
    CHECK(a == serialize_log(run(load_scenario(read_file(scn)))));

    CHECK(cli::cmd_run({scn, tmp.file("c.log"), 999}, err) == 0);
    CHECK(read_file(tmp.file("c.log")) == serialize_log(run(load_scenario(read_file(scn)), 999)));
    CHECK(err.str().empty());
}

TEST_CASE("seed flag beats the environment") {
    TempDir tmp;
    const auto scn = testing::scenario_path("challenges.scn");
    const auto scenario = load_scenario(read_file(scn));
    std::ostringstream err;
    ::setenv("MERKKI_SEED", "31", 1);
    CHECK(cli::cmd_run({scn, tmp.file("env.log"), std::nullopt}, err) == 0);
    CHECK(cli::cmd_run({scn, tmp.file("flag.log"), 32}, err) == 0);
    ::unsetenv("MERKKI_SEED");
    CHECK(read_file(tmp.file("env.log")) == serialize_log(run(scenario, 31)));
    CHECK(read_file(tmp.file("flag.log")) == serialize_log(run(scenario, 32)));
}

TEST_CASE("run refuses invalid scenarios") {
    TempDir tmp;
    write(tmp.file("dup.scn"), "[devices]\n1 = group=a\n1 = group=b\n");
    std::ostringstream err;
    CHECK(cli::cmd_run({tmp.file("dup.scn"), tmp.file("x.log"), std::nullopt}, err) == 2);
    CHECK(err.str().find("duplicate DeviceId 1") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp.file("x.log")));

    write(tmp.file("bad.scn"), "[devices\n");
    CHECK(cli::cmd_run({tmp.file("bad.scn"), tmp.file("x.log"), std::nullopt}, err) == 1);
    CHECK(cli::cmd_run({tmp.file("missing.scn"), tmp.file("x.log"), std::nullopt}, err) == 1);
}

TEST_CASE("analyze output equals the library") {
    TempDir tmp;
    const auto scn = testing::scenario_path("reference.scn");
    std::ostringstream err;
    REQUIRE(cli::cmd_run({scn, tmp.file("ref.log"), std::nullopt}, err) == 0);
    const auto log = parse_log(read_file(tmp.file("ref.log")));

    std::ostringstream out;
    CHECK(cli::cmd_analyze({tmp.file("ref.log"), cli::AnalysisKind::Stats, tmp.file("stats.txt")}, out, err) == 0);
    const auto stats = read_file(tmp.file("stats.txt"));
    CHECK(stats == format_stats(picture_stats(log)));
    CHECK(stats.find("33: 0, 0\n") != std::string::npos);
    CHECK(stats.find("38: 0, 0\n") != std::string::npos);

    CHECK(cli::cmd_analyze({tmp.file("ref.log"), cli::AnalysisKind::Heatmap, ""}, out, err) == 0);
    CHECK(out.str() == format_matrix(share_heatmap(log)));

    cli::AnalyzeCommand graph{tmp.file("ref.log"), cli::AnalysisKind::Graph, tmp.file("g.dot"), 30u};
    CHECK(cli::cmd_analyze(graph, out, err) == 0);
    CHECK(read_file(tmp.file("g.dot")) == export_graph(diffusion_graph(log, PictureId{30})));

    cli::AnalyzeCommand rep{tmp.file("ref.log"), cli::AnalysisKind::Repetition, tmp.file("rep.tsv")};
    CHECK(cli::cmd_analyze(rep, out, err) == 0);
    CHECK(read_file(tmp.file("rep.tsv")) == format_repetition(repetition_index(log)));

    cli::AnalyzeCommand tl{tmp.file("ref.log"), cli::AnalysisKind::Timeline, tmp.file("tl.tsv"), std::nullopt, 14u};
    CHECK(cli::cmd_analyze(tl, out, err) == 0);
    CHECK(read_file(tmp.file("tl.tsv")) == format_timeline(collection_timeline(log, DeviceId{14})));

    cli::AnalyzeCommand unknown{tmp.file("ref.log"), cli::AnalysisKind::Graph, tmp.file("u.dot"), 999u};
    CHECK(cli::cmd_analyze(unknown, out, err) == 2);
    CHECK_FALSE(fs::exists(tmp.file("u.dot")));
}

TEST_CASE("analyze on an empty log") {
    TempDir tmp;
    write(tmp.file("empty.log"), "");
    std::ostringstream out;
    std::ostringstream err;
    cli::AnalyzeCommand cmd{tmp.file("empty.log"), cli::AnalysisKind::Heatmap, tmp.file("h.tsv")};
    cmd.scenario_path = testing::scenario_path("challenges.scn");
    CHECK(cli::cmd_analyze(cmd, out, err) == 0);
    const auto text = read_file(tmp.file("h.tsv"));
    CHECK(text.rfind("sender\t1\t2\t3\t4\t5\t6\t7\t8\n", 0) == 0);
    CHECK(text.find("1\t0\t0\t0\t0\t0\t0\t0\t0\n") != std::string::npos);

    write(tmp.file("bad.log"), "0.000\t1\tNOPE\n");
    CHECK(cli::cmd_analyze({tmp.file("bad.log"), cli::AnalysisKind::Stats, ""}, out, err) == 1);
    CHECK(err.str().find("line 1") != std::string::npos);
}

TEST_CASE("replay-check exit codes") {
    TempDir tmp;
    const auto scn = testing::scenario_path("interception.scn");
    std::ostringstream out;
    std::ostringstream err;
    REQUIRE(cli::cmd_run({scn, tmp.file("i.log"), std::nullopt}, err) == 0);
    CHECK(cli::cmd_replay_check(tmp.file("i.log"), scn, out, err) == 0);
    CHECK(out.str().empty());

    // Move the first trade to just after the partners started searching.
    auto log = parse_log(read_file(tmp.file("i.log")));
    std::size_t first = 0;
    while (log[first].kind != EventKind::Exchange) {
        ++first;
    }
    const auto when = log[first].time;
    SimTime since{};
    for (std::size_t i = 0; i < first; ++i) {
        if (log[i].kind == EventKind::SearchStart) {
            since = std::max(since, log[i].time);
        }
    }
    for (auto& r : log) {
        if (r.kind == EventKind::Exchange && r.time == when) {
            r.time = since + SimTime::from_ms(1000);
        }
    }
    sort_log(log);
    write(tmp.file("tampered.log"), serialize_log(log));
    std::ostringstream tampered;
    CHECK(cli::cmd_replay_check(tmp.file("tampered.log"), scn, tampered, err) == 3);
    CHECK(tampered.str().find("hold-time violated") != std::string::npos);

    write(tmp.file("solo.scn"), "[devices]\n1 = group=a pictures=1,2,3\n[pictures]\n1 = owner=1\n2 = owner=1\n3 = owner=1\n");
    std::ostringstream mismatch;
    CHECK(cli::cmd_replay_check(tmp.file("i.log"), tmp.file("solo.scn"), mismatch, err) == 3);
    CHECK(mismatch.str().find("unknown device") != std::string::npos);
}

TEST_CASE("validate") {
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cli::cmd_validate(testing::scenario_path("reference.scn"), out, err) == 0);
    TempDir tmp;
    write(tmp.file("u.scn"), "[devices]\n1 = group=a\n[pictures]\n7 = owner=\n");
    CHECK(cli::cmd_validate(tmp.file("u.scn"), out, err) == 1);
    write(tmp.file("v.scn"), "[devices]\n1 = group=a\n[pictures]\n7 = owner=1\n");
    CHECK(cli::cmd_validate(tmp.file("v.scn"), out, err) == 2);
    CHECK(out.str().find("picture 7 missing from owner 1's initial collection") != std::string::npos);
}

TEST_CASE("argument parsing") {
    TempDir tmp;
    CHECK(run_argv({"validate", testing::scenario_path("friends.scn")}) == 0);
    CHECK(run_argv({"run", testing::scenario_path("friends.scn"), "--out", tmp.file("f.log"), "--seed", "3"}) == 0);
    CHECK(run_argv({"analyze", tmp.file("f.log"), "stats", "--out", tmp.file("s.txt")}) == 0);
    CHECK(run_argv({"analyze", tmp.file("f.log"), "graph", "--picture", "1", "--out", tmp.file("g.dot")}) == 0);
    CHECK(run_argv({"replay-check", tmp.file("f.log"), testing::scenario_path("friends.scn")}) == 0);
    CHECK(run_argv({"analyze", tmp.file("f.log"), "nonsense"}) == 1);
    CHECK(run_argv({"run", testing::scenario_path("friends.scn")}) == 1);
    CHECK(run_argv({}) == 1);
    CHECK(run_argv({"--help"}) == 0);
}
