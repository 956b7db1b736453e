#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "bcp/corpus.hpp"
#include "bcp/machine.hpp"
#include "bcp/text.hpp"

using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::filesystem::path scratch_dir() {
    static std::filesystem::path dir = [] {
        auto d = std::filesystem::temp_directory_path() /
                 ("bcp_cli_test_" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string scratch(const std::string& name) { return (scratch_dir() / name).string(); }

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_path = scratch("stdout" + std::to_string(counter));
    std::string err_path = scratch("stderr" + std::to_string(counter));
    ++counter;
    std::string cmd =
        std::string(BCP_CLI_PATH) + " " + args + " > " + out_path + " 2> " + err_path;
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), bcp::read_file(out_path), bcp::read_file(err_path)};
}

std::vector<json> json_lines(const std::string& text) {
    std::vector<json> out;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string line = text.substr(start, nl == std::string::npos ? nl : nl - start);
        if (!line.empty()) out.push_back(json::parse(line));
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return out;
}

std::string corpus_file(const std::string& name) {
    return bcp::corpus_directory() + "/" + name;
}

} // namespace

TEST_CASE("version and usage errors") {
    RunResult v = run_cli("--version");
    CHECK(v.exit_code == 0);
    CHECK(v.out.find("bcp") != std::string::npos);

    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("verify").exit_code == 2);  // missing file and --inputs
    CHECK(run_cli("simulate " + corpus_file("majority.bcp")).exit_code == 2);
}

TEST_CASE("validate reports cleanly on corpus files") {
    RunResult r = run_cli("validate " + corpus_file("power2.bcp"));
    CHECK(r.exit_code == 0);
    std::vector<json> lines = json_lines(r.out);
    REQUIRE(!lines.empty());
    CHECK(lines.back()["protocol"] == "power2");
    CHECK(lines.back()["ok"] == true);

    CHECK(run_cli("validate " + corpus_file("cm-geq.cm")).exit_code == 0);
}

TEST_CASE("validate rejects malformed input with exit 2") {
    std::string path = scratch("broken.bcp");
    bcp::write_file(path, "protocol broken\nstates: a b\nrv: a b -> c d\n");
    RunResult r = run_cli("validate " + path);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("verify passes the right oracle and fails the wrong one") {
    std::string file = corpus_file("power2.bcp");
    RunResult good = run_cli("verify " + file + " --mode computes --builtin power2 --inputs 2..6");
    CHECK(good.exit_code == 0);
    std::vector<json> lines = json_lines(good.out);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0]["input"] == json::array({2}));
    for (const json& line : lines) CHECK(line["ok"] == true);

    RunResult bad = run_cli("verify " + file + " --builtin majority --inputs 2..4");
    CHECK(bad.exit_code == 1);
    bool witnessed = false;
    for (const json& line : json_lines(bad.out)) {
        if (line["ok"] == false && line.contains("witness")) witnessed = true;
    }
    CHECK(witnessed);
}

TEST_CASE("verify exit code 3 when the node budget is too small") {
    RunResult r =
        run_cli("--budget 3 verify " + corpus_file("power2.bcp") + " --builtin power2 --inputs 8");
    CHECK(r.exit_code == 3);
}

TEST_CASE("simulate writes a replayable deterministic trace") {
    std::string file = corpus_file("majority.bcp");
    std::string trace1 = scratch("run1.trace");
    std::string trace2 = scratch("run2.trace");
    std::string flags = " --input 1,2 --seed 7 --trace ";
    RunResult r1 = run_cli("simulate " + file + flags + trace1);
    RunResult r2 = run_cli("simulate " + file + flags + trace2);
    CHECK(r1.exit_code == 0);

    std::vector<json> lines = json_lines(r1.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["consensus"] == 1);
    std::string verdict = lines[0]["verdict"];
    CHECK((verdict == "terminal" || verdict == "stabilized"));

    // Same seed, same bytes: summary and full trace.
    CHECK(r1.out == r2.out);
    CHECK(bcp::read_file(trace1) == bcp::read_file(trace2));
    CHECK(!bcp::read_file(trace1).empty());
}

TEST_CASE("cm subcommands explore, check, and bound") {
    std::string geq = corpus_file("cm-geq.cm");

    RunResult run = run_cli("cm run " + geq + " --inputs \"(2,1)\"");
    CHECK(run.exit_code == 0);
    std::vector<json> lines = json_lines(run.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["configs"] == 4);
    CHECK(lines[0]["accepts"] == true);
    CHECK(lines[0]["rejects"] == false);

    CHECK(run_cli("cm check " + geq + " --builtin geq --inputs \"(0,0)..(2,2)\"").exit_code == 0);
    CHECK(run_cli("cm check " + geq + " --builtin lt --inputs \"(0,0)..(2,2)\"").exit_code == 1);

    RunResult bound = run_cli("cm bound " + geq + " --inputs \"(2,1)..(3,2)\"");
    CHECK(bound.exit_code == 0);
    for (const json& line : json_lines(bound.out)) {
        CHECK(line["bound"] == "poly 1");
        CHECK(line["ok"] == true);
    }
}

TEST_CASE("bound rewrites chain through files") {
    std::string weak_path = scratch("geq-weak.cm");
    std::string tight_path = scratch("geq-tight.cm");

    RunResult w = run_cli("bound weaken " + corpus_file("cm-geq.cm") + " -o " + weak_path);
    CHECK(w.exit_code == 0);
    CHECK(json_lines(w.out).at(0)["bound"] == "weak-n");
    bcp::CounterMachine weak = bcp::load_machine_file(weak_path);
    REQUIRE(weak.bound.has_value());
    CHECK(weak.bound->cls == bcp::BoundClass::WeakN);

    RunResult t = run_cli("bound tighten " + weak_path + " -o " + tight_path);
    CHECK(t.exit_code == 0);
    CHECK(json_lines(t.out).at(0)["bound"] == "n");
    CHECK(run_cli("cm check " + tight_path + " --builtin geq --inputs \"(0,0)..(2,2)\"")
              .exit_code == 0);
}

TEST_CASE("compile produces a verified protocol file") {
    std::string out = scratch("geq.bcp");
    RunResult r = run_cli("compile " + corpus_file("cm-geq.cm") + " --neg " +
                          corpus_file("cm-lt.cm") + " -o " + out +
                          " --verify --builtin geq --inputs \"(0,0)..(2,2)\"");
    CHECK(r.exit_code == 0);
    std::vector<json> lines = json_lines(r.out);
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0]["output"] == out);

    bool skipped = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].contains("skipped")) {
            skipped = true;
        } else {
            CHECK(lines[i]["ok"] == true);
            CHECK(lines[i]["mode"] == "silent");
        }
    }
    CHECK(skipped);  // (0,0) is a one-agent population for this one-leader protocol

    // The written file is a loadable protocol that still verifies.
    CHECK(run_cli("verify " + out + " --mode silent --builtin geq --inputs \"(2,1)\"")
              .exit_code == 0);
}

TEST_CASE("transform writes a protocol that keeps its verdicts") {
    std::string out = scratch("power2-sb.bcp");
    RunResult r =
        run_cli("transform " + corpus_file("power2.bcp") + " --single-broadcaster -o " + out);
    CHECK(r.exit_code == 0);
    std::vector<json> lines = json_lines(r.out);
    REQUIRE(lines.size() == 1);
    CHECK(lines[0]["leaders"] == 1);

    CHECK(run_cli("verify " + out + " --builtin power2 --inputs 2..4").exit_code == 0);
    CHECK(run_cli("transform " + corpus_file("power2.bcp") + " -o " + out).exit_code == 2);
}

TEST_CASE("check-reset passes the resetter and pins down power2") {
    RunResult ok = run_cli("check-reset " + corpus_file("universal-reset.bcp") + " --inputs 2..4");
    CHECK(ok.exit_code == 0);
    CHECK(json_lines(ok.out).back()["ok"] == true);

    RunResult bad = run_cli("check-reset " + corpus_file("power2.bcp") + " --inputs 2");
    CHECK(bad.exit_code == 1);
    std::vector<json> lines = json_lines(bad.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0]["input"] == json::array({2}));
    CHECK(lines[0]["path"].empty());  // offends straight from the initial configuration
    CHECK(lines[1]["ok"] == false);
}

TEST_CASE("reports are byte-identical across runs and job counts") {
    std::string file = corpus_file("majority.bcp");
    std::string args = "verify " + file + " --mode silent --builtin majority --inputs "
                       "\"(1,1)..(3,3)\" --report ";
    std::string r1 = scratch("report1.jsonl");
    std::string r2 = scratch("report2.jsonl");
    std::string r3 = scratch("report3.jsonl");
    CHECK(run_cli(args + r1).exit_code == 0);
    CHECK(run_cli(args + r2).exit_code == 0);
    CHECK(run_cli("--jobs 3 " + args + r3).exit_code == 0);

    std::string bytes = bcp::read_file(r1);
    CHECK(!bytes.empty());
    CHECK(bytes == bcp::read_file(r2));
    CHECK(bytes == bcp::read_file(r3));
}
