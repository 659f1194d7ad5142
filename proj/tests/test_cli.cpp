#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

// End-to-end runs of the installed binary; LIQGAME_CLI_PATH is injected by
// the build so the tests always exercise the freshly built tool.

namespace {

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_path = "cli_out_" + std::to_string(counter++) + ".txt";
    std::string command = std::string(LIQGAME_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
    int status = std::system(command.c_str());
    RunResult result{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out_path)};
    std::remove(out_path.c_str());
    return result;
}

std::string write_doc(const std::string& name, const std::string& text) {
    std::string path = std::string("cli_") + name + ".json";
    std::ofstream out(path, std::ios::binary);
    out << text;
    return path;
}

const char* kPostPairDoc = R"({
  "game": {
    "V": "6", "beta": "1",
    "players": [
      {"id": "1", "p": "2", "alpha": "0", "gamma": "5"},
      {"id": "2", "p": "2", "alpha": "0", "gamma": "5"}
    ]
  }
})";

const char* kNoEquilibriumDoc = R"({
  "game": {
    "V": "29", "beta": "1",
    "players": [
      {"id": "1", "p": "10", "alpha": "1", "gamma": "6"},
      {"id": "2", "p": "16", "alpha": "3", "gamma": "5"}
    ]
  }
})";

const char* kBadDoc = R"({
  "game": {
    "V": "10", "beta": "1",
    "players": [{"id": "a", "p": "9", "alpha": "0", "gamma": "5"},
                 {"id": "b", "p": "9", "alpha": "0", "gamma": "5"}]
  }
})";

}  // namespace

TEST_CASE("solve subcommand emits deterministic JSON and exit codes") {
    std::string path = write_doc("postpair", kPostPairDoc);

    RunResult first = run_cli("solve " + path + " --json");
    CHECK(first.exit_code == 0);
    nlohmann::json out = nlohmann::json::parse(first.stdout_text);
    CHECK(out["exists"] == true);
    CHECK(out["method"] == "post-money");
    CHECK(out["equilibria"].size() == 2);

    RunResult second = run_cli("solve " + path + " --json");
    CHECK(second.stdout_text == first.stdout_text);

    RunResult table = run_cli("solve " + path);
    CHECK(table.exit_code == 0);
    CHECK(table.stdout_text.find("{1,2}") != std::string::npos);
    CHECK(table.stdout_text.find("12/5") != std::string::npos);

    std::remove(path.c_str());
}

TEST_CASE("fail-on-empty reports missing equilibria through the exit code") {
    std::string path = write_doc("cycle", kNoEquilibriumDoc);
    CHECK(run_cli("solve " + path + " --json").exit_code == 0);
    RunResult strict = run_cli("solve " + path + " --json --fail-on-empty");
    CHECK(strict.exit_code == 2);
    nlohmann::json out = nlohmann::json::parse(strict.stdout_text);
    CHECK(out["exists"] == false);
    CHECK(out["diagnostics"][0].get<std::string>().find("2:Cash -> 1:Convert") !=
          std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("validate subcommand exit status tracks validity") {
    std::string good = write_doc("good", kPostPairDoc);
    std::string bad = write_doc("bad", kBadDoc);
    CHECK(run_cli("validate " + good).exit_code == 0);
    CHECK(run_cli("validate " + bad).exit_code == 1);
    CHECK(run_cli("validate does_not_exist.json").exit_code == 1);
    std::remove(good.c_str());
    std::remove(bad.c_str());
}

TEST_CASE("matrix subcommand reads standard input and enforces the cap") {
    std::string path = write_doc("matrix", kPostPairDoc);
    RunResult piped = run_cli("matrix - --json < " + path);
    CHECK(piped.exit_code == 0);
    nlohmann::json out = nlohmann::json::parse(piped.stdout_text);
    CHECK(out["profiles"].size() == 4);
    CHECK(out["profiles"][0]["payouts"]["1"]["exact"] == "12/5");
    std::remove(path.c_str());

    std::ostringstream big;
    big << R"({"game": {"V": "1000", "beta": "1", "players": [)";
    for (int i = 0; i < 13; ++i)
        big << (i ? "," : "") << R"({"id": ")" << i << R"(", "p": "1", "alpha": "1", "gamma": "99"})";
    big << "]}}";
    std::string big_path = write_doc("big", big.str());
    CHECK(run_cli("matrix " + big_path).exit_code == 3);
    std::remove(big_path.c_str());
}

TEST_CASE("malformed json exits with the invalid-input status") {
    std::string path = write_doc("broken", "{ not json");
    CHECK(run_cli("solve " + path).exit_code == 1);
    std::remove(path.c_str());
}
