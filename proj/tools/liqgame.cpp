#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "liqgame/document.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidInput = 1;
constexpr int kExitNoEquilibrium = 2;
constexpr int kExitTooLarge = 3;

std::string read_input(const std::string& path) {
    std::ostringstream buffer;
    if (path == "-") {
        buffer << std::cin.rdbuf();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open '" + path + "'");
        buffer << in.rdbuf();
    }
    return buffer.str();
}

void emit(const liqgame::Report& report, bool as_json) {
    for (const std::string& note : report.stderr_notes) std::cerr << note << "\n";
    std::cout << (as_json ? report.json : report.table);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact solver for the liquidity-event game played by convertible "
                 "instrument (SAFE) holders"};
    app.require_subcommand(1);

    std::string input;
    bool as_json = false;
    bool as_table = false;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("input", input, "GameDocument JSON file, or - for standard input")
            ->required();
        cmd->add_flag("--json", as_json, "emit the machine-readable JSON report");
        cmd->add_flag("--table", as_table, "emit the aligned text table (default)");
    };

    CLI::App* validate =
        app.add_subcommand("validate", "Check a game or portfolio for well-definedness");
    add_common(validate);

    CLI::App* solve = app.add_subcommand("solve", "Compute and classify pure Nash equilibria");
    add_common(solve);
    bool force_brute = false;
    std::size_t max_brute = 20;
    long long expand_cap = -1;
    bool fail_on_empty = false;
    solve->add_flag("--brute-force", force_brute,
                    "enumerate all profiles instead of the analytic paths");
    solve->add_option("--max-brute", max_brute,
                      "player limit for exhaustive enumeration (default 20)");
    solve->add_option("--expand-families", expand_cap,
                      "list family members explicitly, refusing beyond CAP members "
                      "(suggested cap 4096)");
    solve->add_flag("--fail-on-empty", fail_on_empty,
                    "exit with status 2 when no equilibrium exists");

    CLI::App* matrix =
        app.add_subcommand("matrix", "Print every profile's payout vector (up to 12 players)");
    add_common(matrix);

    CLI11_PARSE(app, argc, argv);

    try {
        liqgame::GameDocument doc = liqgame::parse_game_document(read_input(input));
        if (validate->parsed()) {
            liqgame::Report report = liqgame::validate_report(doc);
            emit(report, as_json);
            return report.valid ? kExitOk : kExitInvalidInput;
        }
        if (solve->parsed()) {
            liqgame::ReportOptions options;
            options.force_brute_force = force_brute;
            options.brute_force_limit = max_brute;
            if (expand_cap >= 0) options.expand_families_cap = static_cast<std::size_t>(expand_cap);
            liqgame::Report report = liqgame::solve_report(doc, options);
            emit(report, as_json);
            if (fail_on_empty && !report.equilibrium_exists) return kExitNoEquilibrium;
            return kExitOk;
        }
        liqgame::Report report = liqgame::matrix_report(doc);
        emit(report, as_json);
        return kExitOk;
    } catch (const liqgame::SizeLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTooLarge;
    } catch (const liqgame::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidInput;
    }
}
