#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liqgame/contracts.hpp"
#include "liqgame/game.hpp"
#include "liqgame/solver.hpp"

namespace liqgame {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Portfolio {
    std::vector<SafeContract> safes;
    CompanyContext context;
};

// The on-disk input: a JSON object holding exactly one of `game` (explicit
// model parameters) or `portfolio` (SAFE contracts plus company context).
// All numerics are strings ("29", "13.5", "11/2"); plain JSON integers are
// accepted too, but floats are rejected to keep the pipeline exact.
struct GameDocument {
    std::string schema_version = "1";
    std::optional<LiquidityGame> game;
    std::optional<Portfolio> portfolio;
};

GameDocument parse_game_document(const std::string& text);
std::string serialize_game_document(const GameDocument& doc);

struct ReportOptions {
    bool force_brute_force = false;
    std::size_t brute_force_limit = 20;
    std::optional<std::size_t> expand_families_cap;
};

// A rendered report. `json` is byte-deterministic for a given input;
// `table` is the aligned-text rendering of the same content.
struct Report {
    std::string json;
    std::string table;
    bool valid = true;
    bool equilibrium_exists = true;
    std::vector<std::string> stderr_notes;
};

// Validation only; never throws on a merely-invalid game (the report says).
Report validate_report(const GameDocument& doc);

// Classify-and-solve (or the mixed engine for mixed portfolios). Throws
// std::invalid_argument for games that fail validation and SizeLimitError
// for enumerations beyond the configured limits.
Report solve_report(const GameDocument& doc, const ReportOptions& options = {});

// Every profile's payout vector in cashout-mask order.
Report matrix_report(const GameDocument& doc, std::size_t max_players = 12);

}  // namespace liqgame
