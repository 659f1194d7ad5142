#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "liqgame/game.hpp"

namespace liqgame {

// Thrown when an enumeration would exceed a configured player or member cap.
class SizeLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Classification drives the solve dispatch; the first matching tag wins.
enum class GameClass {
    all_cashout,       // value < total principal: everyone cashing out is forced
    pre_money,         // value >= total principal and principal == gamma*alpha throughout
    post_money,        // alpha == 0 throughout
    general_solvable,  // gamma*alpha <= principal throughout
    general,
};

const char* to_string(GameClass c);

enum class SolveMethod {
    all_cashout_rule,
    interval_scan,
    post_money,
    threshold,
    brute_force,
};

const char* to_string(SolveMethod m);

// A bundle of equilibria: every base + subset-of-free-players combination is
// an equilibrium, and all of them pay out identically. member_count is kept
// exact because 2^|free| outgrows machine integers quickly.
struct EquilibriumFamily {
    StrategyProfile base;
    std::vector<std::size_t> free_players;
    Rational member_count;
};

struct EquilibriumReport {
    bool exists = false;
    GameClass game_class = GameClass::general;
    SolveMethod method = SolveMethod::threshold;

    // Threshold paths: the candidate sets that passed (every equilibrium of
    // the game pays like one of these). Exhaustive paths: all equilibria.
    std::vector<StrategyProfile> equilibria;

    std::vector<EquilibriumFamily> families;  // interval-scan path only

    std::optional<StrategyProfile> optimum;
    // True when the optimum claim (or its absence) covers every equilibrium
    // of the game: all analytic paths and full enumeration qualify. False
    // only when a general game was too large to enumerate, in which case
    // only threshold candidates were examined.
    bool optimum_guaranteed = false;

    std::vector<std::string> diagnostics;
};

// Exhaustive equilibrium enumeration over all 2^n profiles, in ascending
// cashout-mask order. Parallelized with OpenMP; output is independent of the
// thread count. Refuses games with more than max_players players.
std::vector<StrategyProfile> brute_force_equilibria(const LiquidityGame& game,
                                                    std::size_t max_players = 20);

// Single-threaded reference enumeration used by tests and the benchmark. It
// deliberately sticks to the direct deviation check so it shares nothing
// with the fast path it is used to verify.
std::vector<StrategyProfile> brute_force_equilibria_reference(const LiquidityGame& game,
                                                              std::size_t max_players = 20);

// The candidate sets {k : gamma_k >= g} for g = infinity and each distinct
// gamma, ordered by decreasing threshold (= increasing size). The first is
// the empty set, the last is everyone. Any equilibrium of a game satisfying
// the cashout-incentive bound pays out like one of these.
std::vector<StrategyProfile> threshold_candidates(const LiquidityGame& game);

GameClass classify_game(const LiquidityGame& game);

// Forced all-cashout outcome for value < total principal.
EquilibriumReport solve_all_cashout(const LiquidityGame& game);

// Threshold-candidate screen for the general game with value >= total
// principal. With the cashout-incentive bound the passing candidates
// represent every equilibrium class and the g-maximizing one dominates all
// equilibria; without it the screen is still run but completeness is lost
// and the report says so.
EquilibriumReport representative_equilibria(const LiquidityGame& game);

// Fast path for games with principal == gamma*alpha throughout and value >=
// total principal: one incremental scan over the candidates, testing whether
// value lies in each candidate's closed interval
//   [p(K) + max gamma over converting * divisor,
//    p(K) + min gamma over cashing * divisor].
// Adjacent intervals share endpoints, so existence is guaranteed; the shared
// endpoints are asserted during the scan. Also emits the equal-gamma
// families that, together with the candidates, exhaust every equilibrium.
EquilibriumReport premoney_solve(const LiquidityGame& game);

// All alpha zero: the passing threshold candidates are exactly the
// equilibria of the game (no representative slack), and one always exists.
EquilibriumReport postmoney_solve(const LiquidityGame& game);

// Full enumeration wrapped as a report: all equilibria, the dominant one if
// any, and a best-response cycle diagnostic when none exists.
EquilibriumReport brute_force_solve(const LiquidityGame& game, std::size_t max_players = 20);

// Validates, classifies and dispatches. General games small enough are
// settled by brute force; general games beyond brute_force_limit fall back
// to the (incomplete) threshold screen with a diagnostic.
EquilibriumReport classify_and_solve(const LiquidityGame& game,
                                     std::size_t brute_force_limit = 20);

// Expands a family into its explicit members, sorted by cashout mask.
// Refuses families with more than max_members members.
std::vector<StrategyProfile> expand_family(const EquilibriumFamily& family,
                                           std::size_t max_members = 4096);

// Follows best responses from the all-cashout profile until a profile
// repeats, and renders the cycle as "id:move -> id:move -> ...". Only
// meaningful when the game has no equilibrium (otherwise the walk may stop
// at one, yielding nullopt). payout_for abstracts over plain and mixed games.
std::optional<std::string> best_response_cycle(
    const std::vector<std::string>& player_ids,
    const std::function<PayoutVector(const StrategyProfile&)>& payout_for);

}  // namespace liqgame
