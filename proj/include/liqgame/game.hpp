#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liqgame/rational.hpp"

namespace liqgame {

// One convertible instrument. `principal` is the purchase amount, `gamma`
// the per-holder price factor and `alpha` the holder's increment to the
// dilution divisor. The holder's conversion payout for cashout set K is
//   principal / (gamma * dilution_divisor(complement of K)) * residual.
struct Player {
    std::string id;
    Rational principal;
    Rational alpha;
    Rational gamma;
};

// A liquidity event: `value` is distributed among the instrument holders,
// each of whom independently elects Cashout or Convert. Cashouts are senior
// and pay back principal (pro-rata under shortfall); converters split what
// remains in proportion to principal / (gamma * divisor).
//
// Immutable after construction; all operations on it are pure functions, so
// games can be shared freely across threads.
class LiquidityGame {
public:
    // Requires a nonempty player list with distinct ids. Numeric range
    // conditions are deliberately not enforced here; validate_game reports
    // them so that ill-formed inputs yield diagnostics instead of throws.
    LiquidityGame(Rational value, Rational beta, std::vector<Player> players);

    const Rational& value() const { return value_; }
    const Rational& beta() const { return beta_; }
    std::span<const Player> players() const { return players_; }
    std::size_t player_count() const { return players_.size(); }
    const Player& player(std::size_t index) const { return players_[index]; }

    // Sum of all principals; cached because nearly every solver path needs it.
    const Rational& total_principal() const { return total_principal_; }

    std::size_t index_of(std::string_view id) const;  // throws on unknown id

private:
    Rational value_;
    Rational beta_;
    std::vector<Player> players_;
    Rational total_principal_;
};

// A pure strategy profile, identified with the set of players who cash out.
// Bit i corresponds to players()[i]; set means Cashout, clear means Convert.
class StrategyProfile {
public:
    StrategyProfile() = default;
    explicit StrategyProfile(std::size_t player_count) : bits_(player_count, false) {}

    static StrategyProfile from_mask(std::size_t player_count, std::uint64_t mask);
    static StrategyProfile all_cashout(std::size_t player_count);

    std::size_t player_count() const { return bits_.size(); }
    bool cashes_out(std::size_t index) const { return bits_[index]; }
    void set_cashout(std::size_t index, bool cashout) { bits_[index] = cashout; }

    StrategyProfile toggled(std::size_t index) const;

    std::size_t cashout_count() const;
    bool empty() const { return cashout_count() == 0; }

    std::uint64_t mask() const;  // requires player_count() <= 64
    std::vector<std::size_t> cashout_indices() const;

    bool operator==(const StrategyProfile&) const = default;

    // Canonical report order: as an integer with bit 0 least significant.
    static bool mask_less(const StrategyProfile& a, const StrategyProfile& b);

private:
    std::vector<bool> bits_;
};

// Builds a profile from player ids; throws on unknown or duplicate ids.
StrategyProfile profile_from_ids(const LiquidityGame& game, std::span<const std::string> ids);
std::vector<std::string> ids_of_profile(const LiquidityGame& game, const StrategyProfile& profile);

// Payouts indexed like game.players().
using PayoutVector = std::vector<Rational>;

struct Violation {
    std::string condition;              // "positivity" | "solo-conversion-bound" | "joint-conversion-bound"
    std::vector<std::string> subject;   // player ids (or a witness subset of ids)
    std::string detail;
};

struct ValidationReport {
    bool valid = false;      // positivity and the conversion bounds all hold
    bool solvable = false;   // gamma_i * alpha_i <= principal_i for every player
    std::vector<Violation> violations;
};

// The dilution divisor beta + sum of alpha_i over X.
Rational dilution_divisor(const LiquidityGame& game, const StrategyProfile& converting);
Rational dilution_divisor_of_cashout(const LiquidityGame& game, const StrategyProfile& cashout);

// Payouts for one profile. Cashing players receive their principal, or a
// pro-rata share of `value` if the principals exceed it; converting players
// split the remainder, each in proportion principal/(gamma * divisor), and
// receive zero when the cashouts consume everything.
PayoutVector payouts(const LiquidityGame& game, const StrategyProfile& cashout);

// Checks positivity of every parameter and the conversion bound
//   sum over C of principal_i / (gamma_i * divisor(C)) < 1
// for every nonempty subset C, reported exactly (see validate.cpp for how
// the subset family collapses to a single worst case). The optional
// cashout-incentive bound gamma_i*alpha_i <= principal_i is reported as the
// separate `solvable` flag, not as a violation.
ValidationReport validate_game(const LiquidityGame& game);

// (value - cashout principal) / divisor(converting set). A converting player
// receives principal * g / gamma. Negative when cashouts exceed value.
Rational residual_per_divisor(const LiquidityGame& game, const StrategyProfile& cashout);

// True iff no player can strictly improve their own payout by unilaterally
// switching their election.
bool is_nash_equilibrium(const LiquidityGame& game, const StrategyProfile& cashout);

// The two implementations behind is_nash_equilibrium, exposed so tests can
// cross-check them. The deviation check compares payouts directly and is
// always correct. The closed-form check evaluates, for value >= total
// principal, the per-player inequalities
//   cashing i:    p(K) - p_i + gamma_i * (divisor + alpha_i) >= value
//   converting i: value >= p(K) + gamma_i * divisor
// which are equivalent to the deviation check in that regime.
bool is_nash_by_deviation(const LiquidityGame& game, const StrategyProfile& cashout);
bool is_nash_by_conditions(const LiquidityGame& game, const StrategyProfile& cashout);

enum class ProfileOrder {
    first_below,   // every payout in `first` <= the one in `second`, not all equal
    second_below,
    equivalent,    // identical payouts for every player
    incomparable,
};

ProfileOrder compare_profiles(const LiquidityGame& game, const StrategyProfile& first,
                              const StrategyProfile& second);
ProfileOrder compare_payouts(const PayoutVector& first, const PayoutVector& second);

}  // namespace liqgame
