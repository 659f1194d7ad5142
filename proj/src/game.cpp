#include "liqgame/game.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace liqgame {

LiquidityGame::LiquidityGame(Rational value, Rational beta, std::vector<Player> players)
    : value_(std::move(value)), beta_(std::move(beta)), players_(std::move(players)) {
    if (players_.empty()) throw std::invalid_argument("game needs at least one player");
    std::unordered_set<std::string> seen;
    for (const Player& p : players_) {
        if (p.id.empty()) throw std::invalid_argument("player id must be nonempty");
        if (!seen.insert(p.id).second)
            throw std::invalid_argument("duplicate player id '" + p.id + "'");
    }
    total_principal_ = 0;
    for (const Player& p : players_) total_principal_ += p.principal;
}

std::size_t LiquidityGame::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < players_.size(); ++i)
        if (players_[i].id == id) return i;
    throw std::invalid_argument("unknown player id '" + std::string(id) + "'");
}

StrategyProfile StrategyProfile::from_mask(std::size_t player_count, std::uint64_t mask) {
    if (player_count < 64 && mask >> player_count)
        throw std::invalid_argument("profile mask has bits beyond the player count");
    StrategyProfile profile(player_count);
    for (std::size_t i = 0; i < player_count && i < 64; ++i)
        profile.bits_[i] = (mask >> i) & 1u;
    return profile;
}

StrategyProfile StrategyProfile::all_cashout(std::size_t player_count) {
    StrategyProfile profile(player_count);
    profile.bits_.assign(player_count, true);
    return profile;
}

StrategyProfile StrategyProfile::toggled(std::size_t index) const {
    StrategyProfile copy = *this;
    copy.bits_[index] = !copy.bits_[index];
    return copy;
}

std::size_t StrategyProfile::cashout_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::uint64_t StrategyProfile::mask() const {
    if (bits_.size() > 64) throw std::logic_error("profile too wide for a 64-bit mask");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) m |= std::uint64_t{1} << i;
    return m;
}

std::vector<std::size_t> StrategyProfile::cashout_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) out.push_back(i);
    return out;
}

bool StrategyProfile::mask_less(const StrategyProfile& a, const StrategyProfile& b) {
    // Little-endian comparison: highest differing bit decides.
    std::size_t n = std::max(a.bits_.size(), b.bits_.size());
    for (std::size_t i = n; i-- > 0;) {
        bool ab = i < a.bits_.size() && a.bits_[i];
        bool bb = i < b.bits_.size() && b.bits_[i];
        if (ab != bb) return bb;
    }
    return false;
}

StrategyProfile profile_from_ids(const LiquidityGame& game, std::span<const std::string> ids) {
    StrategyProfile profile(game.player_count());
    for (const std::string& id : ids) {
        std::size_t index = game.index_of(id);
        if (profile.cashes_out(index))
            throw std::invalid_argument("player id '" + id + "' listed twice");
        profile.set_cashout(index, true);
    }
    return profile;
}

std::vector<std::string> ids_of_profile(const LiquidityGame& game, const StrategyProfile& profile) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < game.player_count(); ++i)
        if (profile.cashes_out(i)) out.push_back(game.player(i).id);
    return out;
}

Rational dilution_divisor(const LiquidityGame& game, const StrategyProfile& converting) {
    Rational f = game.beta();
    for (std::size_t i = 0; i < game.player_count(); ++i)
        if (converting.cashes_out(i)) f += game.player(i).alpha;
    return f;
}

Rational dilution_divisor_of_cashout(const LiquidityGame& game, const StrategyProfile& cashout) {
    Rational f = game.beta();
    for (std::size_t i = 0; i < game.player_count(); ++i)
        if (!cashout.cashes_out(i)) f += game.player(i).alpha;
    return f;
}

namespace {

Rational cashout_principal(const LiquidityGame& game, const StrategyProfile& cashout) {
    Rational total = 0;
    for (std::size_t i = 0; i < game.player_count(); ++i)
        if (cashout.cashes_out(i)) total += game.player(i).principal;
    return total;
}

}  // namespace

PayoutVector payouts(const LiquidityGame& game, const StrategyProfile& cashout) {
    const std::size_t n = game.player_count();
    PayoutVector out(n, Rational(0));

    Rational total_cash = cashout_principal(game, cashout);
    bool shortfall = total_cash > game.value();
    for (std::size_t i = 0; i < n; ++i) {
        if (!cashout.cashes_out(i)) continue;
        out[i] = shortfall ? Rational(game.player(i).principal * game.value() / total_cash)
                           : game.player(i).principal;
    }

    Rational residual = shortfall ? Rational(0) : Rational(game.value() - total_cash);
    if (residual > 0) {
        Rational divisor = dilution_divisor_of_cashout(game, cashout);
        for (std::size_t i = 0; i < n; ++i) {
            if (cashout.cashes_out(i)) continue;
            if (game.player(i).gamma * divisor == 0)
                throw std::domain_error("conversion divisor vanishes; validate the game first");
            out[i] = game.player(i).principal * residual / (game.player(i).gamma * divisor);
        }
    }
    return out;
}

ValidationReport validate_game(const LiquidityGame& game) {
    ValidationReport report;
    report.solvable = true;

    auto flag = [&](std::string condition, std::vector<std::string> subject, std::string detail) {
        report.violations.push_back({std::move(condition), std::move(subject), std::move(detail)});
    };

    if (game.value() <= 0) flag("positivity", {}, "distributable value must be positive");
    if (game.beta() <= 0) flag("positivity", {}, "divisor base must be positive");
    for (const Player& p : game.players()) {
        if (p.principal <= 0) flag("positivity", {p.id}, "principal must be positive");
        if (p.gamma <= 0) flag("positivity", {p.id}, "gamma must be positive");
        if (p.alpha < 0) flag("positivity", {p.id}, "alpha must be nonnegative");
    }
    if (!report.violations.empty()) {
        // Signs are broken; the conversion bounds below would be meaningless.
        report.valid = false;
        for (const Player& p : game.players())
            if (p.gamma > 0 && p.gamma * p.alpha > p.principal) report.solvable = false;
        return report;
    }

    // The conversion bound over a subset C,
    //   sum_{i in C} p_i / (gamma_i * divisor(C)) < 1,
    // is equivalent to sum_{i in C} (p_i/gamma_i - alpha_i) < beta. The
    // left-hand side is maximized by taking exactly the players with a
    // positive term (or the single largest term if none is positive), so the
    // whole exponential family collapses to one worst-case subset. Tested
    // against literal subset enumeration in the unit suite.
    Rational worst_sum = 0;
    std::vector<std::string> worst_subset;
    std::optional<std::size_t> best_single;
    for (std::size_t i = 0; i < game.player_count(); ++i) {
        const Player& p = game.player(i);
        Rational term = p.principal / p.gamma - p.alpha;
        if (term >= game.beta())
            flag("solo-conversion-bound", {p.id},
                 "principal must be below gamma * (beta + alpha); sole conversion would "
                 "absorb the whole residual");
        if (term > 0) {
            worst_sum += term;
            worst_subset.push_back(p.id);
        }
        if (!best_single || term > game.player(*best_single).principal / game.player(*best_single).gamma -
                                       game.player(*best_single).alpha)
            best_single = i;
    }
    if (worst_subset.empty() && best_single) {
        const Player& p = game.player(*best_single);
        worst_sum = p.principal / p.gamma - p.alpha;
        worst_subset.push_back(p.id);
    }
    if (worst_sum >= game.beta() && worst_subset.size() > 1)
        flag("joint-conversion-bound", worst_subset,
             "converting this set together would absorb the whole residual (sum of "
             "principal/gamma - alpha reaches " +
                 fraction_string(worst_sum) + " against divisor base " +
                 fraction_string(game.beta()) + ")");

    for (const Player& p : game.players())
        if (p.gamma * p.alpha > p.principal) report.solvable = false;

    report.valid = report.violations.empty();
    return report;
}

Rational residual_per_divisor(const LiquidityGame& game, const StrategyProfile& cashout) {
    Rational divisor = dilution_divisor_of_cashout(game, cashout);
    if (divisor == 0)
        throw std::domain_error("conversion divisor vanishes; validate the game first");
    return (game.value() - cashout_principal(game, cashout)) / divisor;
}

namespace {

// Payout of player i given the totals for the profile, without materializing
// the whole vector. `total_cash` and `divisor` belong to the profile.
Rational player_payout(const LiquidityGame& game, std::size_t i, bool cashes,
                       const Rational& total_cash, const Rational& divisor) {
    const Player& p = game.player(i);
    if (cashes) {
        if (total_cash <= game.value()) return p.principal;
        return p.principal * game.value() / total_cash;
    }
    if (total_cash >= game.value()) return Rational(0);
    return p.principal * (game.value() - total_cash) / (p.gamma * divisor);
}

}  // namespace

bool is_nash_by_deviation(const LiquidityGame& game, const StrategyProfile& cashout) {
    const Rational total_cash = cashout_principal(game, cashout);
    const Rational divisor = dilution_divisor_of_cashout(game, cashout);
    for (std::size_t i = 0; i < game.player_count(); ++i) {
        const Player& p = game.player(i);
        bool cashes = cashout.cashes_out(i);
        Rational here = player_payout(game, i, cashes, total_cash, divisor);
        Rational there = cashes
            ? player_payout(game, i, false, total_cash - p.principal, divisor + p.alpha)
            : player_payout(game, i, true, total_cash + p.principal, divisor - p.alpha);
        if (there > here) return false;
    }
    return true;
}

bool is_nash_by_conditions(const LiquidityGame& game, const StrategyProfile& cashout) {
    const Rational total_cash = cashout_principal(game, cashout);
    const Rational divisor = dilution_divisor_of_cashout(game, cashout);
    for (std::size_t i = 0; i < game.player_count(); ++i) {
        const Player& p = game.player(i);
        if (cashout.cashes_out(i)) {
            if (total_cash - p.principal + p.gamma * (divisor + p.alpha) < game.value())
                return false;
        } else {
            if (game.value() < total_cash + p.gamma * divisor) return false;
        }
    }
    return true;
}

bool is_nash_equilibrium(const LiquidityGame& game, const StrategyProfile& cashout) {
    // The closed-form check is only equivalent when everyone could cash out
    // in full; below that, fall back to direct payout comparison.
    if (game.value() >= game.total_principal()) return is_nash_by_conditions(game, cashout);
    return is_nash_by_deviation(game, cashout);
}

ProfileOrder compare_payouts(const PayoutVector& first, const PayoutVector& second) {
    bool first_le = true, second_le = true;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (first[i] > second[i]) first_le = false;
        if (second[i] > first[i]) second_le = false;
    }
    if (first_le && second_le) return ProfileOrder::equivalent;
    if (first_le) return ProfileOrder::first_below;
    if (second_le) return ProfileOrder::second_below;
    return ProfileOrder::incomparable;
}

ProfileOrder compare_profiles(const LiquidityGame& game, const StrategyProfile& first,
                              const StrategyProfile& second) {
    return compare_payouts(payouts(game, first), payouts(game, second));
}

}  // namespace liqgame
