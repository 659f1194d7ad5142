#include "liqgame/solver.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace liqgame {

const char* to_string(GameClass c) {
    switch (c) {
        case GameClass::all_cashout: return "all-cashout";
        case GameClass::pre_money: return "pre-money";
        case GameClass::post_money: return "post-money";
        case GameClass::general_solvable: return "general-solvable";
        case GameClass::general: return "general";
    }
    return "?";
}

const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::all_cashout_rule: return "all-cashout";
        case SolveMethod::interval_scan: return "interval-scan";
        case SolveMethod::post_money: return "post-money";
        case SolveMethod::threshold: return "threshold";
        case SolveMethod::brute_force: return "brute-force";
    }
    return "?";
}

namespace {

void require_valid(const LiquidityGame& game, const char* op) {
    ValidationReport report = validate_game(game);
    if (report.valid) return;
    std::string msg = std::string(op) + ": game fails validation";
    if (!report.violations.empty()) {
        msg += " (" + report.violations.front().condition;
        if (!report.violations.front().subject.empty())
            msg += " for " + report.violations.front().subject.front();
        msg += ")";
    }
    throw std::invalid_argument(msg);
}

// Distinct gamma values in decreasing order, each with its players.
struct GammaBlock {
    Rational gamma;
    std::vector<std::size_t> members;
    Rational principal_sum;
    Rational alpha_sum;
};

std::vector<GammaBlock> gamma_blocks(const LiquidityGame& game) {
    std::map<Rational, GammaBlock, std::greater<Rational>> by_gamma;
    for (std::size_t i = 0; i < game.player_count(); ++i) {
        const Player& p = game.player(i);
        GammaBlock& block = by_gamma[p.gamma];
        block.gamma = p.gamma;
        block.members.push_back(i);
        block.principal_sum += p.principal;
        block.alpha_sum += p.alpha;
    }
    std::vector<GammaBlock> blocks;
    blocks.reserve(by_gamma.size());
    for (auto& [_, block] : by_gamma) blocks.push_back(std::move(block));
    return blocks;
}

std::size_t check_player_limit(const LiquidityGame& game, std::size_t max_players,
                               const char* op) {
    std::size_t n = game.player_count();
    if (n > max_players)
        throw SizeLimitError(std::string(op) + ": " + std::to_string(n) +
                             " players exceed the limit of " + std::to_string(max_players));
    return n;
}

}  // namespace

std::vector<StrategyProfile> brute_force_equilibria(const LiquidityGame& game,
                                                    std::size_t max_players) {
    const std::size_t n = check_player_limit(game, max_players, "brute force");
    const std::uint64_t profile_count = std::uint64_t{1} << n;
    const bool fast_path = game.value() >= game.total_principal();

    std::vector<std::uint8_t> hits(profile_count, 0);
#pragma omp parallel for schedule(static)
    for (long long m = 0; m < static_cast<long long>(profile_count); ++m) {
        StrategyProfile profile =
            StrategyProfile::from_mask(n, static_cast<std::uint64_t>(m));
        hits[static_cast<std::uint64_t>(m)] =
            fast_path ? is_nash_by_conditions(game, profile)
                      : is_nash_by_deviation(game, profile);
    }

    std::vector<StrategyProfile> out;
    for (std::uint64_t m = 0; m < profile_count; ++m)
        if (hits[m]) out.push_back(StrategyProfile::from_mask(n, m));
    return out;
}

std::vector<StrategyProfile> brute_force_equilibria_reference(const LiquidityGame& game,
                                                              std::size_t max_players) {
    const std::size_t n = check_player_limit(game, max_players, "brute force");
    std::vector<StrategyProfile> out;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        StrategyProfile profile = StrategyProfile::from_mask(n, m);
        if (is_nash_by_deviation(game, profile)) out.push_back(profile);
    }
    return out;
}

std::vector<StrategyProfile> threshold_candidates(const LiquidityGame& game) {
    std::vector<StrategyProfile> out;
    StrategyProfile running(game.player_count());
    out.push_back(running);
    for (const GammaBlock& block : gamma_blocks(game)) {
        for (std::size_t i : block.members) running.set_cashout(i, true);
        out.push_back(running);
    }
    return out;
}

GameClass classify_game(const LiquidityGame& game) {
    if (game.value() < game.total_principal()) return GameClass::all_cashout;
    bool pre = true, post = true, solvable = true;
    for (const Player& p : game.players()) {
        Rational incentive = p.gamma * p.alpha;
        if (incentive != p.principal) pre = false;
        if (p.alpha != 0) post = false;
        if (incentive > p.principal) solvable = false;
    }
    if (pre) return GameClass::pre_money;
    if (post) return GameClass::post_money;
    if (solvable) return GameClass::general_solvable;
    return GameClass::general;
}

namespace {

// Index of the g-maximizing profile; ties go to the earliest entry, which on
// every analytic path is the smallest cashout set.
std::size_t g_maximizer(const LiquidityGame& game, const std::vector<StrategyProfile>& profiles) {
    std::size_t best = 0;
    Rational best_g = residual_per_divisor(game, profiles[0]);
    for (std::size_t i = 1; i < profiles.size(); ++i) {
        Rational g = residual_per_divisor(game, profiles[i]);
        if (g > best_g) {
            best_g = g;
            best = i;
        }
    }
    return best;
}

}  // namespace

EquilibriumReport solve_all_cashout(const LiquidityGame& game) {
    if (game.value() >= game.total_principal())
        throw std::invalid_argument(
            "all-cashout rule applies only when value is below the total principal");
    EquilibriumReport report;
    report.exists = true;
    report.game_class = GameClass::all_cashout;
    report.method = SolveMethod::all_cashout_rule;
    report.equilibria.push_back(StrategyProfile::all_cashout(game.player_count()));
    report.optimum = report.equilibria.front();
    report.optimum_guaranteed = true;
    return report;
}

EquilibriumReport representative_equilibria(const LiquidityGame& game) {
    require_valid(game, "representative equilibria");
    if (game.value() < game.total_principal()) return solve_all_cashout(game);

    EquilibriumReport report;
    report.game_class = classify_game(game);
    report.method = SolveMethod::threshold;

    for (const StrategyProfile& candidate : threshold_candidates(game))
        if (is_nash_by_conditions(game, candidate)) report.equilibria.push_back(candidate);
    report.exists = !report.equilibria.empty();

    bool solvable = validate_game(game).solvable;
    if (solvable) {
        if (report.exists) report.optimum = report.equilibria[g_maximizer(game, report.equilibria)];
        report.optimum_guaranteed = true;
    } else {
        std::string offenders;
        for (const Player& p : game.players())
            if (p.gamma * p.alpha > p.principal)
                offenders += (offenders.empty() ? "" : ", ") + p.id;
        report.diagnostics.push_back(
            "cashout-incentive bound fails for player(s) " + offenders +
            "; equilibria outside the threshold candidates may exist and no optimum is "
            "guaranteed");
    }
    return report;
}

EquilibriumReport premoney_solve(const LiquidityGame& game) {
    require_valid(game, "pre-money solve");
    if (game.value() < game.total_principal())
        throw std::invalid_argument("pre-money solve requires value >= total principal");
    for (const Player& p : game.players())
        if (p.gamma * p.alpha != p.principal)
            throw std::invalid_argument(
                "pre-money solve requires principal == gamma * alpha for every player "
                "(violated by '" + p.id + "')");

    const std::vector<GammaBlock> blocks = gamma_blocks(game);
    const std::size_t m = blocks.size();

    EquilibriumReport report;
    report.game_class = classify_game(game);
    report.method = SolveMethod::interval_scan;

    // Scan candidates from the empty set downward through the gammas,
    // shifting principal into the cashout side and alpha out of the divisor.
    StrategyProfile running(game.player_count());
    Rational cash_sum = 0;
    Rational divisor = dilution_divisor_of_cashout(game, running);  // divisor over everyone

    std::vector<StrategyProfile> candidates;
    std::vector<std::optional<Rational>> left_ends;  // nullopt = -infinity

    auto record = [&](std::size_t block_index_of_next) {
        candidates.push_back(running);
        if (block_index_of_next < m)
            left_ends.push_back(cash_sum + blocks[block_index_of_next].gamma * divisor);
        else
            left_ends.push_back(std::nullopt);
    };

    record(0);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i : blocks[j].members) running.set_cashout(i, true);
        cash_sum += blocks[j].principal_sum;
        divisor -= blocks[j].alpha_sum;

        Rational right = cash_sum + blocks[j].gamma * divisor;
        // Adjacent candidate intervals must share this endpoint; anything
        // else means the incremental state went wrong.
        if (!left_ends.back() || *left_ends.back() != right)
            throw std::logic_error("interval scan: endpoints of adjacent candidates disagree");
        record(j + 1);
    }

    // Candidate j is an equilibrium iff value lies in
    // [left_ends[j], right_j] where right_j is the previous left end.
    std::vector<bool> passed(candidates.size(), false);
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        bool left_ok = !left_ends[j] || *left_ends[j] <= game.value();
        bool right_ok = j == 0 || game.value() <= *left_ends[j - 1];
        passed[j] = left_ok && right_ok;
        if (passed[j]) report.equilibria.push_back(candidates[j]);
    }
    if (report.equilibria.empty())
        throw std::logic_error("interval scan: the intervals tile the line, one must contain "
                               "the value");
    report.exists = true;

    // Equal-gamma families: when the value sits exactly on the junction
    // between candidate j and candidate j+1, every way of splitting the
    // gamma block between cashing and converting is an equilibrium with
    // identical payouts.
    for (std::size_t j = 0; j + 1 < candidates.size(); ++j) {
        if (!passed[j] || !left_ends[j] || *left_ends[j] != game.value()) continue;
        EquilibriumFamily family;
        family.base = candidates[j];
        family.free_players = blocks[j].members;
        family.member_count = Rational(mpz_class(1) << blocks[j].members.size());
        report.families.push_back(std::move(family));
    }

    report.optimum = report.equilibria[g_maximizer(game, report.equilibria)];
    report.optimum_guaranteed = true;
    return report;
}

EquilibriumReport postmoney_solve(const LiquidityGame& game) {
    require_valid(game, "post-money solve");
    for (const Player& p : game.players())
        if (p.alpha != 0)
            throw std::invalid_argument(
                "post-money solve requires alpha == 0 for every player (violated by '" +
                p.id + "')");

    const std::vector<GammaBlock> blocks = gamma_blocks(game);
    const std::size_t m = blocks.size();

    EquilibriumReport report;
    report.game_class = classify_game(game);
    report.method = SolveMethod::post_money;

    // With every alpha zero the divisor is constant, so the equilibrium
    // conditions reduce to
    //   cashing:    p(K) + min over K (gamma*beta - principal) >= value
    //   converting: value >= p(K) + max over complement (gamma*beta)
    // evaluated incrementally over the threshold candidates.
    StrategyProfile running(game.player_count());
    Rational cash_sum = 0;
    std::optional<Rational> cash_margin;  // min over K of gamma*beta - principal

    auto consider = [&](std::size_t next_block) {
        bool cash_ok = !cash_margin || cash_sum + *cash_margin >= game.value();
        bool convert_ok =
            next_block >= m || game.value() >= cash_sum + blocks[next_block].gamma * game.beta();
        if (cash_ok && convert_ok) report.equilibria.push_back(running);
    };

    consider(0);
    for (std::size_t j = 0; j < m; ++j) {
        Rational block_margin = blocks[j].gamma * game.beta() - game.player(blocks[j].members.front()).principal;
        for (std::size_t i : blocks[j].members) {
            running.set_cashout(i, true);
            Rational margin = blocks[j].gamma * game.beta() - game.player(i).principal;
            if (margin < block_margin) block_margin = margin;
        }
        cash_sum += blocks[j].principal_sum;
        if (!cash_margin || block_margin < *cash_margin) cash_margin = block_margin;
        consider(j + 1);
    }

    report.exists = !report.equilibria.empty();
    if (report.exists)
        report.optimum = report.equilibria[g_maximizer(game, report.equilibria)];
    report.optimum_guaranteed = true;
    return report;
}

namespace {

// Exhaustive search outcome: all equilibria, plus the dominant one if any.
void finish_exhaustive(const LiquidityGame& game, EquilibriumReport& report) {
    report.exists = !report.equilibria.empty();
    report.optimum_guaranteed = true;
    if (!report.exists) return;

    std::vector<PayoutVector> pays;
    pays.reserve(report.equilibria.size());
    for (const StrategyProfile& k : report.equilibria) pays.push_back(payouts(game, k));
    for (std::size_t i = 0; i < pays.size(); ++i) {
        bool dominant = true;
        for (std::size_t j = 0; j < pays.size() && dominant; ++j) {
            ProfileOrder order = compare_payouts(pays[j], pays[i]);
            dominant = order == ProfileOrder::first_below || order == ProfileOrder::equivalent;
        }
        if (dominant) {
            report.optimum = report.equilibria[i];
            return;
        }
    }
}

}  // namespace

EquilibriumReport brute_force_solve(const LiquidityGame& game, std::size_t max_players) {
    require_valid(game, "brute force");
    EquilibriumReport report;
    report.game_class = classify_game(game);
    report.method = SolveMethod::brute_force;
    report.equilibria = brute_force_equilibria(game, max_players);
    finish_exhaustive(game, report);
    if (!report.exists) {
        std::vector<std::string> ids;
        for (const Player& p : game.players()) ids.push_back(p.id);
        auto cycle = best_response_cycle(
            ids, [&](const StrategyProfile& k) { return payouts(game, k); });
        if (cycle) report.diagnostics.push_back("best-response cycle: " + *cycle);
    }
    return report;
}

EquilibriumReport classify_and_solve(const LiquidityGame& game, std::size_t brute_force_limit) {
    require_valid(game, "solve");
    GameClass cls = classify_game(game);

    EquilibriumReport report;
    switch (cls) {
        case GameClass::all_cashout:
            report = solve_all_cashout(game);
            break;
        case GameClass::pre_money:
            report = premoney_solve(game);
            break;
        case GameClass::post_money:
            report = postmoney_solve(game);
            break;
        case GameClass::general_solvable:
            report = representative_equilibria(game);
            break;
        case GameClass::general:
            if (game.player_count() <= brute_force_limit)
                return brute_force_solve(game, brute_force_limit);
            report = representative_equilibria(game);
            report.diagnostics.push_back(
                "too many players to enumerate; existence beyond the threshold "
                "candidates is undecided");
            break;
    }

    if (!report.exists && game.player_count() <= brute_force_limit) {
        std::vector<std::string> ids;
        for (const Player& p : game.players()) ids.push_back(p.id);
        auto cycle = best_response_cycle(
            ids, [&](const StrategyProfile& k) { return payouts(game, k); });
        if (cycle) report.diagnostics.push_back("best-response cycle: " + *cycle);
    }
    return report;
}

std::vector<StrategyProfile> expand_family(const EquilibriumFamily& family,
                                           std::size_t max_members) {
    if (family.free_players.size() >= 63 ||
        (std::uint64_t{1} << family.free_players.size()) > max_members)
        throw SizeLimitError("family with " + fraction_string(family.member_count) +
                             " members exceeds the expansion cap of " +
                             std::to_string(max_members));
    std::vector<std::size_t> free = family.free_players;
    std::sort(free.begin(), free.end());
    std::vector<StrategyProfile> out;
    for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << free.size()); ++sub) {
        StrategyProfile member = family.base;
        for (std::size_t j = 0; j < free.size(); ++j)
            if ((sub >> j) & 1u) member.set_cashout(free[j], true);
        out.push_back(std::move(member));
    }
    return out;
}

std::optional<std::string> best_response_cycle(
    const std::vector<std::string>& player_ids,
    const std::function<PayoutVector(const StrategyProfile&)>& payout_for) {
    const std::size_t n = player_ids.size();
    if (n == 0 || n > 20) return std::nullopt;

    StrategyProfile current = StrategyProfile::all_cashout(n);
    std::unordered_map<std::uint64_t, std::size_t> seen;
    std::vector<std::string> labels;

    for (std::uint64_t step = 0; step <= (std::uint64_t{1} << n); ++step) {
        seen.emplace(current.mask(), labels.size());
        PayoutVector here = payout_for(current);

        std::optional<std::size_t> mover;
        for (std::size_t i = 0; i < n && !mover; ++i)
            if (payout_for(current.toggled(i))[i] > here[i]) mover = i;
        if (!mover) return std::nullopt;  // reached an equilibrium

        current = current.toggled(*mover);
        labels.push_back(player_ids[*mover] + ":" +
                         (current.cashes_out(*mover) ? "Cash" : "Convert"));

        auto hit = seen.find(current.mask());
        if (hit != seen.end()) {
            std::string out = labels.back();
            for (std::size_t t = hit->second; t < labels.size(); ++t) out += " -> " + labels[t];
            return out;
        }
    }
    return std::nullopt;
}

}  // namespace liqgame
