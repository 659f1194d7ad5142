#include <vector>

#include "doctest.h"
#include "generators.hpp"
#include "liqgame/game.hpp"

using namespace liqgame;
using testgen::R;

namespace {

StrategyProfile mask_of(const LiquidityGame& game, std::uint64_t mask) {
    return StrategyProfile::from_mask(game.player_count(), mask);
}

// Literal transcription of the well-definedness bound, enumerated over every
// nonempty subset; the oracle for validate_game's closed-form test.
bool conversion_bound_by_enumeration(const LiquidityGame& game) {
    const std::size_t n = game.player_count();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        Rational divisor = game.beta();
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1u) divisor += game.player(i).alpha;
        Rational sum = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1u) sum += game.player(i).principal / (game.player(i).gamma * divisor);
        if (sum >= 1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("game construction rejects structural nonsense") {
    CHECK_THROWS_AS(LiquidityGame(R("1"), R("1"), {}), std::invalid_argument);
    CHECK_THROWS_AS(LiquidityGame(R("1"), R("1"),
                                  {{"a", R("1"), R("0"), R("1")}, {"a", R("1"), R("0"), R("1")}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(LiquidityGame(R("1"), R("1"), {{"", R("1"), R("0"), R("1")}}),
                    std::invalid_argument);
}

TEST_CASE("dilution divisor") {
    LiquidityGame fig1 = testgen::conflict_game();
    CHECK(dilution_divisor(fig1, mask_of(fig1, 0b11)) == 3);
    CHECK(dilution_divisor(fig1, mask_of(fig1, 0)) == fig1.beta());

    LiquidityGame ex1 = testgen::shifted_game();
    CHECK(dilution_divisor(ex1, mask_of(ex1, 0b110)) == 4);  // players with alpha 2 and 1
    CHECK_THROWS_AS(profile_from_ids(ex1, std::vector<std::string>{"9"}), std::invalid_argument);
}

TEST_CASE("payouts reproduce the worked matrices") {
    LiquidityGame fig1 = testgen::conflict_game();
    CHECK(payouts(fig1, mask_of(fig1, 0b01)) == PayoutVector{R("1"), R("7/6")});
    CHECK(payouts(fig1, mask_of(fig1, 0b10)) == PayoutVector{R("7/6"), R("1")});
    CHECK(payouts(fig1, mask_of(fig1, 0b00)) == PayoutVector{R("8/9"), R("8/9")});
    CHECK(payouts(fig1, mask_of(fig1, 0b11)) == PayoutVector{R("1"), R("1")});

    LiquidityGame fig2 = testgen::cycling_game();
    CHECK(payouts(fig2, mask_of(fig2, 0b00)) == PayoutVector{R("29/3"), R("464/25")});
    CHECK(payouts(fig2, mask_of(fig2, 0b01)) == PayoutVector{R("10"), R("76/5")});
    CHECK(payouts(fig2, mask_of(fig2, 0b10)) == PayoutVector{R("65/6"), R("16")});

    LiquidityGame fig3 = testgen::postmoney_pair_game();
    CHECK(payouts(fig3, mask_of(fig3, 0b00)) == PayoutVector{R("12/5"), R("12/5")});
}

TEST_CASE("cashouts are senior and pro-rated under shortfall") {
    LiquidityGame game = testgen::make_game(
        "6", "1", {{"a", "6", "1", "10"}, {"b", "3", "1", "10"}, {"c", "2", "1", "10"}});
    // a and b cash out for 9 against value 6: pro-rata 2:1, c converts into nothing
    PayoutVector pay = payouts(game, mask_of(game, 0b011));
    CHECK(pay == PayoutVector{R("4"), R("2"), R("0")});

    // boundary: cashouts exactly exhaust the value
    PayoutVector boundary = payouts(game, mask_of(game, 0b001));
    CHECK(boundary[0] == R("6"));
    CHECK(boundary[1] == R("0"));
    CHECK(boundary[2] == R("0"));
}

TEST_CASE("validation matches the worked examples") {
    ValidationReport fig1 = validate_game(testgen::conflict_game());
    CHECK(fig1.valid);
    CHECK_FALSE(fig1.solvable);  // gamma*alpha = 3 > 1 = principal

    ValidationReport fig2 = validate_game(testgen::cycling_game());
    CHECK(fig2.valid);
    CHECK(fig2.solvable);

    // principal exactly at gamma * (beta + alpha) violates the solo bound
    LiquidityGame boundary =
        testgen::make_game("10", "1", {{"a", "6", "2", "2"}, {"b", "1", "1", "1"}});
    ValidationReport report = validate_game(boundary);
    CHECK_FALSE(report.valid);
    REQUIRE_FALSE(report.violations.empty());
    CHECK(report.violations.front().condition == "solo-conversion-bound");
    CHECK(report.violations.front().subject == std::vector<std::string>{"a"});
}

TEST_CASE("validation catches joint violations single players pass") {
    // each alone: 3/5 < 1 of the divisor; together: 6/5 >= 1
    LiquidityGame game =
        testgen::make_game("10", "1", {{"a", "3", "0", "5"}, {"b", "3", "0", "5"}});
    ValidationReport report = validate_game(game);
    CHECK_FALSE(report.valid);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations.front().condition == "joint-conversion-bound");
    CHECK(report.violations.front().subject == std::vector<std::string>{"a", "b"});
    CHECK_FALSE(conversion_bound_by_enumeration(game));
}

TEST_CASE("validation flags broken signs") {
    LiquidityGame game = testgen::make_game("5", "1", {{"a", "-1", "0", "2"}});
    ValidationReport report = validate_game(game);
    CHECK_FALSE(report.valid);
    CHECK(report.violations.front().condition == "positivity");
}

TEST_CASE("closed-form conversion bound equals subset enumeration") {
    // Raw parameter soup, valid and invalid alike.
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        testgen::Rng rng(9000 + seed);
        std::size_t n = 1 + rng.below(7);
        std::vector<Player> players;
        for (std::size_t i = 0; i < n; ++i) {
            Rational alpha(rng.below(3), 1 + rng.below(2));
            alpha.canonicalize();
            players.push_back({"p" + std::to_string(i), rng.fraction(9, 2), alpha,
                               rng.fraction(5, 2)});
        }
        LiquidityGame game(rng.fraction(30, 2), rng.fraction(3, 2), std::move(players));
        CHECK(validate_game(game).valid == conversion_bound_by_enumeration(game));
    }
}

TEST_CASE("residual per divisor") {
    LiquidityGame ex1 = testgen::shifted_game();
    CHECK(residual_per_divisor(ex1, mask_of(ex1, 0b001)) == 2);
    CHECK(residual_per_divisor(ex1, StrategyProfile::all_cashout(3)) ==
          (ex1.value() - ex1.total_principal()) / ex1.beta());

    LiquidityGame fig3 = testgen::postmoney_pair_game();
    CHECK(residual_per_divisor(fig3, mask_of(fig3, 0)) == 6);
    // cross-check: converting payout = principal * g / gamma
    CHECK(payouts(fig3, mask_of(fig3, 0))[0] == R("2") * 6 / R("5"));
}

TEST_CASE("nash predicate on the worked examples") {
    LiquidityGame fig1 = testgen::conflict_game();
    CHECK(is_nash_equilibrium(fig1, mask_of(fig1, 0b01)));
    CHECK_FALSE(is_nash_equilibrium(fig1, mask_of(fig1, 0b00)));

    LiquidityGame ex1 = testgen::shifted_game();
    CHECK(is_nash_equilibrium(ex1, mask_of(ex1, 0b001)));   // {0}
    CHECK(is_nash_equilibrium(ex1, mask_of(ex1, 0b101)));   // {0,2}
    CHECK_FALSE(is_nash_equilibrium(ex1, mask_of(ex1, 0b011)));  // {0,1}
}

TEST_CASE("profile comparison") {
    LiquidityGame fig3 = testgen::postmoney_pair_game();
    CHECK(compare_profiles(fig3, StrategyProfile::all_cashout(2), mask_of(fig3, 0)) ==
          ProfileOrder::first_below);
    CHECK(compare_profiles(fig3, mask_of(fig3, 0), mask_of(fig3, 0)) == ProfileOrder::equivalent);

    LiquidityGame fig1 = testgen::conflict_game();
    CHECK(compare_profiles(fig1, mask_of(fig1, 0b01), mask_of(fig1, 0b10)) ==
          ProfileOrder::incomparable);
}

TEST_CASE("payout invariants hold on random games") {
    using testgen::GameKind;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        testgen::Rng rng(100 + seed);
        GameKind kind = static_cast<GameKind>(seed % 4);
        LiquidityGame game = testgen::random_game(rng, 7, kind, seed % 5 == 0);
        REQUIRE(validate_game(game).valid);

        const std::size_t n = game.player_count();
        for (int trial = 0; trial < 8; ++trial) {
            StrategyProfile k = StrategyProfile::from_mask(n, rng.below(std::uint64_t{1} << n));
            PayoutVector pay = payouts(game, k);

            Rational total = 0, cash_part = 0, cash_principal = 0;
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(pay[i] >= 0);
                total += pay[i];
                if (k.cashes_out(i)) {
                    cash_part += pay[i];
                    cash_principal += game.player(i).principal;
                }
            }
            CHECK(total <= game.value());
            CHECK(cash_part == std::min(cash_principal, game.value()));

            if (cash_principal >= game.value())
                for (std::size_t i = 0; i < n; ++i)
                    if (!k.cashes_out(i)) CHECK(pay[i] == 0);

            if (cash_principal > game.value())
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        if (k.cashes_out(i) && k.cashes_out(j))
                            CHECK(pay[i] * game.player(j).principal ==
                                  pay[j] * game.player(i).principal);

            // the conversion side never exhausts the residual
            if (k.cashout_count() < n && cash_principal < game.value())
                CHECK(total - cash_part < game.value() - cash_part);
        }
    }
}

TEST_CASE("payouts and the nash predicate are homogeneous in the monetary scale") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        testgen::Rng rng(4200 + seed);
        LiquidityGame game =
            testgen::random_game(rng, 6, testgen::GameKind::general, seed % 3 == 0);
        Rational scale = rng.fraction(7, 3);

        std::vector<Player> scaled;
        for (const Player& p : game.players())
            scaled.push_back({p.id, p.principal * scale, p.alpha, p.gamma * scale});
        LiquidityGame bigger(game.value() * scale, game.beta(), std::move(scaled));

        const std::size_t n = game.player_count();
        for (int trial = 0; trial < 6; ++trial) {
            StrategyProfile k = StrategyProfile::from_mask(n, rng.below(std::uint64_t{1} << n));
            PayoutVector before = payouts(game, k), after = payouts(bigger, k);
            for (std::size_t i = 0; i < n; ++i) CHECK(after[i] == before[i] * scale);
            CHECK(is_nash_by_deviation(game, k) == is_nash_by_deviation(bigger, k));
        }
    }
}

TEST_CASE("closed-form nash conditions agree with deviation checks") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        testgen::Rng rng(7700 + seed);
        LiquidityGame game = testgen::random_game(
            rng, 6, seed % 2 ? testgen::GameKind::general : testgen::GameKind::general_solvable,
            false);
        REQUIRE(game.value() >= game.total_principal());
        const std::size_t n = game.player_count();
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            StrategyProfile k = StrategyProfile::from_mask(n, mask);
            CHECK(is_nash_by_conditions(game, k) == is_nash_by_deviation(game, k));
        }
    }
}
