#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "liqgame/game.hpp"
#include "liqgame/solver.hpp"

namespace liqgame {

enum class SafeVariant {
    pre_money_cap,
    pre_money_discount,
    pre_money_cap_and_discount,
    post_money_cap,
    post_money_discount,
    mfn,
};

const char* to_string(SafeVariant v);
std::optional<SafeVariant> safe_variant_from_string(std::string_view name);

bool is_pre_money(SafeVariant v);
bool is_post_money(SafeVariant v);

struct SafeContract {
    std::string id;
    SafeVariant variant;
    Rational principal;
    std::optional<Rational> cap;            // *cap* variants
    std::optional<Rational> discount_rate;  // *discount* variants, in (0, 1]
};

// Company-side inputs to a liquidity event. `common_shares` is the share
// count conversions are priced against; `share_price` is only needed when a
// discount variant is present.
struct CompanyContext {
    Rational common_shares;
    std::optional<Rational> share_price;
    Rational value;
};

// Throws std::invalid_argument when the variant's required parameters are
// missing/extra or out of range.
void validate_contract(const SafeContract& contract);

struct CompiledGame {
    LiquidityGame game;
    std::vector<std::string> warnings;
};

// Maps a single-family SAFE portfolio onto game parameters:
//   pre-money cap (and cap+discount):  beta 1, alpha p/cap,           gamma cap
//   discount (pre or post):            beta shares, alpha p/(price*d), gamma price*d
//   post-money cap:                    beta 1, alpha 0,               gamma cap
// A pre-money portfolio mixing cap and discount contracts still fits the
// model after rescaling by the share count (alpha becomes the contract's
// conversion share count and gamma the principal per share). Refuses mixed
// pre/post portfolios, portfolios combining post-money cap with post-money
// discount (their share equations do not reduce to one divisor), and MFN
// contracts (cashout-only; model them as plain cash claims if needed).
CompiledGame compile_game(std::span<const SafeContract> contracts, const CompanyContext& context);

// A portfolio evaluated by the two-step share construction instead of the
// game model: contracts with a price-determined share count (all pre-money
// variants plus post-money discount) convert to fixed counts, and post-money
// cap contracts then take their principal/cap fraction of the total.
class MixedGame {
public:
    MixedGame(std::vector<SafeContract> contracts, CompanyContext context);

    std::span<const SafeContract> contracts() const { return contracts_; }
    const CompanyContext& context() const { return context_; }
    std::size_t contract_count() const { return contracts_.size(); }
    std::size_t index_of(std::string_view id) const;

    // True when the contract's conversion share count does not depend on
    // which other contracts convert.
    bool fixed_count(std::size_t index) const { return fixed_count_[index]; }
    // Fixed conversion share count (fixed-count contracts only).
    const Rational& share_count(std::size_t index) const { return share_count_[index]; }
    // principal/cap (post-money cap contracts only).
    const Rational& total_fraction(std::size_t index) const { return fraction_[index]; }

private:
    std::vector<SafeContract> contracts_;
    CompanyContext context_;
    std::vector<bool> fixed_count_;
    std::vector<Rational> share_count_;
    std::vector<Rational> fraction_;
};

struct ConversionShares {
    std::vector<Rational> shares;  // by contract index; zero when not converting
    Rational total_shares;         // common shares plus every converted count
};

// Share issuance when exactly the flagged contracts convert. Post-money cap
// counts solve total = common + fixed counts + (sum of fractions) * total.
ConversionShares conversion_shares_converting(const MixedGame& mixed,
                                              const std::vector<bool>& converting);
ConversionShares conversion_shares(const MixedGame& mixed,
                                   std::span<const std::string> converting_ids);

// Payouts under the mixed engine. Cashouts behave exactly as in the game
// model; converting contracts split the residual by shareholding, with the
// common holders keeping their own share of it.
PayoutVector mixed_payouts(const MixedGame& mixed, const StrategyProfile& cashout);

// Exhaustive equilibrium search over the mixed engine (no threshold shortcut
// applies here). Reports the dominant equilibrium if one exists, and a
// best-response cycle when there is no equilibrium at all.
EquilibriumReport mixed_equilibria(const MixedGame& mixed, std::size_t max_players = 20);

}  // namespace liqgame
