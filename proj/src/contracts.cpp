#include "liqgame/contracts.hpp"

#include <stdexcept>
#include <unordered_set>

namespace liqgame {

const char* to_string(SafeVariant v) {
    switch (v) {
        case SafeVariant::pre_money_cap: return "pre_money_cap";
        case SafeVariant::pre_money_discount: return "pre_money_discount";
        case SafeVariant::pre_money_cap_and_discount: return "pre_money_cap_and_discount";
        case SafeVariant::post_money_cap: return "post_money_cap";
        case SafeVariant::post_money_discount: return "post_money_discount";
        case SafeVariant::mfn: return "mfn";
    }
    return "?";
}

std::optional<SafeVariant> safe_variant_from_string(std::string_view name) {
    for (SafeVariant v :
         {SafeVariant::pre_money_cap, SafeVariant::pre_money_discount,
          SafeVariant::pre_money_cap_and_discount, SafeVariant::post_money_cap,
          SafeVariant::post_money_discount, SafeVariant::mfn})
        if (name == to_string(v)) return v;
    return std::nullopt;
}

bool is_pre_money(SafeVariant v) {
    return v == SafeVariant::pre_money_cap || v == SafeVariant::pre_money_discount ||
           v == SafeVariant::pre_money_cap_and_discount;
}

bool is_post_money(SafeVariant v) {
    return v == SafeVariant::post_money_cap || v == SafeVariant::post_money_discount;
}

namespace {

bool uses_cap(SafeVariant v) {
    return v == SafeVariant::pre_money_cap || v == SafeVariant::pre_money_cap_and_discount ||
           v == SafeVariant::post_money_cap;
}

bool uses_discount(SafeVariant v) {
    return v == SafeVariant::pre_money_discount || v == SafeVariant::pre_money_cap_and_discount ||
           v == SafeVariant::post_money_discount;
}

[[noreturn]] void contract_error(const SafeContract& c, const std::string& what) {
    throw std::invalid_argument("contract '" + c.id + "' (" + to_string(c.variant) + "): " + what);
}

const Rational& required_share_price(const CompanyContext& context, const SafeContract& c) {
    if (!context.share_price)
        contract_error(c, "a discount variant needs the company share price");
    if (*context.share_price <= 0)
        throw std::invalid_argument("share price must be positive");
    return *context.share_price;
}

}  // namespace

void validate_contract(const SafeContract& c) {
    if (c.id.empty()) throw std::invalid_argument("contract id must be nonempty");
    if (c.principal <= 0) contract_error(c, "principal must be positive");
    if (uses_cap(c.variant)) {
        if (!c.cap) contract_error(c, "valuation cap is required");
        if (*c.cap <= 0) contract_error(c, "valuation cap must be positive");
    } else if (c.cap) {
        contract_error(c, "valuation cap is not a parameter of this variant");
    }
    if (uses_discount(c.variant)) {
        if (!c.discount_rate) contract_error(c, "discount rate is required");
        if (*c.discount_rate <= 0 || *c.discount_rate > 1)
            contract_error(c, "discount rate must be in (0, 1]");
    } else if (c.discount_rate) {
        contract_error(c, "discount rate is not a parameter of this variant");
    }
    if (c.variant == SafeVariant::post_money_cap && c.principal >= *c.cap)
        contract_error(c, "post-money cap must exceed the principal");
}

namespace {

void validate_portfolio(std::span<const SafeContract> contracts, const CompanyContext& context) {
    if (contracts.empty()) throw std::invalid_argument("portfolio has no contracts");
    if (context.common_shares <= 0)
        throw std::invalid_argument("common share count must be positive");
    if (context.value <= 0) throw std::invalid_argument("distributable value must be positive");
    std::unordered_set<std::string> seen;
    for (const SafeContract& c : contracts) {
        validate_contract(c);
        if (!seen.insert(c.id).second)
            throw std::invalid_argument("duplicate contract id '" + c.id + "'");
        if (c.variant == SafeVariant::mfn)
            contract_error(c,
                           "MFN SAFEs are cashout-only in a liquidity event and play no "
                           "conversion game; treat the principal as a plain cash claim");
    }
}

}  // namespace

CompiledGame compile_game(std::span<const SafeContract> contracts, const CompanyContext& context) {
    validate_portfolio(contracts, context);

    bool any_pre = false, any_post = false, any_cap = false, any_discount = false,
         any_post_cap = false;
    for (const SafeContract& c : contracts) {
        any_pre |= is_pre_money(c.variant);
        any_post |= is_post_money(c.variant);
        any_cap |= uses_cap(c.variant) && is_pre_money(c.variant);
        any_discount |= uses_discount(c.variant);
        any_post_cap |= c.variant == SafeVariant::post_money_cap;
    }
    if (any_pre && any_post)
        throw std::invalid_argument(
            "portfolio mixes pre-money and post-money SAFEs, which does not reduce to a "
            "single liquidity game; use the mixed engine (mixed_payouts / mixed_equilibria)");
    if (any_post_cap && any_discount)
        throw std::invalid_argument(
            "post-money cap and post-money discount SAFEs have incompatible share "
            "equations; use the mixed engine (mixed_payouts / mixed_equilibria)");

    std::vector<std::string> warnings;
    std::vector<Player> players;
    players.reserve(contracts.size());

    if (any_post_cap) {
        for (const SafeContract& c : contracts)
            players.push_back({c.id, c.principal, Rational(0), *c.cap});
        return {LiquidityGame(context.value, Rational(1), std::move(players)),
                std::move(warnings)};
    }

    for (const SafeContract& c : contracts)
        if (c.variant == SafeVariant::pre_money_cap_and_discount)
            warnings.push_back("contract '" + c.id +
                               "': cap-and-discount converts on its cap terms in a "
                               "liquidity event; the discount rate is ignored");

    if (!any_discount) {
        // Pre-money caps only: the share count cancels out of the divisor.
        for (const SafeContract& c : contracts)
            players.push_back({c.id, c.principal, c.principal / *c.cap, *c.cap});
        return {LiquidityGame(context.value, Rational(1), std::move(players)),
                std::move(warnings)};
    }

    if (!any_cap) {
        // Discount only (pre- or post-money, which convert identically).
        for (const SafeContract& c : contracts) {
            Rational price = required_share_price(context, c) * *c.discount_rate;
            players.push_back({c.id, c.principal, c.principal / price, price});
        }
        return {LiquidityGame(context.value, context.common_shares, std::move(players)),
                std::move(warnings)};
    }

    // Pre-money caps and discounts together: work in share counts. Each
    // contract converts to a fixed count x, so alpha = x and gamma = p/x
    // against the common share count as divisor base. Still satisfies
    // principal == gamma * alpha for every player.
    for (const SafeContract& c : contracts) {
        Rational shares = uses_cap(c.variant)
            ? Rational(c.principal * context.common_shares / *c.cap)
            : Rational(c.principal / (required_share_price(context, c) * *c.discount_rate));
        players.push_back({c.id, c.principal, shares, c.principal / shares});
    }
    return {LiquidityGame(context.value, context.common_shares, std::move(players)),
            std::move(warnings)};
}

MixedGame::MixedGame(std::vector<SafeContract> contracts, CompanyContext context)
    : contracts_(std::move(contracts)), context_(std::move(context)) {
    validate_portfolio(contracts_, context_);

    Rational post_cap_total = 0;
    for (const SafeContract& c : contracts_) {
        if (c.variant == SafeVariant::post_money_cap) {
            fixed_count_.push_back(false);
            share_count_.emplace_back(0);
            fraction_.push_back(c.principal / *c.cap);
            post_cap_total += fraction_.back();
        } else {
            fixed_count_.push_back(true);
            share_count_.push_back(
                uses_cap(c.variant)
                    ? Rational(c.principal * context_.common_shares / *c.cap)
                    : Rational(c.principal /
                               (required_share_price(context_, c) * *c.discount_rate)));
            fraction_.emplace_back(0);
        }
    }
    if (post_cap_total >= 1)
        throw std::invalid_argument(
            "post-money cap fractions sum to " + fraction_string(post_cap_total) +
            "; conversion is infeasible unless the sum stays below 1");
}

std::size_t MixedGame::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < contracts_.size(); ++i)
        if (contracts_[i].id == id) return i;
    throw std::invalid_argument("unknown contract id '" + std::string(id) + "'");
}

ConversionShares conversion_shares_converting(const MixedGame& mixed,
                                              const std::vector<bool>& converting) {
    const std::size_t n = mixed.contract_count();
    if (converting.size() != n)
        throw std::invalid_argument("converting flags do not match the contract count");

    Rational fixed_total = 0, fraction_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!converting[i]) continue;
        if (mixed.fixed_count(i))
            fixed_total += mixed.share_count(i);
        else
            fraction_total += mixed.total_fraction(i);
    }

    ConversionShares out;
    out.total_shares = (mixed.context().common_shares + fixed_total) / (1 - fraction_total);
    out.shares.assign(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        if (!converting[i]) continue;
        out.shares[i] = mixed.fixed_count(i) ? mixed.share_count(i)
                                             : Rational(mixed.total_fraction(i) * out.total_shares);
    }
    return out;
}

ConversionShares conversion_shares(const MixedGame& mixed,
                                   std::span<const std::string> converting_ids) {
    std::vector<bool> converting(mixed.contract_count(), false);
    for (const std::string& id : converting_ids) {
        std::size_t index = mixed.index_of(id);
        if (converting[index])
            throw std::invalid_argument("contract id '" + id + "' listed twice");
        converting[index] = true;
    }
    return conversion_shares_converting(mixed, converting);
}

PayoutVector mixed_payouts(const MixedGame& mixed, const StrategyProfile& cashout) {
    const std::size_t n = mixed.contract_count();
    if (cashout.player_count() != n)
        throw std::invalid_argument("profile does not match the contract count");
    const Rational& value = mixed.context().value;

    PayoutVector out(n, Rational(0));
    Rational cash_total = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (cashout.cashes_out(i)) cash_total += mixed.contracts()[i].principal;
    bool shortfall = cash_total > value;
    for (std::size_t i = 0; i < n; ++i)
        if (cashout.cashes_out(i))
            out[i] = shortfall ? Rational(mixed.contracts()[i].principal * value / cash_total)
                               : mixed.contracts()[i].principal;
    if (shortfall) return out;

    Rational residual = value - cash_total;
    if (residual == 0) return out;

    std::vector<bool> converting(n);
    for (std::size_t i = 0; i < n; ++i) converting[i] = !cashout.cashes_out(i);
    ConversionShares shares = conversion_shares_converting(mixed, converting);
    for (std::size_t i = 0; i < n; ++i)
        if (converting[i]) out[i] = shares.shares[i] * residual / shares.total_shares;
    return out;
}

namespace {

// Payout of one contract given the profile totals, so deviation checks can
// avoid recomputing whole vectors. Totals describe the candidate profile:
// cash_total over the cashing side, fixed_total / fraction_total over the
// converting side.
Rational mixed_single_payout(const MixedGame& mixed, std::size_t i, bool cashes,
                             const Rational& cash_total, const Rational& fixed_total,
                             const Rational& fraction_total) {
    const Rational& value = mixed.context().value;
    const Rational& principal = mixed.contracts()[i].principal;
    if (cashes) {
        if (cash_total <= value) return principal;
        return principal * value / cash_total;
    }
    if (cash_total >= value) return Rational(0);
    Rational residual = value - cash_total;
    if (!mixed.fixed_count(i)) return mixed.total_fraction(i) * residual;
    // share / total = x(1 - fractions) / (common + fixed counts)
    return mixed.share_count(i) * (1 - fraction_total) * residual /
           (mixed.context().common_shares + fixed_total);
}

bool mixed_is_nash(const MixedGame& mixed, const StrategyProfile& cashout) {
    const std::size_t n = mixed.contract_count();
    Rational cash_total = 0, fixed_total = 0, fraction_total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cashout.cashes_out(i))
            cash_total += mixed.contracts()[i].principal;
        else if (mixed.fixed_count(i))
            fixed_total += mixed.share_count(i);
        else
            fraction_total += mixed.total_fraction(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        bool cashes = cashout.cashes_out(i);
        Rational here = mixed_single_payout(mixed, i, cashes, cash_total, fixed_total,
                                            fraction_total);
        const Rational& principal = mixed.contracts()[i].principal;
        Rational there;
        if (cashes) {
            there = mixed_single_payout(
                mixed, i, false, cash_total - principal,
                mixed.fixed_count(i) ? Rational(fixed_total + mixed.share_count(i)) : fixed_total,
                mixed.fixed_count(i) ? fraction_total
                                     : Rational(fraction_total + mixed.total_fraction(i)));
        } else {
            there = mixed_single_payout(
                mixed, i, true, cash_total + principal,
                mixed.fixed_count(i) ? Rational(fixed_total - mixed.share_count(i)) : fixed_total,
                mixed.fixed_count(i) ? fraction_total
                                     : Rational(fraction_total - mixed.total_fraction(i)));
        }
        if (there > here) return false;
    }
    return true;
}

}  // namespace

EquilibriumReport mixed_equilibria(const MixedGame& mixed, std::size_t max_players) {
    const std::size_t n = mixed.contract_count();
    if (n > max_players)
        throw SizeLimitError("mixed equilibria: " + std::to_string(n) +
                             " contracts exceed the limit of " + std::to_string(max_players));

    EquilibriumReport report;
    report.method = SolveMethod::brute_force;

    const std::uint64_t profile_count = std::uint64_t{1} << n;
    std::vector<std::uint8_t> hits(profile_count, 0);
#pragma omp parallel for schedule(static)
    for (long long m = 0; m < static_cast<long long>(profile_count); ++m)
        hits[static_cast<std::uint64_t>(m)] =
            mixed_is_nash(mixed, StrategyProfile::from_mask(n, static_cast<std::uint64_t>(m)));
    for (std::uint64_t m = 0; m < profile_count; ++m)
        if (hits[m]) report.equilibria.push_back(StrategyProfile::from_mask(n, m));

    report.exists = !report.equilibria.empty();
    report.optimum_guaranteed = true;
    if (report.exists) {
        std::vector<PayoutVector> pays;
        for (const StrategyProfile& k : report.equilibria) pays.push_back(mixed_payouts(mixed, k));
        for (std::size_t i = 0; i < pays.size(); ++i) {
            bool dominant = true;
            for (std::size_t j = 0; j < pays.size() && dominant; ++j) {
                ProfileOrder order = compare_payouts(pays[j], pays[i]);
                dominant =
                    order == ProfileOrder::first_below || order == ProfileOrder::equivalent;
            }
            if (dominant) {
                report.optimum = report.equilibria[i];
                break;
            }
        }
    } else {
        std::vector<std::string> ids;
        for (const SafeContract& c : mixed.contracts()) ids.push_back(c.id);
        auto cycle = best_response_cycle(
            ids, [&](const StrategyProfile& k) { return mixed_payouts(mixed, k); });
        if (cycle) report.diagnostics.push_back("best-response cycle: " + *cycle);
    }
    return report;
}

}  // namespace liqgame
