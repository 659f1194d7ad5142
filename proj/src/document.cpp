#include "liqgame/document.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace liqgame {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) { throw ParseError(message); }

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string string_at(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) fail(where + ": missing field '" + key + "'");
    if (!obj.at(key).is_string()) fail(where + ", field '" + key + "': expected a string");
    return obj.at(key).get<std::string>();
}

Rational number_from(const json& value, const std::string& where, const char* key) {
    std::string at = where + ", field '" + std::string(key) + "'";
    if (value.is_string()) {
        try {
            return parse_rational(value.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(at + ": " + e.what());
        }
    }
    if (value.is_number_integer()) return Rational(mpz_class(std::to_string(value.get<std::int64_t>())));
    if (value.is_number_unsigned()) return Rational(mpz_class(std::to_string(value.get<std::uint64_t>())));
    if (value.is_number_float())
        fail(at + ": write non-integer numbers as strings (\"13.5\" or \"27/2\") so they stay exact");
    fail(at + ": expected a number or a number string");
}

Rational number_at(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) fail(where + ": missing field '" + key + "'");
    return number_from(obj.at(key), where, key);
}

std::optional<Rational> optional_number_at(const json& obj, const char* key,
                                           const std::string& where) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return number_from(obj.at(key), where, key);
}

LiquidityGame parse_game_section(const json& g) {
    if (!g.is_object()) fail("'game' must be an object");
    Rational value = number_at(g, "V", "game");
    Rational beta = number_at(g, "beta", "game");
    if (value <= 0) fail("game, field 'V': must be positive");
    if (beta <= 0) fail("game, field 'beta': must be positive");
    if (!g.contains("players") || !g.at("players").is_array() || g.at("players").empty())
        fail("game: 'players' must be a nonempty array");

    std::vector<Player> players;
    for (const json& pj : g.at("players")) {
        if (!pj.is_object()) fail("game: each player must be an object");
        std::string id = string_at(pj, "id", "player");
        if (id.empty()) fail("player: 'id' must be nonempty");
        std::string where = "player '" + id + "'";
        Rational principal = number_at(pj, "p", where);
        Rational alpha = number_at(pj, "alpha", where);
        Rational gamma = number_at(pj, "gamma", where);
        if (principal <= 0) fail(where + ", field 'p': must be positive");
        if (gamma <= 0) fail(where + ", field 'gamma': must be positive");
        if (alpha < 0) fail(where + ", field 'alpha': must be nonnegative");
        players.push_back({std::move(id), std::move(principal), std::move(alpha), std::move(gamma)});
    }
    try {
        return LiquidityGame(std::move(value), std::move(beta), std::move(players));
    } catch (const std::invalid_argument& e) {
        fail(std::string("game: ") + e.what());
    }
}

Portfolio parse_portfolio_section(const json& pf) {
    if (!pf.is_object()) fail("'portfolio' must be an object");
    if (!pf.contains("context") || !pf.at("context").is_object())
        fail("portfolio: missing 'context' object");
    const json& ctx = pf.at("context");

    Portfolio out;
    out.context.common_shares = number_at(ctx, "common_shares", "context");
    out.context.share_price = optional_number_at(ctx, "share_price", "context");
    out.context.value = number_at(ctx, "V", "context");
    if (out.context.common_shares <= 0) fail("context, field 'common_shares': must be positive");
    if (out.context.value <= 0) fail("context, field 'V': must be positive");
    if (out.context.share_price && *out.context.share_price <= 0)
        fail("context, field 'share_price': must be positive");

    if (!pf.contains("safes") || !pf.at("safes").is_array() || pf.at("safes").empty())
        fail("portfolio: 'safes' must be a nonempty array");
    std::unordered_set<std::string> seen;
    for (const json& sj : pf.at("safes")) {
        if (!sj.is_object()) fail("portfolio: each safe must be an object");
        SafeContract c;
        c.id = string_at(sj, "id", "safe");
        if (!seen.insert(c.id).second) fail("portfolio: duplicate contract id '" + c.id + "'");
        std::string where = "safe '" + c.id + "'";
        std::string variant = string_at(sj, "variant", where);
        auto v = safe_variant_from_string(variant);
        if (!v)
            fail(where + ", field 'variant': unknown variant '" + variant +
                 "' (expected pre_money_cap, pre_money_discount, pre_money_cap_and_discount, "
                 "post_money_cap, post_money_discount or mfn)");
        c.variant = *v;
        c.principal = number_at(sj, "principal", where);
        c.cap = optional_number_at(sj, "cap", where);
        c.discount_rate = optional_number_at(sj, "discount_rate", where);
        try {
            validate_contract(c);
        } catch (const std::invalid_argument& e) {
            fail(std::string("portfolio: ") + e.what());
        }
        out.safes.push_back(std::move(c));
    }
    return out;
}

}  // namespace

GameDocument parse_game_document(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte);
        fail("JSON parse error at line " + std::to_string(line) + ", column " +
             std::to_string(col) + ": " + e.what());
    }
    if (!root.is_object()) fail("top level must be a JSON object");

    GameDocument doc;
    if (root.contains("schema_version")) {
        if (!root.at("schema_version").is_string()) fail("'schema_version' must be a string");
        doc.schema_version = root.at("schema_version").get<std::string>();
    }
    bool has_game = root.contains("game");
    bool has_portfolio = root.contains("portfolio");
    if (has_game == has_portfolio)
        fail("document must contain exactly one of 'game' or 'portfolio'");
    if (has_game)
        doc.game.emplace(parse_game_section(root.at("game")));
    else
        doc.portfolio.emplace(parse_portfolio_section(root.at("portfolio")));
    return doc;
}

std::string serialize_game_document(const GameDocument& doc) {
    json root;
    root["schema_version"] = doc.schema_version;
    if (doc.game) {
        json g;
        g["V"] = fraction_string(doc.game->value());
        g["beta"] = fraction_string(doc.game->beta());
        g["players"] = json::array();
        for (const Player& p : doc.game->players()) {
            json pj;
            pj["id"] = p.id;
            pj["p"] = fraction_string(p.principal);
            pj["alpha"] = fraction_string(p.alpha);
            pj["gamma"] = fraction_string(p.gamma);
            g["players"].push_back(std::move(pj));
        }
        root["game"] = std::move(g);
    } else if (doc.portfolio) {
        json pf;
        json ctx;
        ctx["common_shares"] = fraction_string(doc.portfolio->context.common_shares);
        if (doc.portfolio->context.share_price)
            ctx["share_price"] = fraction_string(*doc.portfolio->context.share_price);
        ctx["V"] = fraction_string(doc.portfolio->context.value);
        pf["context"] = std::move(ctx);
        pf["safes"] = json::array();
        for (const SafeContract& c : doc.portfolio->safes) {
            json sj;
            sj["id"] = c.id;
            sj["variant"] = to_string(c.variant);
            sj["principal"] = fraction_string(c.principal);
            if (c.cap) sj["cap"] = fraction_string(*c.cap);
            if (c.discount_rate) sj["discount_rate"] = fraction_string(*c.discount_rate);
            pf["safes"].push_back(std::move(sj));
        }
        root["portfolio"] = std::move(pf);
    }
    return root.dump(2) + "\n";
}

namespace {

json rational_json(const Rational& x) {
    json out;
    out["exact"] = fraction_string(x);
    out["approx"] = decimal_string(x);
    return out;
}

json validation_json(const ValidationReport& v) {
    json out;
    out["valid"] = v.valid;
    out["solvable"] = v.solvable;
    out["violations"] = json::array();
    for (const Violation& violation : v.violations) {
        json vj;
        vj["condition"] = violation.condition;
        vj["subject"] = violation.subject;
        vj["detail"] = violation.detail;
        out["violations"].push_back(std::move(vj));
    }
    return out;
}

std::string cashout_set_string(const std::vector<std::string>& ids) {
    std::string out = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ",";
        out += ids[i];
    }
    return out + "}";
}

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (row.size() > widths.size()) widths.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());
    }
    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            line += row[c];
            if (c + 1 < row.size())
                line.append(widths[c] - row[c].size() + 2, ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out += '\n';
    }
    return out;
}

std::string value_cell(const Rational& x) {
    return fraction_string(x) + " (" + decimal_string(x) + ")";
}

// Everything solve_report needs from either engine.
struct SolveContext {
    std::optional<LiquidityGame> game;    // empty when the mixed engine ran
    std::optional<MixedGame> mixed;
    ValidationReport validation;
    std::string classification;
    std::vector<std::string> lead_diagnostics;  // compile warnings

    std::vector<std::string> player_ids() const {
        std::vector<std::string> ids;
        if (game)
            for (const Player& p : game->players()) ids.push_back(p.id);
        else
            for (const SafeContract& c : mixed->contracts()) ids.push_back(c.id);
        return ids;
    }
    PayoutVector payouts_of(const StrategyProfile& k) const {
        return game ? payouts(*game, k) : mixed_payouts(*mixed, k);
    }
    std::vector<std::string> ids_of(const StrategyProfile& k) const {
        std::vector<std::string> all = player_ids(), out;
        for (std::size_t i = 0; i < all.size(); ++i)
            if (k.cashes_out(i)) out.push_back(all[i]);
        return out;
    }
};

bool needs_mixed_engine(const Portfolio& p) {
    bool pre = false, post_cap = false, post_discount = false;
    for (const SafeContract& c : p.safes) {
        pre |= is_pre_money(c.variant);
        post_cap |= c.variant == SafeVariant::post_money_cap;
        post_discount |= c.variant == SafeVariant::post_money_discount;
    }
    return (pre && (post_cap || post_discount)) || (post_cap && post_discount);
}

// Resolves a document to a solvable engine. Throws std::invalid_argument on
// portfolios that cannot be set up at all (MFN, infeasible fractions, ...).
SolveContext resolve(const GameDocument& doc) {
    SolveContext ctx;
    if (doc.game) {
        ctx.game = *doc.game;
        ctx.validation = validate_game(*ctx.game);
        ctx.classification = to_string(classify_game(*ctx.game));
        return ctx;
    }
    const Portfolio& portfolio = *doc.portfolio;
    if (needs_mixed_engine(portfolio)) {
        ctx.mixed.emplace(portfolio.safes, portfolio.context);
        ctx.validation.valid = true;
        ctx.validation.solvable = true;  // not meaningful for the mixed engine
        ctx.classification = "mixed";
        return ctx;
    }
    CompiledGame compiled = compile_game(portfolio.safes, portfolio.context);
    ctx.game = std::move(compiled.game);
    ctx.lead_diagnostics = std::move(compiled.warnings);
    ctx.validation = validate_game(*ctx.game);
    ctx.classification = to_string(classify_game(*ctx.game));
    return ctx;
}

}  // namespace

Report validate_report(const GameDocument& doc) {
    Report report;
    json out;
    out["schema_version"] = "1";

    ValidationReport validation;
    std::string classification = "unknown";
    try {
        SolveContext ctx = resolve(doc);
        validation = ctx.validation;
        classification = ctx.classification;
    } catch (const std::invalid_argument& e) {
        validation.valid = false;
        validation.solvable = false;
        validation.violations.push_back({"portfolio", {}, e.what()});
    }
    out["validation"] = validation_json(validation);
    out["classification"] = classification;
    report.valid = validation.valid;
    report.json = out.dump(2) + "\n";

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"valid:", validation.valid ? "yes" : "no"});
    rows.push_back({"solvable:", validation.solvable ? "yes" : "no"});
    rows.push_back({"classification:", classification});
    for (const Violation& v : validation.violations)
        rows.push_back({"violation:", v.condition + " " + cashout_set_string(v.subject), v.detail});
    report.table = render_table(rows);
    return report;
}

Report solve_report(const GameDocument& doc, const ReportOptions& options) {
    SolveContext ctx = resolve(doc);
    if (ctx.game && !ctx.validation.valid) {
        std::string detail = ctx.validation.violations.empty()
                                 ? std::string("validation failed")
                                 : ctx.validation.violations.front().detail;
        throw std::invalid_argument("invalid game: " + detail);
    }

    EquilibriumReport eq;
    if (ctx.mixed) {
        eq = mixed_equilibria(*ctx.mixed, options.brute_force_limit);
    } else if (options.force_brute_force) {
        eq = brute_force_solve(*ctx.game, options.brute_force_limit);
    } else {
        eq = classify_and_solve(*ctx.game, options.brute_force_limit);
    }

    std::vector<std::string> diagnostics = ctx.lead_diagnostics;
    diagnostics.insert(diagnostics.end(), eq.diagnostics.begin(), eq.diagnostics.end());

    const std::vector<std::string> all_ids = ctx.player_ids();

    json out;
    out["schema_version"] = "1";
    out["validation"] = validation_json(ctx.validation);
    if (ctx.mixed) out["validation"]["solvable"] = nullptr;
    out["classification"] = ctx.classification;
    out["method"] = to_string(eq.method);
    out["exists"] = eq.exists;

    out["equilibria"] = json::array();
    for (const StrategyProfile& k : eq.equilibria) {
        json ej;
        ej["cashout_ids"] = ctx.ids_of(k);
        PayoutVector pay = ctx.payouts_of(k);
        json payj;
        for (std::size_t i = 0; i < all_ids.size(); ++i) payj[all_ids[i]] = rational_json(pay[i]);
        ej["payouts"] = std::move(payj);
        if (ctx.game)
            ej["g"] = rational_json(residual_per_divisor(*ctx.game, k));
        else
            ej["g"] = nullptr;
        ej["is_optimum"] = eq.optimum && *eq.optimum == k;
        out["equilibria"].push_back(std::move(ej));
    }

    if (eq.optimum)
        out["optimum"] = ctx.ids_of(*eq.optimum);
    else
        out["optimum"] = nullptr;
    out["optimum_guaranteed"] = eq.optimum_guaranteed;

    out["families"] = json::array();
    for (const EquilibriumFamily& family : eq.families) {
        json fj;
        fj["base_ids"] = ctx.ids_of(family.base);
        json free_ids = json::array();
        for (std::size_t i : family.free_players) free_ids.push_back(all_ids[i]);
        fj["free_ids"] = std::move(free_ids);
        fj["size"] = fraction_string(family.member_count);
        if (options.expand_families_cap) {
            json members = json::array();
            for (const StrategyProfile& member :
                 expand_family(family, *options.expand_families_cap))
                members.push_back(ctx.ids_of(member));
            fj["members"] = std::move(members);
        }
        out["families"].push_back(std::move(fj));
    }

    out["diagnostics"] = diagnostics;

    Report report;
    report.valid = ctx.validation.valid;
    report.equilibrium_exists = eq.exists;
    report.json = out.dump(2) + "\n";

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"classification:", ctx.classification});
    rows.push_back({"method:", to_string(eq.method)});
    rows.push_back({"solvable:", ctx.mixed ? "-" : (ctx.validation.solvable ? "yes" : "no")});
    rows.push_back({"exists:", eq.exists ? "yes" : "no"});
    rows.push_back({"optimum:", eq.optimum ? cashout_set_string(ctx.ids_of(*eq.optimum)) : "none",
                    eq.optimum_guaranteed ? "(covers every equilibrium)" : "(threshold candidates only)"});
    rows.push_back({});
    std::vector<std::string> header = {"cashout", "g"};
    for (const std::string& id : all_ids) header.push_back(id);
    header.push_back("optimum");
    rows.push_back(header);
    for (const StrategyProfile& k : eq.equilibria) {
        std::vector<std::string> row;
        row.push_back(cashout_set_string(ctx.ids_of(k)));
        row.push_back(ctx.game ? value_cell(residual_per_divisor(*ctx.game, k)) : "-");
        for (const Rational& x : ctx.payouts_of(k)) row.push_back(value_cell(x));
        row.push_back(eq.optimum && *eq.optimum == k ? "*" : "");
        rows.push_back(std::move(row));
    }
    for (const EquilibriumFamily& family : eq.families) {
        std::vector<std::string> free_ids;
        for (std::size_t i : family.free_players) free_ids.push_back(all_ids[i]);
        rows.push_back({"family:", cashout_set_string(ctx.ids_of(family.base)) + " + any subset of " +
                                       cashout_set_string(free_ids),
                        fraction_string(family.member_count) + " members"});
    }
    for (const std::string& d : diagnostics) rows.push_back({"note:", d});
    report.table = render_table(rows);
    return report;
}

Report matrix_report(const GameDocument& doc, std::size_t max_players) {
    SolveContext ctx = resolve(doc);
    if (ctx.game && !ctx.validation.valid) {
        std::string detail = ctx.validation.violations.empty()
                                 ? std::string("validation failed")
                                 : ctx.validation.violations.front().detail;
        throw std::invalid_argument("invalid game: " + detail);
    }

    const std::vector<std::string> all_ids = ctx.player_ids();
    const std::size_t n = all_ids.size();
    if (n > max_players)
        throw SizeLimitError("matrix: " + std::to_string(n) + " players exceed the limit of " +
                             std::to_string(max_players));

    Report report;
    if (n > 5)
        report.stderr_notes.push_back("warning: " + std::to_string(n) + " players produce " +
                                      std::to_string(std::uint64_t{1} << n) + " matrix rows");

    json out;
    out["schema_version"] = "1";
    out["players"] = all_ids;
    out["profiles"] = json::array();

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header = {"cashout"};
    for (const std::string& id : all_ids) header.push_back(id);
    rows.push_back(header);

    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        StrategyProfile k = StrategyProfile::from_mask(n, m);
        PayoutVector pay = ctx.payouts_of(k);
        json pj;
        pj["cashout_ids"] = ctx.ids_of(k);
        json payj;
        for (std::size_t i = 0; i < n; ++i) payj[all_ids[i]] = rational_json(pay[i]);
        pj["payouts"] = std::move(payj);
        out["profiles"].push_back(std::move(pj));

        std::vector<std::string> row = {cashout_set_string(ctx.ids_of(k))};
        for (const Rational& x : pay) row.push_back(value_cell(x));
        rows.push_back(std::move(row));
    }

    report.json = out.dump(2) + "\n";
    report.table = render_table(rows);
    return report;
}

}  // namespace liqgame
