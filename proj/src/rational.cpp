#include "liqgame/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace liqgame {

namespace {

bool is_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

[[noreturn]] void bad_number(std::string_view text) {
    throw std::invalid_argument("not a number (expected integer, decimal or a/b): '" +
                                std::string(text) + "'");
}

}  // namespace

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) bad_number(text);

    mpz_class num, den = 1;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view ns = s.substr(0, slash);
        std::string_view ds = s.substr(slash + 1);
        if (!is_digits(ns) || !is_digits(ds)) bad_number(text);
        num = mpz_class(std::string(ns), 10);
        den = mpz_class(std::string(ds), 10);
        if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view whole = s.substr(0, dot);
        std::string_view frac = s.substr(dot + 1);
        if (whole.empty() && frac.empty()) bad_number(text);
        if (!whole.empty() && !is_digits(whole)) bad_number(text);
        if (!frac.empty() && !is_digits(frac)) bad_number(text);
        num = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole), 10);
        for (char c : frac) {
            num *= 10;
            num += c - '0';
            den *= 10;
        }
    } else {
        if (!is_digits(s)) bad_number(text);
        num = mpz_class(std::string(s), 10);
    }
    if (negative) num = -num;

    Rational r(num, den);
    r.canonicalize();
    return r;
}

std::string fraction_string(const Rational& value) {
    return value.get_str();
}

std::string decimal_string(const Rational& value, int significant_digits) {
    if (significant_digits < 1) throw std::invalid_argument("significant_digits must be >= 1");
    if (value == 0) return "0";

    mpz_class num = abs(value.get_num());
    const mpz_class& den = value.get_den();

    // Exponent e with 10^e <= num/den < 10^(e+1). mpz_sizeinbase may be one
    // high, so start from the digit-count difference and adjust.
    long e = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 10));
    mpz_class pow10;
    auto too_small = [&](long k) {  // num/den < 10^k ?
        if (k >= 0) {
            mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(k));
            return num < den * pow10;
        }
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(-k));
        return num * pow10 < den;
    };
    while (too_small(e)) --e;
    while (!too_small(e + 1)) ++e;

    // Round num/den * 10^(digits-1-e) half to even; result has `digits` digits.
    long shift = significant_digits - 1 - e;
    mpz_class a = num, b = den;
    if (shift >= 0) {
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift));
        a *= pow10;
    } else {
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(-shift));
        b *= pow10;
    }
    mpz_class q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_class twice_r = 2 * r;
    if (twice_r > b || (twice_r == b && mpz_odd_p(q.get_mpz_t())))
        q += 1;

    std::string digits = q.get_str();
    if (static_cast<int>(digits.size()) > significant_digits) {
        // Rounding carried into a new leading digit (e.g. 999.9995 -> 1000.00).
        digits.resize(significant_digits);
        ++e;
    }

    std::string out;
    if (value < 0) out += '-';
    if (e >= significant_digits && e <= 14) {
        out += digits;
        out.append(static_cast<std::size_t>(e - significant_digits + 1), '0');
    } else if (e >= 0 && e < significant_digits) {
        out += digits.substr(0, static_cast<std::size_t>(e + 1));
        if (e + 1 < significant_digits) {
            out += '.';
            out += digits.substr(static_cast<std::size_t>(e + 1));
        }
    } else if (e < 0 && e >= -4) {
        out += "0.";
        out.append(static_cast<std::size_t>(-e - 1), '0');
        out += digits;
    } else {
        out += digits.substr(0, 1);
        if (significant_digits > 1) {
            out += '.';
            out += digits.substr(1);
        }
        out += 'e';
        out += (e < 0 ? '-' : '+');
        std::string mag = std::to_string(e < 0 ? -e : e);
        if (mag.size() < 2) mag.insert(mag.begin(), '0');
        out += mag;
    }
    return out;
}

}  // namespace liqgame
