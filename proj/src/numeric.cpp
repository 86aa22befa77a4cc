#include "xorhalf/numeric.hpp"

#include <cmath>
#include <limits>

#include "xorhalf/errors.hpp"

namespace xorhalf {

Fraction::Fraction(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den <= 0) {
        throw InvalidInput("fraction denominator must be positive");
    }
}

Rational Fraction::to_rational() const { return Rational(BigInt(num_), BigInt(den_)); }

std::string Fraction::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

bool operator==(const Fraction& a, const Fraction& b) noexcept {
    return static_cast<__int128>(a.num_) * b.den_ == static_cast<__int128>(b.num_) * a.den_;
}

std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) noexcept {
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Fraction operator+(const Fraction& a, const Fraction& b) {
    if (a.den_ == b.den_) return Fraction(a.num_ + b.num_, a.den_);
    return Fraction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

namespace {

BigInt pow10(unsigned e) {
    BigInt r = 1;
    for (unsigned i = 0; i < e; ++i) r *= 10;
    return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw InvalidInput("not a rational number: '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        const std::string num(text.substr(0, slash));
        const std::string den(text.substr(slash + 1));
        if (num.empty() || den.empty()) return fail();
        try {
            BigInt n(num);
            BigInt d(den);
            if (d == 0) return fail();
            return Rational(n, d);
        } catch (const std::exception&) {
            return fail();
        }
    }

    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    BigInt mantissa = 0;
    long exponent = 0;
    bool any_digit = false;
    bool seen_dot = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (c >= '0' && c <= '9') {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_dot) --exponent;
            any_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit) return fail();
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') return fail();
        ++pos;
        bool exp_negative = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_negative = text[pos] == '-';
            ++pos;
        }
        long e = 0;
        bool exp_digit = false;
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c < '0' || c > '9') return fail();
            e = e * 10 + (c - '0');
            if (e > 4000) return fail();
            exp_digit = true;
        }
        if (!exp_digit) return fail();
        exponent += exp_negative ? -e : e;
    }
    Rational r = exponent >= 0 ? Rational(mantissa * pow10(static_cast<unsigned>(exponent)))
                               : Rational(mantissa, pow10(static_cast<unsigned>(-exponent)));
    return negative ? Rational(-r) : r;
}

std::string rational_str(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational exact_rational(double x) {
    if (!std::isfinite(x)) throw InvalidInput("cannot represent a non-finite value exactly");
    int exp = 0;
    const double frac = std::frexp(x, &exp);
    // frac * 2^53 is an integer for every finite double.
    const auto scaled = static_cast<std::int64_t>(std::ldexp(frac, 53));
    exp -= 53;
    const BigInt mant = scaled;
    const BigInt p = BigInt(1) << std::abs(exp);
    return exp >= 0 ? Rational(mant * p) : Rational(mant, p);
}

}  // namespace xorhalf
