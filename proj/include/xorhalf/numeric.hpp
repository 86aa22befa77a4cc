#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace xorhalf {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// An exact count ratio `num/den` kept in unreduced form.
///
/// Values such as VAL_psi(J) are naturally "satisfied / m"; keeping the
/// denominator lets reports print them as `a/m` while comparisons are by value.
class Fraction {
public:
    Fraction() = default;
    Fraction(std::int64_t num, std::int64_t den);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }

    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    Rational to_rational() const;

    /// Canonical "a/b" text with the stored (unreduced) denominator.
    std::string str() const;

    friend bool operator==(const Fraction& a, const Fraction& b) noexcept;
    friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) noexcept;

    friend Fraction operator+(const Fraction& a, const Fraction& b);

    /// 1 - f, same denominator.
    Fraction complement() const { return Fraction(den_ - num_, den_); }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Parse "3/8", "0.125", "1e-6", "-2" into an exact rational.
Rational parse_rational(std::string_view text);

/// "p/q" always, including "/1" for integers.
std::string rational_str(const Rational& r);

double to_double(const Rational& r);

/// Exact rational of a finite double (doubles are dyadic).
Rational exact_rational(double x);

}  // namespace xorhalf
