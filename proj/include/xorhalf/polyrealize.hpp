#pragma once

#include <span>
#include <string>
#include <vector>

#include "xorhalf/formula.hpp"
#include "xorhalf/numeric.hpp"
#include "xorhalf/pseudorandom.hpp"

namespace xorhalf {

/// Exact univariate polynomial, coefficients in ascending degree.
class UnivariatePoly {
public:
    UnivariatePoly() = default;
    explicit UnivariatePoly(std::vector<Rational> coefficients);

    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }
    /// Coefficient of t^k (zero past the degree).
    Rational coefficient(int k) const;

    Rational operator()(const Rational& t) const;
    Rational operator()(long long t) const { return (*this)(Rational(t)); }

    /// "c0 c1 ... cd" as exact "p/q" tokens.
    std::string str() const;

    friend bool operator==(const UnivariatePoly&, const UnivariatePoly&) = default;

private:
    std::vector<Rational> coeffs_;  // trimmed: last entry nonzero
};

/// Lagrange interpolation through (x_i, y_i); x_i distinct.
UnivariatePoly lagrange_interpolate(std::span<const Rational> xs, std::span<const Rational> ys);

/// Sum of a +-1 vector.
int lambda_sum(std::span<const std::int8_t> z);

/// qpoly with qpoly(s) = XOR value at coordinate sum s for every admissible
/// s in [-d, d] (s = K mod 2). qpoly(Lambda(z)) = XOR(z) whenever |Lambda(z)| <= d.
struct XorRealization {
    int k = 0;
    int d = 0;
    UnivariatePoly qpoly;
    std::vector<int> node_set;

    /// XOR value determined by the coordinate sum: (-1)^{(K-s)/2}.
    static int xor_at_sum(int k, int s);

    /// qpoly(Lambda(z)).
    Rational evaluate(std::span<const std::int8_t> z) const { return qpoly(lambda_sum(z)); }
};

XorRealization interpolate_xor_poly(int k, int d);

/// a ln(a/b) + (1-a) ln((1-a)/(1-b)) with 0 ln 0 = 0; +inf when b is at an
/// endpoint the mass of a cannot follow.
double kl_bernoulli(double a, double b);

/// 2 exp(-D(1/2 + d/2K, 1/2 + 2^{d-1} mu / d) K). Requires K 2^d mu / d < d <= K.
Bound xor_disagreement_bound(int k, int d, double mu);

/// Pr_{z uniform}(|Lambda(z)| > d), by binomial enumeration.
Rational uniform_unbalanced_probability(int k, int d);

/// Pr_{z uniform}(qpoly(Lambda(z)) != XOR(z)), by binomial enumeration.
Rational uniform_disagreement(const XorRealization& real);

/// Fraction of J's tuples where qpoly(Lambda(C(psi))) == XOR(C(psi)).
Fraction agreement_on_formula(const XorFormula& j, const Assignment& psi, const XorRealization& real);

}  // namespace xorhalf
