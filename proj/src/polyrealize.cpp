#include "xorhalf/polyrealize.hpp"

#include <cmath>
#include <limits>

#include "xorhalf/errors.hpp"

namespace xorhalf {

UnivariatePoly::UnivariatePoly(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational UnivariatePoly::coefficient(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return 0;
    return coeffs_[static_cast<std::size_t>(k)];
}

Rational UnivariatePoly::operator()(const Rational& t) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

std::string UnivariatePoly::str() const {
    if (coeffs_.empty()) return "0/1";
    std::string s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (i) s += ' ';
        s += rational_str(coeffs_[i]);
    }
    return s;
}

UnivariatePoly lagrange_interpolate(std::span<const Rational> xs, std::span<const Rational> ys) {
    if (xs.size() != ys.size() || xs.empty()) throw InvalidInput("interpolation needs matching, nonempty node lists");
    const std::size_t count = xs.size();
    std::vector<Rational> result(count, Rational(0));
    for (std::size_t i = 0; i < count; ++i) {
        // basis_i(t) = prod_{j != i} (t - x_j) / (x_i - x_j), built in ascending coefficients
        std::vector<Rational> basis{Rational(1)};
        Rational denom = 1;
        for (std::size_t j = 0; j < count; ++j) {
            if (j == i) continue;
            if (xs[i] == xs[j]) throw InvalidInput("interpolation nodes must be distinct");
            std::vector<Rational> next(basis.size() + 1, Rational(0));
            for (std::size_t c = 0; c < basis.size(); ++c) {
                next[c + 1] += basis[c];
                next[c] -= basis[c] * xs[j];
            }
            basis = std::move(next);
            denom *= xs[i] - xs[j];
        }
        const Rational scale = ys[i] / denom;
        for (std::size_t c = 0; c < basis.size(); ++c) result[c] += basis[c] * scale;
    }
    return UnivariatePoly(std::move(result));
}

int lambda_sum(std::span<const std::int8_t> z) {
    int s = 0;
    for (auto v : z) {
        if (v != 1 && v != -1) throw InvalidInput("lambda_sum entries must be +1 or -1");
        s += v;
    }
    return s;
}

int XorRealization::xor_at_sum(int k, int s) {
    // (K - s)/2 coordinates equal -1
    const int negatives = (k - s) / 2;
    return (negatives % 2 == 0) ? 1 : -1;
}

XorRealization interpolate_xor_poly(int k, int d) {
    if (d < 1) throw InvalidParameter("interpolate_xor_poly needs d >= 1");
    if (k < 1 || d > k) throw InvalidParameter("interpolate_xor_poly needs 1 <= d <= K");
    XorRealization real;
    real.k = k;
    real.d = d;
    std::vector<Rational> xs;
    std::vector<Rational> ys;
    for (int s = -d; s <= d; ++s) {
        if (((k - s) % 2 + 2) % 2 != 0) continue;
        real.node_set.push_back(s);
        xs.emplace_back(s);
        ys.emplace_back(XorRealization::xor_at_sum(k, s));
    }
    real.qpoly = lagrange_interpolate(xs, ys);
    return real;
}

double kl_bernoulli(double a, double b) {
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
        throw InvalidParameter("kl_bernoulli arguments must lie in [0, 1]");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    if (a > 0.0) total += (b == 0.0) ? inf : a * std::log(a / b);
    if (a < 1.0) total += (b == 1.0) ? inf : (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    return total;
}

Bound xor_disagreement_bound(int k, int d, double mu) {
    if (d < 1) throw PreconditionError("xor_disagreement_bound: d must be >= 1");
    if (d > k) throw PreconditionError("xor_disagreement_bound: d <= K fails (d = " + std::to_string(d) +
                                       ", K = " + std::to_string(k) + ")");
    if (mu < 0) throw PreconditionError("xor_disagreement_bound: mu must be >= 0");
    const double lhs = k * std::ldexp(1.0, d) * mu / d;
    if (!(lhs < d)) {
        throw PreconditionError("xor_disagreement_bound: K 2^d mu / d < d fails (" + std::to_string(lhs) +
                                " >= " + std::to_string(d) + ")");
    }
    const double a = 0.5 + static_cast<double>(d) / (2.0 * k);
    const double b = 0.5 + std::ldexp(1.0, d - 1) * mu / d;
    Bound out;
    out.log_value = std::log(2.0) - kl_bernoulli(a, b) * k;
    out.value = std::exp(out.log_value);
    out.vacuous = out.value >= 1.0;
    return out;
}

namespace {

BigInt binomial(int n, int r) {
    BigInt c = 1;
    for (int i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
    return c;
}

}  // namespace

Rational uniform_unbalanced_probability(int k, int d) {
    BigInt hits = 0;
    for (int neg = 0; neg <= k; ++neg) {
        if (std::abs(k - 2 * neg) > d) hits += binomial(k, neg);
    }
    return Rational(hits, BigInt(1) << k);
}

Rational uniform_disagreement(const XorRealization& real) {
    BigInt hits = 0;
    for (int neg = 0; neg <= real.k; ++neg) {
        const int s = real.k - 2 * neg;
        if (real.qpoly(s) != XorRealization::xor_at_sum(real.k, s)) hits += binomial(real.k, neg);
    }
    return Rational(hits, BigInt(1) << real.k);
}

Fraction agreement_on_formula(const XorFormula& j, const Assignment& psi, const XorRealization& real) {
    if (psi.size() != j.n()) throw InvalidInput("assignment length does not match formula");
    if (real.k != j.k()) throw InvalidInput("realization arity does not match formula K");
    // tabulate qpoly on the reachable sums once
    std::vector<Rational> table(static_cast<std::size_t>(2 * real.k + 1));
    for (int s = -real.k; s <= real.k; ++s) table[static_cast<std::size_t>(s + real.k)] = real.qpoly(s);
    std::int64_t agree = 0;
    for (const auto& c : j.tuples()) {
        const auto z = eval_tuple(c, psi);
        const int s = lambda_sum(z);
        if (table[static_cast<std::size_t>(s + real.k)] == xor_value(z)) ++agree;
    }
    return Fraction(agree, static_cast<std::int64_t>(j.m()));
}

}  // namespace xorhalf
