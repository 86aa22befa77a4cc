#include "xorhalf/formula.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "xorhalf/errors.hpp"
#include "xorhalf/rng.hpp"

namespace xorhalf {

namespace {

void check_tuple_fits(const KTuple& c, int n, int k, std::size_t index) {
    if (static_cast<int>(c.arity()) != k) {
        throw InvalidInput("tuple " + std::to_string(index) + " has arity " + std::to_string(c.arity()) +
                           ", expected " + std::to_string(k));
    }
    if (c.max_var() > n) {
        throw InvalidInput("tuple " + std::to_string(index) + " references variable " +
                           std::to_string(c.max_var()) + " > n = " + std::to_string(n));
    }
}

void check_bundle_fits(const QKTuple& c, int n, int q, int k, std::size_t index) {
    if (static_cast<int>(c.q()) != q) {
        throw InvalidInput("bundle " + std::to_string(index) + " has " + std::to_string(c.q()) +
                           " blocks, expected " + std::to_string(q));
    }
    for (const auto& block : c.blocks) check_tuple_fits(block, n, k, index);
}

void check_qk_shape(int n, int q, int k) {
    if (n < 1 || k < 1 || k > n) throw InvalidParameter("need 1 <= K <= n");
    if (q < 1 || q % 2 == 0) throw InvalidParameter("q must be odd, got " + std::to_string(q));
}

void check_dimensions(int n, const Assignment& psi) {
    if (psi.size() != n) {
        throw InvalidInput("assignment has length " + std::to_string(psi.size()) + ", formula has n = " +
                           std::to_string(n));
    }
}

// Bit (n - v) holds variable v so that counting up enumerates assignments lexicographically.
struct ParityMask {
    std::uint32_t vars = 0;
    int negations = 0;  // parity of negated literals
};

ParityMask parity_mask(const KTuple& c, int n) {
    ParityMask pm;
    for (const auto& lit : c.literals()) {
        pm.vars |= std::uint32_t{1} << (n - lit.var);
        if (lit.sign < 0) pm.negations ^= 1;
    }
    return pm;
}

// XOR(C(psi)) = +1 iff (#negated + #variables at -1) is even.
inline bool satisfied(const ParityMask& pm, std::uint32_t bits) {
    return ((std::popcount(bits & pm.vars) + pm.negations) & 1) == 0;
}

void check_exhaustive(int n, int limit) {
    if (n > limit || n > 31) {
        throw ResourceLimit("exhaustive search over 2^" + std::to_string(n) + " assignments exceeds limit 2^" +
                            std::to_string(limit));
    }
}

std::vector<int> distinct_vars(Engine& eng, int n, int k) {
    std::vector<int> vars;
    vars.reserve(static_cast<std::size_t>(k));
    while (static_cast<int>(vars.size()) < k) {
        const int v = 1 + static_cast<int>(uniform_below(eng, static_cast<std::uint64_t>(n)));
        if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    return vars;
}

}  // namespace

// ---- types ----------------------------------------------------------------

KTuple::KTuple(std::vector<Literal> literals) : literals_(std::move(literals)) {
    if (literals_.empty()) throw InvalidInput("a K-tuple needs at least one literal");
    for (std::size_t i = 0; i < literals_.size(); ++i) {
        const auto& lit = literals_[i];
        if (lit.var < 1) throw InvalidInput("literal variable must be >= 1");
        if (lit.sign != 1 && lit.sign != -1) throw InvalidInput("literal sign must be +1 or -1");
        for (std::size_t j = 0; j < i; ++j) {
            if (literals_[j].var == lit.var) {
                throw InvalidInput("variable x" + std::to_string(lit.var) + " appears twice in a tuple");
            }
        }
    }
}

int KTuple::max_var() const noexcept {
    int v = 0;
    for (const auto& lit : literals_) v = std::max(v, lit.var);
    return v;
}

KTuple KTuple::with_flipped(std::size_t position) const {
    KTuple out = *this;
    out.literals_.at(position).sign = -out.literals_[position].sign;
    return out;
}

Assignment::Assignment(std::vector<std::int8_t> values) : values_(std::move(values)) {
    for (auto v : values_) {
        if (v != 1 && v != -1) throw InvalidInput("assignment entries must be +1 or -1");
    }
}

Assignment Assignment::all_plus(int n) { return Assignment(std::vector<std::int8_t>(static_cast<std::size_t>(n), 1)); }

Assignment Assignment::from_lex_index(int n, std::uint64_t index) {
    std::vector<std::int8_t> v(static_cast<std::size_t>(n));
    for (int var = 1; var <= n; ++var) {
        v[static_cast<std::size_t>(var - 1)] = ((index >> (n - var)) & 1U) ? -1 : 1;
    }
    return Assignment(std::move(v));
}

XorFormula::XorFormula(int n, int k, std::vector<KTuple> tuples) : n_(n), k_(k), tuples_(std::move(tuples)) {
    if (n < 1 || k < 1 || k > n) throw InvalidParameter("need 1 <= K <= n");
    if (tuples_.empty()) throw InvalidInput("a formula needs at least one tuple");
    for (std::size_t i = 0; i < tuples_.size(); ++i) check_tuple_fits(tuples_[i], n, k, i);
}

QKFormula::QKFormula(int n, int q, int k, std::vector<QKTuple> bundles)
    : n_(n), q_(q), k_(k), bundles_(std::move(bundles)) {
    check_qk_shape(n, q, k);
    for (std::size_t i = 0; i < bundles_.size(); ++i) check_bundle_fits(bundles_[i], n, q, k, i);
}

LabeledQKFormula::LabeledQKFormula(int n, int q, int k, std::vector<LabeledEntry> entries)
    : n_(n), q_(q), k_(k), entries_(std::move(entries)) {
    check_qk_shape(n, q, k);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        check_bundle_fits(entries_[i].tuple, n, q, k, i);
        if (entries_[i].label != 1 && entries_[i].label != -1) throw InvalidInput("labels must be +1 or -1");
    }
}

XorFormula LabeledQKFormula::flatten() const {
    std::vector<KTuple> all;
    all.reserve(entries_.size() * static_cast<std::size_t>(q_));
    for (const auto& e : entries_) {
        for (const auto& b : e.tuple.blocks) all.push_back(b);
    }
    return XorFormula(n_, k_, std::move(all));
}

LabeledQKFormula LabeledQKFormula::with_labels_negated() const {
    auto entries = entries_;
    for (auto& e : entries) e.label = -e.label;
    return LabeledQKFormula(n_, q_, k_, std::move(entries));
}

// ---- evaluation -------------------------------------------------------------

std::vector<std::int8_t> eval_tuple(const KTuple& c, const Assignment& psi) {
    if (c.max_var() > psi.size()) {
        throw InvalidInput("tuple references x" + std::to_string(c.max_var()) + " but the assignment has " +
                           std::to_string(psi.size()) + " variables");
    }
    std::vector<std::int8_t> z(c.arity());
    for (std::size_t i = 0; i < c.arity(); ++i) {
        z[i] = static_cast<std::int8_t>(c[i].sign * psi(c[i].var));
    }
    return z;
}

int xor_value(std::span<const std::int8_t> z) {
    int prod = 1;
    for (auto v : z) {
        if (v != 1 && v != -1) throw InvalidInput("xor_value entries must be +1 or -1");
        prod *= v;
    }
    return prod;
}

int mxor_value(std::span<const std::int8_t> z, int q, int k) {
    if (q < 1 || q % 2 == 0) throw InvalidParameter("MXOR needs odd q, got " + std::to_string(q));
    if (k < 1 || z.size() != static_cast<std::size_t>(q) * static_cast<std::size_t>(k)) {
        throw InvalidInput("MXOR input length must be q*K");
    }
    int votes = 0;
    for (int b = 0; b < q; ++b) {
        votes += xor_value(z.subspan(static_cast<std::size_t>(b * k), static_cast<std::size_t>(k)));
    }
    return votes > 0 ? 1 : -1;
}

int mxor_of(const QKTuple& c, const Assignment& psi) {
    int votes = 0;
    for (const auto& block : c.blocks) votes += xor_value(eval_tuple(block, psi));
    if (c.q() % 2 == 0) throw InvalidParameter("MXOR needs odd q");
    return votes > 0 ? 1 : -1;
}

Fraction val_xor(const XorFormula& j, const Assignment& psi) {
    check_dimensions(j.n(), psi);
    std::int64_t sat = 0;
    for (const auto& c : j.tuples()) {
        if (xor_value(eval_tuple(c, psi)) == 1) ++sat;
    }
    return Fraction(sat, static_cast<std::int64_t>(j.m()));
}

Fraction val_mxor(const QKFormula& j, const Assignment& psi) {
    check_dimensions(j.n(), psi);
    if (j.m() == 0) throw InvalidInput("empty formula has no value");
    std::int64_t sat = 0;
    for (const auto& c : j.bundles()) {
        if (mxor_of(c, psi) == 1) ++sat;
    }
    return Fraction(sat, static_cast<std::int64_t>(j.m()));
}

Fraction val_mxor_labeled(const LabeledQKFormula& j, const Assignment& psi) {
    check_dimensions(j.n(), psi);
    if (j.m() == 0) throw InvalidInput("empty formula has no value");
    std::int64_t sat = 0;
    for (const auto& e : j.entries()) {
        if (mxor_of(e.tuple, psi) == e.label) ++sat;
    }
    return Fraction(sat, static_cast<std::int64_t>(j.m()));
}

ValueResult brute_force_value(const XorFormula& j, int limit) {
    const int n = j.n();
    check_exhaustive(n, limit);
    std::vector<ParityMask> masks;
    masks.reserve(j.m());
    for (const auto& c : j.tuples()) masks.push_back(parity_mask(c, n));

    std::int64_t best = -1;
    std::uint32_t best_bits = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t a = 0; a < total; ++a) {
        const auto bits = static_cast<std::uint32_t>(a);
        std::int64_t sat = 0;
        for (const auto& pm : masks) sat += satisfied(pm, bits) ? 1 : 0;
        if (sat > best) {
            best = sat;
            best_bits = bits;
            if (sat == static_cast<std::int64_t>(masks.size())) break;
        }
    }
    return {Assignment::from_lex_index(n, best_bits), Fraction(best, static_cast<std::int64_t>(j.m()))};
}

ValueResult brute_force_value(const LabeledQKFormula& j, int limit) {
    const int n = j.n();
    check_exhaustive(n, limit);
    if (j.m() == 0) throw InvalidInput("empty formula has no value");
    const auto q = static_cast<std::size_t>(j.q());
    std::vector<ParityMask> masks;
    masks.reserve(j.m() * q);
    for (const auto& e : j.entries()) {
        for (const auto& b : e.tuple.blocks) masks.push_back(parity_mask(b, n));
    }

    std::int64_t best = -1;
    std::uint32_t best_bits = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t a = 0; a < total; ++a) {
        const auto bits = static_cast<std::uint32_t>(a);
        std::int64_t sat = 0;
        for (std::size_t e = 0; e < j.m(); ++e) {
            int votes = 0;
            for (std::size_t b = 0; b < q; ++b) votes += satisfied(masks[e * q + b], bits) ? 1 : -1;
            const int mx = votes > 0 ? 1 : -1;
            if (mx == j.entries()[e].label) ++sat;
        }
        if (sat > best) {
            best = sat;
            best_bits = bits;
            if (sat == static_cast<std::int64_t>(j.m())) break;
        }
    }
    return {Assignment::from_lex_index(n, best_bits), Fraction(best, static_cast<std::int64_t>(j.m()))};
}

// ---- generators -------------------------------------------------------------

XorFormula gen_random_formula(int n, std::size_t m, int k, std::uint64_t seed) {
    if (k < 1 || k > n) throw InvalidParameter("gen_random_formula needs 1 <= K <= n");
    if (m < 1) throw InvalidParameter("gen_random_formula needs m >= 1");
    std::vector<KTuple> tuples;
    tuples.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        auto eng = make_engine(seed, StreamTag::RandomTuple, j);
        const auto vars = distinct_vars(eng, n, k);
        std::vector<Literal> lits;
        lits.reserve(vars.size());
        for (int v : vars) lits.push_back({v, fair_coin(eng) ? -1 : 1});
        tuples.emplace_back(std::move(lits));
    }
    return XorFormula(n, k, std::move(tuples));
}

std::size_t planted_flip_count(const Rational& eta, std::size_t m) {
    if (eta < 0 || eta >= Rational(1, 2)) throw InvalidParameter("noise rate must lie in [0, 1/2)");
    const Rational scaled = eta * Rational(BigInt(m));
    const BigInt floor_value = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
    return floor_value.convert_to<std::size_t>();
}

PlantedInstance gen_planted_formula(int n, std::size_t m, int k, const Rational& eta, std::uint64_t seed) {
    if (k < 1 || k > n) throw InvalidParameter("gen_planted_formula needs 1 <= K <= n");
    if (m < 1) throw InvalidParameter("gen_planted_formula needs m >= 1");
    const std::size_t flips = planted_flip_count(eta, m);

    auto assign_eng = make_engine(seed, StreamTag::PlantedAssignment);
    std::vector<std::int8_t> values(static_cast<std::size_t>(n));
    for (auto& v : values) v = fair_coin(assign_eng) ? -1 : 1;
    Assignment planted(std::move(values));

    std::vector<KTuple> tuples;
    tuples.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        auto eng = make_engine(seed, StreamTag::PlantedTuple, j);
        const auto vars = distinct_vars(eng, n, k);
        std::vector<Literal> lits;
        lits.reserve(vars.size());
        int parity = 1;
        for (std::size_t i = 0; i + 1 < vars.size(); ++i) {
            const int sign = fair_coin(eng) ? -1 : 1;
            parity *= sign * planted(vars[i]);
            lits.push_back({vars[i], sign});
        }
        // last sign forces the product to +1; the sign vector is uniform among satisfying ones
        const int last = vars.back();
        lits.push_back({last, parity * planted(last)});
        tuples.emplace_back(std::move(lits));
    }

    // choose exactly `flips` tuples by a partial Fisher-Yates shuffle
    auto noise_eng = make_engine(seed, StreamTag::PlantedNoise);
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    for (std::size_t i = 0; i < flips; ++i) {
        const auto r = i + static_cast<std::size_t>(uniform_below(noise_eng, m - i));
        std::swap(order[i], order[r]);
    }
    std::vector<std::size_t> flipped(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(flips));
    std::sort(flipped.begin(), flipped.end());
    for (auto idx : flipped) {
        const auto pos = static_cast<std::size_t>(uniform_below(noise_eng, static_cast<std::uint64_t>(k)));
        tuples[idx] = tuples[idx].with_flipped(pos);
    }

    return PlantedInstance{XorFormula(n, k, std::move(tuples)), std::move(planted), eta, std::move(flipped)};
}

}  // namespace xorhalf
