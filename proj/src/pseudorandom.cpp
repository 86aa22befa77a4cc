#include "xorhalf/pseudorandom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "xorhalf/errors.hpp"

namespace xorhalf {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

std::vector<std::vector<int>> combinations(int k, int t) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(cur.size()) == t) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < k; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

inline std::uint64_t literal_code(const Literal& lit) {
    return 2 * static_cast<std::uint64_t>(lit.var - 1) + (lit.sign < 0 ? 1 : 0);
}

inline Literal code_literal(std::uint64_t code) {
    return {static_cast<int>(code / 2) + 1, (code & 1U) ? -1 : 1};
}

// key = sum code_i * base^{t-1-i}: lexicographic order on codes is numeric order on keys.
std::uint64_t key_of(const KTuple& c, const std::vector<int>& support, std::uint64_t base) {
    std::uint64_t key = 0;
    for (int pos : support) key = key * base + literal_code(c[static_cast<std::size_t>(pos)]);
    return key;
}

PartialKTuple decode(std::uint64_t key, const std::vector<int>& support, std::uint64_t base, int k) {
    PartialKTuple p;
    p.k = k;
    p.slots.assign(static_cast<std::size_t>(k), Literal{0, 1});
    for (auto it = support.rbegin(); it != support.rend(); ++it) {
        p.slots[static_cast<std::size_t>(*it)] = code_literal(key % base);
        key /= base;
    }
    return p;
}

// Visits every sequence of `len` literal codes over distinct variables in
// increasing key order until `visit` returns false.
void enumerate_keys(int n, int len, const std::function<bool(std::uint64_t)>& visit) {
    const auto base = static_cast<std::uint64_t>(2 * n);
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    bool stop = false;
    std::function<void(int, std::uint64_t)> rec = [&](int depth, std::uint64_t key) {
        if (stop) return;
        if (depth == len) {
            if (!visit(key)) stop = true;
            return;
        }
        for (std::uint64_t code = 0; code < base && !stop; ++code) {
            const auto var = static_cast<std::size_t>(code / 2);
            if (used[var]) continue;
            used[var] = 1;
            rec(depth + 1, key * base + code);
            used[var] = 0;
        }
    };
    rec(0, 0);
}

i128 abs128(i128 x) { return x < 0 ? -x : x; }

BigInt to_big(i128 x) {
    const bool neg = x < 0;
    u128 u = neg ? static_cast<u128>(-x) : static_cast<u128>(x);
    BigInt r = 0;
    BigInt shift = 1;
    while (u != 0) {
        r += shift * static_cast<std::uint64_t>(u & 0xffffffffULL);
        shift <<= 32;
        u >>= 32;
    }
    return neg ? BigInt(-r) : r;
}

// Deviation |count/m - 1/N| = |count*N - m| / (m*N).
struct Candidate {
    i128 numerator = -1;  // -1 = none yet
    std::uint64_t key = 0;
};

void offer(Candidate& best, i128 numerator, std::uint64_t key) {
    if (numerator > best.numerator || (numerator == best.numerator && key < best.key)) {
        best.numerator = numerator;
        best.key = key;
    }
}

}  // namespace

// ---- partial tuples -------------------------------------------------------------

PartialKTuple PartialKTuple::restrict(const KTuple& c, const std::vector<int>& support) {
    PartialKTuple p;
    p.k = static_cast<int>(c.arity());
    p.slots.assign(c.arity(), Literal{0, 1});
    for (int pos : support) p.slots.at(static_cast<std::size_t>(pos)) = c[static_cast<std::size_t>(pos)];
    return p;
}

std::vector<int> PartialKTuple::support() const {
    std::vector<int> s;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].var != 0) s.push_back(static_cast<int>(i));
    }
    return s;
}

int PartialKTuple::size() const { return static_cast<int>(support().size()); }

std::string PartialKTuple::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (i) s += ",";
        if (slots[i].var == 0) {
            s += "*";
        } else {
            s += (slots[i].sign > 0 ? "+x" : "-x") + std::to_string(slots[i].var);
        }
    }
    return s + ")";
}

BigInt partial_tuple_count(int n, int t) {
    if (t < 0 || n < 0 || t > n) throw InvalidParameter("partial_tuple_count needs 0 <= t <= n");
    BigInt count = 1;
    for (int i = 0; i < t; ++i) count *= 2 * (n - i);
    return count;
}

Rational uniform_partial_frequency(int n, int t) { return Rational(BigInt(1), partial_tuple_count(n, t)); }

Fraction frequency(const XorFormula& j, const PartialKTuple& p) {
    if (p.k != j.k() || p.slots.size() != static_cast<std::size_t>(j.k())) {
        throw InvalidInput("partial tuple arity " + std::to_string(p.k) + " does not match K = " + std::to_string(j.k()));
    }
    for (const auto& lit : p.slots) {
        if (lit.var > j.n()) throw InvalidInput("partial tuple references a variable beyond n");
    }
    std::int64_t hits = 0;
    for (const auto& c : j.tuples()) {
        bool match = true;
        for (std::size_t i = 0; i < p.slots.size() && match; ++i) {
            if (p.slots[i].var != 0 && !(c[i] == p.slots[i])) match = false;
        }
        if (match) ++hits;
    }
    return Fraction(hits, static_cast<std::int64_t>(j.m()));
}

std::string strategy_name(FrequencyStrategy s) { return s == FrequencyStrategy::Exact ? "exact" : "streaming"; }

FrequencyReport pseudorandom_test(const XorFormula& j, int t, const Rational& tau, const FrequencyOptions& opts) {
    const int n = j.n();
    const int k = j.k();
    if (t < 0 || t > k) throw InvalidParameter("pseudorandom_test needs 0 <= t <= K");

    const auto base = static_cast<std::uint64_t>(2 * n);
    // keys and deviation numerators must fit the fixed-width arithmetic below
    {
        u128 span = 1;
        for (int i = 0; i < t; ++i) {
            span *= base;
            if (span > (u128{1} << 62)) {
                throw ResourceLimit("partial tuple key space (2n)^t exceeds 2^62");
            }
        }
    }

    FrequencyReport report;
    report.t = t;
    report.tau = tau;
    report.strategy = opts.streaming ? FrequencyStrategy::Streaming : FrequencyStrategy::Exact;

    if (!opts.streaming) {
        u128 total = 0;
        for (int s = 0; s <= t; ++s) {
            const auto per_support = partial_tuple_count(n, s).convert_to<std::uint64_t>();
            total += static_cast<u128>(combinations(k, s).size()) * per_support;
        }
        if (total > opts.exact_limit) {
            throw ResourceLimit("exact pseudo-randomness test would enumerate " +
                                std::to_string(static_cast<std::uint64_t>(total)) +
                                " partial tuples (limit " + std::to_string(opts.exact_limit) +
                                "); enable streaming mode");
        }
    }

    const auto m = static_cast<i128>(j.m());
    Rational global_max = -1;
    bool have_global = false;

    for (int size = 0; size <= t; ++size) {
        const auto count_big = partial_tuple_count(n, size);
        const auto n_a = static_cast<i128>(count_big.convert_to<std::uint64_t>());
        for (const auto& support : combinations(k, size)) {
            std::unordered_map<std::uint64_t, std::int64_t> tally;
            tally.reserve(j.m() * 2);
            for (const auto& c : j.tuples()) ++tally[key_of(c, support, base)];

            Candidate best;
            if (opts.streaming) {
                std::vector<std::pair<std::uint64_t, std::int64_t>> observed(tally.begin(), tally.end());
                std::sort(observed.begin(), observed.end());
                for (const auto& [key, cnt] : observed) offer(best, abs128(cnt * n_a - m), key);
                report.tested_count += observed.size();
                if (static_cast<i128>(observed.size()) < n_a) {
                    // every unobserved tuple has deviation exactly p = 1/N; the
                    // lexicographically first one stands for all of them
                    std::uint64_t first_unobserved = 0;
                    enumerate_keys(n, size, [&](std::uint64_t key) {
                        if (tally.count(key)) return true;
                        first_unobserved = key;
                        return false;
                    });
                    offer(best, m, first_unobserved);
                    ++report.tested_count;
                }
            } else {
                enumerate_keys(n, size, [&](std::uint64_t key) {
                    const auto it = tally.find(key);
                    const std::int64_t cnt = it == tally.end() ? 0 : it->second;
                    offer(best, abs128(cnt * n_a - m), key);
                    ++report.tested_count;
                    return true;
                });
            }

            const Rational dev(to_big(best.numerator), BigInt(to_big(m)) * count_big);
            if (!have_global || dev > global_max) {
                global_max = dev;
                have_global = true;
                report.worst_tuple = decode(best.key, support, base, k);
            }
        }
    }

    report.max_deviation = global_max;
    report.pass = global_max < tau;
    return report;
}

// ---- bounds -----------------------------------------------------------------------

Bound bound_pseudorandom_failure(int n, int k, std::size_t m, double tau) {
    if (n < 1 || k < 1 || m < 1 || tau < 0) throw InvalidParameter("bound_pseudorandom_failure needs positive parameters");
    Bound b;
    b.log_value = 2.0 * k * std::log(2.0 * n) + std::log(2.0) - 2.0 * static_cast<double>(m) * tau * tau;
    b.value = std::exp(b.log_value);
    b.vacuous = b.value >= 1.0;
    return b;
}

Bound bound_single_frequency(std::size_t m, double tau) {
    Bound b;
    b.log_value = std::log(2.0) - 2.0 * static_cast<double>(m) * tau * tau;
    b.value = std::exp(b.log_value);
    b.vacuous = b.value >= 1.0;
    return b;
}

// ---- block distributions ------------------------------------------------------------

namespace {

std::uint64_t pattern_of(std::span<const std::int8_t> z) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] < 0) bits |= std::uint64_t{1} << i;
    }
    return bits;
}

}  // namespace

EmpiricalBlockDistribution EmpiricalBlockDistribution::uniform(int k) {
    if (k < 1 || k > 24) throw InvalidParameter("uniform block distribution supports 1 <= K <= 24");
    EmpiricalBlockDistribution d;
    d.k = k;
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << k); ++p) d.counts[p] = 1;
    d.total = static_cast<std::int64_t>(std::uint64_t{1} << k);
    return d;
}

EmpiricalBlockDistribution EmpiricalBlockDistribution::point_mass(std::span<const std::int8_t> z) {
    EmpiricalBlockDistribution d;
    d.k = static_cast<int>(z.size());
    d.counts[pattern_of(z)] = 1;
    d.total = 1;
    return d;
}

EmpiricalBlockDistribution block_distribution(const XorFormula& j, const Assignment& psi) {
    if (psi.size() != j.n()) throw InvalidInput("assignment length does not match formula");
    if (j.k() > 64) throw InvalidParameter("block_distribution supports K <= 64");
    EmpiricalBlockDistribution d;
    d.k = j.k();
    for (const auto& c : j.tuples()) ++d.counts[pattern_of(eval_tuple(c, psi))];
    d.total = static_cast<std::int64_t>(j.m());
    return d;
}

ClosenessResult closeness_check(const EmpiricalBlockDistribution& dist, int t, const Rational& mu) {
    const int k = dist.k;
    if (t < 0 || t > k) throw InvalidParameter("closeness_check needs 0 <= t <= K");
    if (dist.total <= 0) throw InvalidInput("empty distribution");

    ClosenessResult out;
    out.max_deviation = -1;
    for (int size = 0; size <= t; ++size) {
        const std::int64_t cells = std::int64_t{1} << size;
        for (const auto& support : combinations(k, size)) {
            // marginal over the support: restricted pattern bit b <- pattern bit support[b]
            std::vector<std::int64_t> marginal(static_cast<std::size_t>(cells), 0);
            for (const auto& [pattern, count] : dist.counts) {
                std::uint64_t r = 0;
                for (int b = 0; b < size; ++b) {
                    if ((pattern >> support[static_cast<std::size_t>(b)]) & 1U) r |= std::uint64_t{1} << b;
                }
                marginal[r] += count;
            }
            for (std::int64_t r = 0; r < cells; ++r) {
                // |c/total - 2^{-s}| = |c * 2^s - total| / (total * 2^s)
                const i128 num = abs128(static_cast<i128>(marginal[static_cast<std::size_t>(r)]) * cells - dist.total);
                const Rational dev(to_big(num), BigInt(dist.total) * cells);
                if (dev > out.max_deviation) {
                    out.max_deviation = dev;
                    out.witness.assign(static_cast<std::size_t>(k), 0);
                    for (int b = 0; b < size; ++b) {
                        out.witness[static_cast<std::size_t>(support[static_cast<std::size_t>(b)])] =
                            ((r >> b) & 1) ? -1 : 1;
                    }
                }
            }
        }
    }
    out.pass = out.max_deviation <= mu;
    return out;
}

}  // namespace xorhalf
