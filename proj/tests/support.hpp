#pragma once

// Shared helpers for the unit tests: small builders and independent reference
// implementations the library results are checked against.

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "xorhalf/formula.hpp"
#include "xorhalf/rng.hpp"

namespace xtest {

using namespace xorhalf;

inline KTuple tuple(std::initializer_list<int> signed_vars) {
    std::vector<Literal> lits;
    for (int s : signed_vars) lits.push_back({s < 0 ? -s : s, s < 0 ? -1 : 1});
    return KTuple(std::move(lits));
}

inline Assignment assignment(std::initializer_list<int> values) {
    return Assignment(std::vector<std::int8_t>(values.begin(), values.end()));
}

inline Assignment random_assignment(int n, Engine& eng) {
    std::vector<std::int8_t> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = fair_coin(eng) ? -1 : 1;
    return Assignment(std::move(v));
}

/// Reference: satisfied count computed with a sign product, no library calls.
inline std::int64_t naive_satisfied(const XorFormula& j, const Assignment& psi) {
    std::int64_t sat = 0;
    for (const auto& c : j.tuples()) {
        int prod = 1;
        for (const auto& lit : c.literals()) prod *= lit.sign * psi(lit.var);
        sat += prod == 1;
    }
    return sat;
}

/// Reference majority of per-block products.
inline int naive_mxor(const QKTuple& c, const Assignment& psi) {
    int votes = 0;
    for (const auto& block : c.blocks) {
        int prod = 1;
        for (const auto& lit : block.literals()) prod *= lit.sign * psi(lit.var);
        votes += prod;
    }
    return votes > 0 ? 1 : -1;
}

/// Every assignment of length n, index order matching from_lex_index.
inline std::vector<Assignment> all_assignments(int n) {
    std::vector<Assignment> out;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) out.push_back(Assignment::from_lex_index(n, i));
    return out;
}

}  // namespace xtest
