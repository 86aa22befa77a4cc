#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xorhalf/formula.hpp"
#include "xorhalf/numeric.hpp"

namespace xorhalf {

/// A K-slot tuple whose slots outside the support hold the wildcard (var == 0).
struct PartialKTuple {
    int k = 0;
    std::vector<Literal> slots;

    static PartialKTuple restrict(const KTuple& c, const std::vector<int>& support);

    std::vector<int> support() const;
    int size() const;
    /// e.g. "(+x1,*,-x4)"
    std::string str() const;

    friend bool operator==(const PartialKTuple&, const PartialKTuple&) = default;
};

/// |X_{n,K,A}| for |A| = t: (2n)(2n-2)...(2n-2t+2).
BigInt partial_tuple_count(int n, int t);

/// 1 / partial_tuple_count(n, t).
Rational uniform_partial_frequency(int n, int t);

/// Fraction of J's tuples whose restriction to P's support equals P (position-sensitive).
Fraction frequency(const XorFormula& j, const PartialKTuple& p);

enum class FrequencyStrategy { Exact, Streaming };

struct FrequencyOptions {
    bool streaming = false;
    /// Exact mode refuses to enumerate more partial tuples than this.
    std::uint64_t exact_limit = 20'000'000;
};

struct FrequencyReport {
    int t = 0;
    Rational tau;
    Rational max_deviation;
    PartialKTuple worst_tuple;
    bool pass = false;
    std::uint64_t tested_count = 0;
    FrequencyStrategy strategy = FrequencyStrategy::Exact;
};

/// Checks |Fr_J(C) - p_{n,|C|}| < tau for every partial tuple of size <= t.
///
/// Exact mode enumerates every partial tuple. Streaming mode tallies only the
/// partial tuples observed in J and accounts for all unobserved ones at once
/// (their deviation is p_{n,t'}), so both modes compute the same maximum and,
/// with ties broken by (size, support, literal order), the same worst tuple.
FrequencyReport pseudorandom_test(const XorFormula& j, int t, const Rational& tau, const FrequencyOptions& opts = {});

/// A bound value with its natural log; `vacuous` when value >= threshold.
struct Bound {
    double value = 0.0;
    double log_value = 0.0;
    bool vacuous = false;
};

/// (2n)^{2K} * 2 * exp(-2 m tau^2): probability a random J fails to be tau-pseudo-random.
Bound bound_pseudorandom_failure(int n, int k, std::size_t m, double tau);

/// 2 exp(-2 m tau^2): Hoeffding for a single partial tuple.
Bound bound_single_frequency(std::size_t m, double tau);

/// Histogram of C_j(psi) over j. Pattern bit i is set iff z_i = -1.
struct EmpiricalBlockDistribution {
    int k = 0;
    std::int64_t total = 0;
    std::map<std::uint64_t, std::int64_t> counts;

    static EmpiricalBlockDistribution uniform(int k);
    static EmpiricalBlockDistribution point_mass(std::span<const std::int8_t> z);
};

EmpiricalBlockDistribution block_distribution(const XorFormula& j, const Assignment& psi);

struct ClosenessResult {
    bool pass = false;
    Rational max_deviation;
    /// Worst pattern; 0 marks a wildcard position.
    std::vector<std::int8_t> witness;
};

/// (t, mu)-closeness to uniform: |Pr(Pi_A(z') = z) - 2^{-|A|}| <= mu for all |A| <= t.
ClosenessResult closeness_check(const EmpiricalBlockDistribution& dist, int t, const Rational& mu);

std::string strategy_name(FrequencyStrategy s);

}  // namespace xorhalf
