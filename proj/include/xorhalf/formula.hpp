#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "xorhalf/numeric.hpp"

namespace xorhalf {

/// A signed variable: `sign * x_var`, var 1-based.
struct Literal {
    int var = 0;
    int sign = +1;

    friend bool operator==(const Literal&, const Literal&) = default;
};

/// K literals over K pairwise-distinct variables.
class KTuple {
public:
    KTuple() = default;
    explicit KTuple(std::vector<Literal> literals);

    std::size_t arity() const noexcept { return literals_.size(); }
    const std::vector<Literal>& literals() const noexcept { return literals_; }
    const Literal& operator[](std::size_t i) const { return literals_[i]; }

    /// Largest variable index referenced.
    int max_var() const noexcept;

    KTuple with_flipped(std::size_t position) const;

    friend bool operator==(const KTuple&, const KTuple&) = default;

private:
    std::vector<Literal> literals_;
};

class Assignment {
public:
    Assignment() = default;
    explicit Assignment(std::vector<std::int8_t> values);

    static Assignment all_plus(int n);
    /// The `index`-th assignment in lexicographic order over (psi_1, ..., psi_n),
    /// with +1 < -1 (bit n-v of `index` set means psi_v = -1).
    static Assignment from_lex_index(int n, std::uint64_t index);

    int size() const noexcept { return static_cast<int>(values_.size()); }
    /// 1-based access.
    int operator()(int var) const { return values_[static_cast<std::size_t>(var - 1)]; }
    const std::vector<std::int8_t>& values() const noexcept { return values_; }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<std::int8_t> values_;
};

class XorFormula {
public:
    XorFormula(int n, int k, std::vector<KTuple> tuples);

    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }
    std::size_t m() const noexcept { return tuples_.size(); }
    const std::vector<KTuple>& tuples() const noexcept { return tuples_; }
    const KTuple& operator[](std::size_t i) const { return tuples_[i]; }

    friend bool operator==(const XorFormula&, const XorFormula&) = default;

private:
    int n_;
    int k_;
    std::vector<KTuple> tuples_;
};

/// q K-tuples over the same (n, K).
struct QKTuple {
    std::vector<KTuple> blocks;

    std::size_t q() const noexcept { return blocks.size(); }
    friend bool operator==(const QKTuple&, const QKTuple&) = default;
};

/// An unlabeled (q,K)-formula: the output of gap amplification.
class QKFormula {
public:
    QKFormula(int n, int q, int k, std::vector<QKTuple> bundles);

    int n() const noexcept { return n_; }
    int q() const noexcept { return q_; }
    int k() const noexcept { return k_; }
    std::size_t m() const noexcept { return bundles_.size(); }
    const std::vector<QKTuple>& bundles() const noexcept { return bundles_; }

    friend bool operator==(const QKFormula&, const QKFormula&) = default;

private:
    int n_;
    int q_;
    int k_;
    std::vector<QKTuple> bundles_;
};

struct LabeledEntry {
    QKTuple tuple;
    int label = +1;

    friend bool operator==(const LabeledEntry&, const LabeledEntry&) = default;
};

class LabeledQKFormula {
public:
    LabeledQKFormula(int n, int q, int k, std::vector<LabeledEntry> entries);

    int n() const noexcept { return n_; }
    int q() const noexcept { return q_; }
    int k() const noexcept { return k_; }
    std::size_t m() const noexcept { return entries_.size(); }
    const std::vector<LabeledEntry>& entries() const noexcept { return entries_; }

    /// All K-tuples of all bundles, in order (the formula Step III inspects).
    XorFormula flatten() const;

    /// Same tuples with every label negated.
    LabeledQKFormula with_labels_negated() const;

    friend bool operator==(const LabeledQKFormula&, const LabeledQKFormula&) = default;

private:
    int n_;
    int q_;
    int k_;
    std::vector<LabeledEntry> entries_;
};

/// A formula generated around a hidden assignment with an exact violation count.
struct PlantedInstance {
    XorFormula formula;
    Assignment planted;
    Rational noise_rate;
    std::vector<std::size_t> flipped_indices;  // ascending
};

// ---- evaluation ----------------------------------------------------------

/// Coordinate i is sign_i * psi[var_i].
std::vector<std::int8_t> eval_tuple(const KTuple& c, const Assignment& psi);

/// Product of the entries; +1 means "satisfied".
int xor_value(std::span<const std::int8_t> z);

/// Majority of the q per-block XORs of a length q*K vector. q must be odd.
int mxor_value(std::span<const std::int8_t> z, int q, int k);

/// MXOR of C(psi) for a bundle.
int mxor_of(const QKTuple& c, const Assignment& psi);

Fraction val_xor(const XorFormula& j, const Assignment& psi);
Fraction val_mxor(const QKFormula& j, const Assignment& psi);
Fraction val_mxor_labeled(const LabeledQKFormula& j, const Assignment& psi);

struct ValueResult {
    Assignment argmax;
    Fraction value;
};

inline constexpr int kDefaultExhaustiveLimit = 24;

/// Exhaustive max over all 2^n assignments; ties go to the lexicographically
/// smallest assignment (+1 < -1).
ValueResult brute_force_value(const XorFormula& j, int limit = kDefaultExhaustiveLimit);
ValueResult brute_force_value(const LabeledQKFormula& j, int limit = kDefaultExhaustiveLimit);

// ---- generators ----------------------------------------------------------

/// m independent uniform K-tuples. Tuple j depends only on (seed, j).
XorFormula gen_random_formula(int n, std::size_t m, int k, std::uint64_t seed);

/// Uniform planted assignment, tuples forced satisfied, then exactly
/// floor(eta*m) tuples (uniform without replacement) get one literal flipped.
PlantedInstance gen_planted_formula(int n, std::size_t m, int k, const Rational& eta, std::uint64_t seed);

/// floor(eta * m) for eta in [0, 1/2).
std::size_t planted_flip_count(const Rational& eta, std::size_t m);

}  // namespace xorhalf
