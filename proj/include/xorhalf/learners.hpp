#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xorhalf/errors.hpp"
#include "xorhalf/formula.hpp"
#include "xorhalf/numeric.hpp"
#include "xorhalf/sample.hpp"

namespace xorhalf {

// ---- GF(2) refutation ----------------------------------------------------

/// One row per tuple under x_v = (-1)^{b_v}: sum of the tuple's b_v equals the
/// parity of its negated literals, so XOR(C(x)) = +1 iff the row holds.
struct Gf2System {
    int n = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> coeffs;  // row-major, `words` per row, bit v-1 for variable v
    std::vector<std::uint8_t> target;
    std::vector<std::size_t> provenance;  // row -> tuple index

    static Gf2System from_formula(const XorFormula& j);
    std::size_t rows() const noexcept { return target.size(); }
    bool coeff(std::size_t row, int var) const;
};

struct Gf2Result {
    bool sat = false;
    std::optional<Assignment> assignment;
    /// UNSAT: tuple indices (ascending) whose rows sum to 0 = 1.
    std::vector<std::size_t> certificate;
    std::size_t rank = 0;
};

Gf2Result gf2_refute(const XorFormula& j);

/// True iff the listed rows sum to the contradiction 0 = 1.
bool verify_certificate(const XorFormula& j, std::span<const std::size_t> rows);

// ---- sample error --------------------------------------------------------

namespace detail {
template <typename T>
int sign_of_value(const T& v) {
    return v < T(0) ? -1 : 1;
}
}  // namespace detail

/// Exact misclassification fraction of sign(<w, x>) with sign(0) = +1.
template <typename T>
Fraction sample_error(const BinarySample& s, std::span<const T> w) {
    if (w.size() != s.dim()) throw InvalidInput("weight length does not match sample dimension");
    if (s.size() == 0) throw InvalidInput("sample_error needs a nonempty sample");
    std::int64_t wrong = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        T acc(0);
        for (std::uint64_t p = 0; p < s.dim(); ++p) {
            if (w[p] == T(0)) continue;
            if (s.value(j, p) > 0) acc += w[p]; else acc -= w[p];
        }
        wrong += detail::sign_of_value(acc) != s.label(j);
    }
    return Fraction(wrong, static_cast<std::int64_t>(s.size()));
}

template <typename T>
Fraction sample_error(const TernarySample& s, std::span<const T> w) {
    if (w.size() != s.dim()) throw InvalidInput("weight length does not match sample dimension");
    if (s.size() == 0) throw InvalidInput("sample_error needs a nonempty sample");
    std::int64_t wrong = 0;
    for (const auto& e : s.entries()) {
        T acc(0);
        for (const auto& [idx, v] : e.nonzeros) {
            if (v > 0) acc += w[idx]; else acc -= w[idx];
        }
        wrong += detail::sign_of_value(acc) != e.label;
    }
    return Fraction(wrong, static_cast<std::int64_t>(s.size()));
}

// ---- perceptron ----------------------------------------------------------

/// Dense +-1 rows of a sample (ResourceLimit past BinarySample::kMaxDenseRow).
std::vector<std::vector<std::int8_t>> dense_rows(const BinarySample& s);

struct PerceptronResult {
    std::vector<std::int64_t> weights;
    Fraction training_error;
    int epochs_run = 0;
    std::int64_t mistakes = 0;
};

/// Mistake-driven updates over seeded shuffled passes; keeps the weights with
/// the lowest training error seen at an epoch boundary (zero weights included).
PerceptronResult perceptron_fit(const std::vector<std::vector<std::int8_t>>& rows, const std::vector<int>& labels,
                                int max_epochs, std::uint64_t seed);
PerceptronResult perceptron_fit(const BinarySample& s, int max_epochs, std::uint64_t seed);

// ---- learner interface and the distinguisher -------------------------------

struct Example {
    std::vector<std::int8_t> x;
    int y = +1;
};

class ExampleOracle {
public:
    virtual ~ExampleOracle() = default;
    virtual Example draw() = 0;
    virtual std::uint64_t dim() const = 0;
};

using Hypothesis = std::function<int(std::span<const std::int8_t>)>;

class Learner {
public:
    virtual ~Learner() = default;
    virtual std::string name() const = 0;
    /// Draw at most `budget` examples and return a hypothesis.
    virtual Hypothesis learn(ExampleOracle& oracle, std::size_t budget) = 0;
};

class PerceptronLearner : public Learner {
public:
    PerceptronLearner(int max_epochs, std::uint64_t seed) : max_epochs_(max_epochs), seed_(seed) {}
    std::string name() const override { return "perceptron"; }
    Hypothesis learn(ExampleOracle& oracle, std::size_t budget) override;

private:
    int max_epochs_;
    std::uint64_t seed_;
};

/// Uniform draws with replacement from a fixed sample.
class BootstrapOracle : public ExampleOracle {
public:
    BootstrapOracle(const std::vector<std::vector<std::int8_t>>& rows, const std::vector<int>& labels, std::uint64_t seed);
    Example draw() override;
    std::uint64_t dim() const override;
    std::size_t draws() const noexcept { return draws_; }

private:
    const std::vector<std::vector<std::int8_t>>& rows_;
    const std::vector<int>& labels_;
    std::uint64_t seed_;
    std::size_t draws_ = 0;
};

enum class VerdictLabel { AlmostRealizable, Scattered };
std::string verdict_name(VerdictLabel v);

struct LearnerVerdict {
    VerdictLabel label = VerdictLabel::Scattered;
    Fraction error;
    /// 1/2 - dim^{-c}, held exactly as the nearest double.
    Rational threshold;
    std::optional<std::string> diagnostic;
};

/// Runs the learner on bootstrap draws from S, scores its hypothesis on all
/// of S and labels "almost-realizable" iff the error is <= 1/2 - dim^{-c}.
LearnerVerdict distinguisher_wrapper(const BinarySample& s, Learner& learner, double c, std::uint64_t seed);

}  // namespace xorhalf
