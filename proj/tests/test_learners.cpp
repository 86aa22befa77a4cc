#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <memory>

#include "support.hpp"
#include "xorhalf/errors.hpp"
#include "xorhalf/learners.hpp"
#include "xorhalf/reduction.hpp"

using namespace xorhalf;
using xtest::tuple;

namespace {

PipelineParams small_params(std::uint64_t seed) {
    PipelineParams p;
    p.n = 6;
    p.k = 2;
    p.q = 1;
    p.d = 2;
    p.seed = seed;
    return p;
}

// eta = 0 planted input with d = K: the lifted sample is linearly separable.
PipelineResult separable_sample(std::uint64_t seed, std::size_t m = 400) {
    return run_pipeline(gen_planted_formula(6, m, 2, Rational(0), seed), small_params(seed));
}

// Uniform input: labels carry no information about the tuples.
PipelineResult scattered_sample(std::uint64_t seed, std::size_t m) {
    return run_pipeline(gen_random_formula(6, m, 2, seed + 1000), small_params(seed));
}

BinarySample random_binary(std::uint64_t dim, std::size_t m, std::uint64_t seed) {
    Engine eng = make_engine(seed, StreamTag::Fixture);
    std::vector<std::vector<std::int8_t>> rows(m, std::vector<std::int8_t>(dim));
    std::vector<int> labels(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (auto& v : rows[j]) v = fair_coin(eng) ? -1 : 1;
        labels[j] = fair_coin(eng) ? -1 : 1;
    }
    return BinarySample(dim, rows, std::move(labels));
}

class ThrowingLearner : public Learner {
public:
    std::string name() const override { return "throws"; }
    Hypothesis learn(ExampleOracle&, std::size_t) override { throw ResourceLimit("out of budget"); }
};

class ConstantLearner : public Learner {
public:
    explicit ConstantLearner(int v) : v_(v) {}
    std::string name() const override { return "constant"; }
    Hypothesis learn(ExampleOracle& oracle, std::size_t budget) override {
        for (std::size_t i = 0; i < budget; ++i) oracle.draw();
        return [v = v_](std::span<const std::int8_t>) { return v; };
    }

private:
    int v_;
};

}  // namespace

TEST_CASE("gf2_refute examples") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto inst = gen_planted_formula(20, 80, 3, Rational(0), seed);
        auto r = gf2_refute(inst.formula);
        REQUIRE(r.sat);
        REQUIRE(r.assignment);
        CHECK(val_xor(inst.formula, *r.assignment) == Fraction(1, 1));
        CHECK(xtest::naive_satisfied(inst.formula, *r.assignment) == 80);
    }

    XorFormula contra(1, 1, {tuple({1}), tuple({-1})});
    auto u = gf2_refute(contra);
    CHECK_FALSE(u.sat);
    CHECK(u.certificate == std::vector<std::size_t>{0, 1});
    CHECK(verify_certificate(contra, u.certificate));
    const std::vector<std::size_t> one{0};
    CHECK_FALSE(verify_certificate(contra, one));

    int unsat = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto j = gen_random_formula(50, 200, 3, seed);
        auto r = gf2_refute(j);
        if (!r.sat) {
            ++unsat;
            CHECK(verify_certificate(j, r.certificate));
            CHECK(r.rank <= 50);
        } else {
            CHECK(val_xor(j, *r.assignment) == Fraction(1, 1));
        }
    }
    CHECK(unsat >= 19);
}

TEST_CASE("gf2 rows encode the parity of negated literals") {
    XorFormula j(4, 3, {tuple({1, -2, 4}), tuple({-1, -3, -4})});
    auto sys = Gf2System::from_formula(j);
    REQUIRE(sys.rows() == 2);
    CHECK(sys.coeff(0, 1));
    CHECK(sys.coeff(0, 2));
    CHECK_FALSE(sys.coeff(0, 3));
    CHECK(sys.coeff(0, 4));
    CHECK(sys.target[0] == 1);
    CHECK(sys.target[1] == 1);
    CHECK(sys.provenance == std::vector<std::size_t>{0, 1});
    // a row holds iff the tuple is satisfied
    for (const auto& psi : xtest::all_assignments(4)) {
        for (std::size_t r = 0; r < 2; ++r) {
            int parity = 0;
            for (int v = 1; v <= 4; ++v) parity ^= sys.coeff(r, v) && psi(v) < 0;
            CHECK((parity == sys.target[r]) == (xor_value(eval_tuple(j[r], psi)) == 1));
        }
    }
}

TEST_CASE("gf2_refute agrees with exhaustive value") {
    Engine eng = make_engine(3, StreamTag::Fixture);
    for (int trial = 0; trial < 120; ++trial) {
        const int n = 3 + static_cast<int>(uniform_below(eng, 14));
        const int k = 1 + static_cast<int>(uniform_below(eng, std::min(n, 4)));
        const std::size_t m = 1 + uniform_below(eng, static_cast<std::uint64_t>(2 * n));
        auto j = gen_random_formula(n, m, k, 500 + static_cast<std::uint64_t>(trial));
        auto r = gf2_refute(j);
        const bool full = brute_force_value(j).value == Fraction(1, 1);
        REQUIRE(r.sat == full);
        if (r.sat) CHECK(val_xor(j, *r.assignment) == Fraction(1, 1));
        else CHECK(verify_certificate(j, r.certificate));
    }
}

TEST_CASE("sample_error examples") {
    auto bin = random_binary(7, 200, 4);
    std::int64_t negative = 0;
    for (int y : bin.labels()) negative += y < 0;
    const std::vector<std::int64_t> zero(7, 0);
    CHECK(sample_error<std::int64_t>(bin, zero) == Fraction(negative, 200));

    // odd dimension with +-1 weights: no dot product is zero
    Engine eng = make_engine(5, StreamTag::Fixture);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::int64_t> w(7);
        for (auto& v : w) v = fair_coin(eng) ? -1 : 1;
        const Fraction e = sample_error<std::int64_t>(bin, w);
        std::vector<std::int64_t> neg(w), scaled(w);
        for (auto& v : neg) v = -v;
        for (auto& v : scaled) v *= 5;
        CHECK(sample_error<std::int64_t>(bin, neg).to_rational() == 1 - e.to_rational());
        CHECK(sample_error<std::int64_t>(bin, scaled) == e);
        std::vector<Rational> rw;
        for (auto v : w) rw.push_back(Rational(v, 3));
        CHECK(sample_error<Rational>(bin, rw) == e);
    }

    const std::vector<std::int64_t> shorter(6, 1);
    CHECK_THROWS_AS(sample_error<std::int64_t>(bin, shorter), InvalidInput);

    TernarySample t(4, {TernaryEntry{{{0, 1}, {3, -1}}, -1}, TernaryEntry{{}, -1}, TernaryEntry{{{2, 1}}, 1}});
    const std::vector<std::int64_t> tw{1, 0, 1, 2};
    CHECK(sample_error<std::int64_t>(t, tw) == Fraction(1, 3));
}

TEST_CASE("witness weights have zero error on separable pipeline output") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto res = separable_sample(seed, 120);
        REQUIRE(res.witness);
        const auto w = res.witness->dense_weights();
        CHECK(sample_error<Rational>(res.binary, w) == Fraction(0, static_cast<std::int64_t>(res.binary.size())));
    }
}

TEST_CASE("perceptron on separable samples") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto res = separable_sample(seed);
        auto fit = perceptron_fit(res.binary, 200, seed);
        CHECK(fit.training_error.num() == 0);
        CHECK(sample_error<std::int64_t>(res.binary, fit.weights) == fit.training_error);
        auto again = perceptron_fit(res.binary, 200, seed);
        CHECK(again.weights == fit.weights);
        CHECK(again.mistakes == fit.mistakes);
    }
    CHECK_THROWS_AS(perceptron_fit(random_binary(3, 4, 1), 0, 1), InvalidParameter);
}

TEST_CASE("perceptron learns a single-coordinate label in one epoch") {
    // rows are (x_0, x_0, ..., x_0, z): the label coordinate outvotes the rest
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Engine eng = make_engine(seed, StreamTag::Fixture);
        std::vector<std::vector<std::int8_t>> rows(64, std::vector<std::int8_t>(6));
        std::vector<int> labels(64);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            const std::int8_t lead = fair_coin(eng) ? -1 : 1;
            for (std::size_t i = 0; i < 5; ++i) rows[j][i] = lead;
            rows[j][5] = fair_coin(eng) ? -1 : 1;
            labels[j] = lead;
        }
        auto fit = perceptron_fit(rows, labels, 10, seed);
        CHECK(fit.training_error.num() == 0);
        CHECK(fit.epochs_run == 1);
    }
}

TEST_CASE("perceptron cannot fit scattered samples") {
    int high = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto res = scattered_sample(seed, 3000);
        auto fit = perceptron_fit(res.binary, 5, seed);
        high += fit.training_error.to_double() >= 0.3;
    }
    CHECK(high >= 4);
}

TEST_CASE("distinguisher verdicts") {
    PerceptronLearner learner(100, 7);
    int almost = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto res = separable_sample(seed, 2000);
        auto v = distinguisher_wrapper(res.binary, learner, 0.25, seed);
        almost += v.label == VerdictLabel::AlmostRealizable;
        CHECK((v.label == VerdictLabel::AlmostRealizable) == (v.error.to_rational() <= v.threshold));
        CHECK_FALSE(v.diagnostic);
    }
    CHECK(almost >= 4);

    int scattered = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto res = scattered_sample(seed, 20 * 338);
        REQUIRE(res.binary.dim() == 338);
        PerceptronLearner short_run(5, seed);
        auto v = distinguisher_wrapper(res.binary, short_run, 0.25, seed);
        scattered += v.label == VerdictLabel::Scattered;
    }
    CHECK(scattered >= 2);
}

TEST_CASE("distinguisher thresholds and failures") {
    auto bin = random_binary(5, 50, 9);
    ConstantLearner plus(+1);
    // 1/2 - 5^{1} < 0: no error rate can pass
    auto v = distinguisher_wrapper(bin, plus, -1.0, 1);
    CHECK(v.threshold < 0);
    CHECK(v.label == VerdictLabel::Scattered);
    auto zero_c = distinguisher_wrapper(bin, plus, 0.0, 1);
    CHECK(zero_c.threshold == Rational(-1, 2));
    CHECK(zero_c.label == VerdictLabel::Scattered);

    ThrowingLearner bad;
    auto f = distinguisher_wrapper(bin, bad, 0.5, 1);
    CHECK(f.label == VerdictLabel::Scattered);
    REQUIRE(f.diagnostic);
    CHECK(f.diagnostic->find("out of budget") != std::string::npos);
    CHECK(f.error == Fraction(50, 50));

    CHECK(verdict_name(VerdictLabel::AlmostRealizable) == "almost-realizable");
    CHECK(verdict_name(VerdictLabel::Scattered) == "scattered");
}

TEST_CASE("distinguisher is deterministic and uses bootstrap draws") {
    auto res = separable_sample(11, 300);
    PerceptronLearner a(50, 3), b(50, 3);
    auto va = distinguisher_wrapper(res.binary, a, 0.25, 42);
    auto vb = distinguisher_wrapper(res.binary, b, 0.25, 42);
    CHECK(va.label == vb.label);
    CHECK(va.error == vb.error);
    CHECK(va.threshold == vb.threshold);

    const auto rows = dense_rows(res.binary);
    BootstrapOracle o1(rows, res.binary.labels(), 5), o2(rows, res.binary.labels(), 5);
    for (int i = 0; i < 50; ++i) {
        auto e1 = o1.draw();
        auto e2 = o2.draw();
        CHECK(e1.x == e2.x);
        CHECK(e1.y == e2.y);
    }
    CHECK(o1.draws() == 50);
    CHECK(o1.dim() == res.binary.dim());
}
