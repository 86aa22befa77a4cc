#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <memory>

#include "xorhalf/errors.hpp"
#include "xorhalf/sample.hpp"
#include "xorhalf/sq.hpp"

using namespace xorhalf;

namespace {

Query constant_query(int v) {
    return {"const", [v](std::span<const std::int8_t>, int) { return v; }};
}

Query label_query() {
    return {"y", [](std::span<const std::int8_t>, int y) { return y; }};
}

std::shared_ptr<const ExplicitDistribution> shared(ExplicitDistribution d) {
    return std::make_shared<const ExplicitDistribution>(std::move(d));
}

// Reference expectation: direct sum over the points, no library calls.
Rational reference_expectation(const ExplicitDistribution& d, const Query& q, const InstanceLift* lift) {
    std::int64_t total = 0;
    for (const auto& p : d.points()) {
        if (lift) total += q.fn((*lift)(p.x), p.y);
        else total += q.fn(p.x, p.y);
    }
    return Rational(total, static_cast<std::int64_t>(d.size()));
}

// Random points of {-1, 0, 1}^n with coin-flip labels.
ExplicitDistribution ternary_distribution(int n, std::uint64_t seed, std::size_t count) {
    Engine eng = make_engine(seed, StreamTag::Fixture);
    std::vector<LabeledPoint> pts(count);
    for (auto& p : pts) {
        p.x.resize(static_cast<std::size_t>(n));
        for (auto& v : p.x) v = static_cast<std::int8_t>(static_cast<int>(uniform_below(eng, 3)) - 1);
        p.y = fair_coin(eng) ? -1 : 1;
    }
    return ExplicitDistribution(std::move(pts));
}

}  // namespace

TEST_CASE("oracle examples") {
    const SparseParityTarget target(8, {2, 5, 7});
    auto dist = shared(parity_distribution(target));
    CHECK(dist->size() == 256);
    for (const Rational lambda : {Rational(1, 10), Rational(1, 3), Rational(1, 2), Rational(3, 2)}) {
        for (auto policy : {SqPolicy::Rounding, SqPolicy::Adversarial}) {
            SqOracle oracle(dist, lambda, policy, 9);
            const Rational one = oracle.query(constant_query(1));
            CHECK(one >= 1 - lambda);
            CHECK(one <= 1);
            const Rational y = oracle.query(label_query());
            CHECK(abs(y) <= lambda);
            const Rational corr = oracle.query(parity_query({1, 4, 6}, true));
            CHECK(corr >= 1 - lambda);
            CHECK(corr <= 1);
            REQUIRE(oracle.transcript().size() == 3);
            CHECK(*oracle.transcript()[2].exact == Fraction(256, 256));
            CHECK(*oracle.transcript()[1].exact == Fraction(0, 256));
            CHECK(oracle.transcript()[2].query == "parity[1,4,6]*y");
        }
    }
    CHECK_THROWS_AS(SqOracle(dist, Rational(0), SqPolicy::Rounding), InvalidParameter);
    CHECK_THROWS_AS(SqOracle(dist, Rational(-1, 4), SqPolicy::Adversarial), InvalidParameter);
    CHECK_THROWS_AS(SparseParityTarget(4, {}), InvalidInput);
    CHECK_THROWS_AS(SparseParityTarget(4, {5}), InvalidInput);
    CHECK(parse_policy("adversarial") == SqPolicy::Adversarial);
    CHECK(policy_name(SqPolicy::Rounding) == "rounding");
    CHECK_THROWS_AS(parse_policy("lazy"), InvalidParameter);
}

TEST_CASE("rounding snaps to the tolerance grid") {
    auto dist = shared(ExplicitDistribution({{{1}, 1}, {{1}, 1}, {{1}, 1}, {{-1}, -1}}));
    // E[y] = 1/2
    SqOracle coarse(dist, Rational(1, 3), SqPolicy::Rounding);
    CHECK(coarse.query(label_query()) == Rational(2, 3));
    SqOracle exact_tie(dist, Rational(1, 4), SqPolicy::Rounding);
    CHECK(exact_tie.query(label_query()) == Rational(1, 2));
    SqOracle wide(dist, Rational(2, 5), SqPolicy::Rounding);
    CHECK(wide.query(label_query()) == Rational(2, 5));
    // 1 / (4/5) = 1.25 rounds to 1 -> 4/5; -E likewise
    CHECK(SqOracle(dist, Rational(4, 5), SqPolicy::Rounding).query(constant_query(-1)) == Rational(-4, 5));
    // 1 / (2/3) = 1.5 rounds away to 2 -> 4/3, clamped to 1
    CHECK(SqOracle(dist, Rational(2, 3), SqPolicy::Rounding).query(constant_query(1)) == 1);
}

TEST_CASE("answers stay within tolerance of the exact expectation") {
    const SparseParityTarget target(7, {1, 3, 4, 6});
    auto dist = shared(parity_distribution(target));
    Engine eng = make_engine(12, StreamTag::Fixture);
    for (auto policy : {SqPolicy::Rounding, SqPolicy::Adversarial}) {
        SqOracle oracle(dist, Rational(1, 7), policy, 4);
        SqOracle replay(dist, Rational(1, 7), policy, 4);
        for (int i = 0; i < 300; ++i) {
            const auto family = static_cast<QueryFamily>(uniform_below(eng, 3));
            const Query q = random_query(family, 7, eng);
            const Rational e = oracle.query(q);
            CHECK(abs(e - reference_expectation(*dist, q, nullptr)) <= oracle.lambda());
            CHECK(replay.query(q) == e);
        }
    }
}

TEST_CASE("generator oracle averages fresh draws") {
    const SparseParityTarget target(10, {2, 9});
    SqOracle::Generator gen = [&](Engine& eng) {
        LabeledPoint p;
        p.x.resize(10);
        for (auto& v : p.x) v = fair_coin(eng) ? -1 : 1;
        p.y = target.label(p.x);
        return p;
    };
    SqOracle oracle(gen, 4000, Rational(1, 10), SqPolicy::Rounding, 3);
    CHECK_FALSE(oracle.explicit_distribution());
    CHECK(oracle.query(parity_query({1, 8}, true)) == 1);
    CHECK(abs(oracle.query(label_query())) <= Rational(1, 10));
    CHECK_FALSE(oracle.transcript()[0].exact);
    SqOracle again(gen, 4000, Rational(1, 10), SqPolicy::Rounding, 3);
    again.query(parity_query({1, 8}, true));
    CHECK(again.query(label_query()) == oracle.transcript()[1].answer);
    CHECK_THROWS_AS(SqOracle(gen, 0, Rational(1, 10), SqPolicy::Rounding), InvalidInput);
}

TEST_CASE("query families") {
    const std::vector<std::int8_t> x{1, -1, -1, 1};
    CHECK(parity_query({1, 2}, false)(x, -1) == 1);
    CHECK(parity_query({0, 1}, true)(x, -1) == 1);
    CHECK(halfspace_query({1, 1, 1, 1}, 0, false)(x, 1) == 1);
    CHECK(halfspace_query({0, 2, 1, 0}, 0, true)(x, -1) == 1);
    // inputs (x_1, x_3, y) = (-1, 1, -1): bits 0 and 2 set
    std::vector<std::int8_t> table(8, 1);
    table[5] = -1;
    const Query j = junta_query({1, 3}, table);
    CHECK(j(x, -1) == -1);
    CHECK(j(x, 1) == 1);
    CHECK_THROWS_AS(junta_query({1}, std::vector<std::int8_t>(3, 1)), InvalidInput);
    CHECK_THROWS_AS(parity_query({9}, false)(x, 1), InvalidInput);
}

TEST_CASE("identity lift leaves queries unchanged") {
    const InstanceLift id = [](std::span<const std::int8_t> x) { return std::vector<std::int8_t>(x.begin(), x.end()); };
    auto dist = parity_distribution(SparseParityTarget(6, {1, 2}));
    Engine eng = make_engine(2, StreamTag::Fixture);
    for (int i = 0; i < 100; ++i) {
        const Query q = random_query(static_cast<QueryFamily>(i % 3), 6, eng);
        const Query t = translate_query(q, id);
        CHECK(t.name == "translated(" + q.name + ")");
        for (const auto& p : dist.points()) REQUIRE(t(p.x, p.y) == q(p.x, p.y));
    }
}

TEST_CASE("pushforward identity, exhaustive") {
    Engine eng = make_engine(21, StreamTag::Fixture);
    for (int n = 2; n <= 12; n += 2) {
        const SparseParityTarget target(n, {1, n});
        const auto base = parity_distribution(target);
        const MonomialIndex idx(static_cast<std::uint64_t>(n), 1, RhoIndexing::Canonical);
        const InstanceLift lift = psi_rho_lift(idx);
        const auto lifted = pushforward(base, lift);
        CHECK(lifted.dim() == 2 * (static_cast<std::size_t>(n) + 1));
        for (int i = 0; i < 20; ++i) {
            const Query q = random_query(static_cast<QueryFamily>(i % 3), lifted.dim(), eng);
            const Fraction over_base = base.expectation(translate_query(q, lift));
            const Fraction direct = lifted.expectation(q);
            CHECK(over_base == direct);
            CHECK(over_base.to_rational() == reference_expectation(base, q, &lift));
        }
    }
    // ternary inputs through a degree-2 lift
    const auto base = ternary_distribution(4, 8, 300);
    const MonomialIndex idx(4, 2, RhoIndexing::Canonical);
    const InstanceLift lift = psi_rho_lift(idx);
    const auto lifted = pushforward(base, lift);
    for (int i = 0; i < 30; ++i) {
        const Query q = random_query(static_cast<QueryFamily>(i % 3), lifted.dim(), eng);
        CHECK(base.expectation(translate_query(q, lift)) == lifted.expectation(q));
    }
}

TEST_CASE("translated and lifted oracles answer identically") {
    const int n = 10;
    auto base = shared(parity_distribution(SparseParityTarget(n, {2, 3, 8})));
    const MonomialIndex idx(n, 1, RhoIndexing::Canonical);
    const InstanceLift lift = psi_rho_lift(idx);
    auto lifted = shared(pushforward(*base, lift));
    // the d = 1 lift is (1, x) with each coordinate duplicated through Psi
    const auto& p0 = base->points()[37];
    const auto img = lift(p0.x);
    REQUIRE(img.size() == 2 * (n + 1));
    CHECK(img[0] == 1);
    CHECK(img[1] == 1);
    for (int v = 0; v < n; ++v) {
        CHECK(img[2 * (v + 1)] == p0.x[v]);
        CHECK(img[2 * (v + 1) + 1] == p0.x[v]);
    }
    SqOracle over_base(base, Rational(1, 16), SqPolicy::Rounding);
    SqOracle direct(lifted, Rational(1, 16), SqPolicy::Rounding);
    Engine eng = make_engine(77, StreamTag::Fixture);
    for (int i = 0; i < 200; ++i) {
        const Query q = random_query(static_cast<QueryFamily>(i % 3), lifted->dim(), eng);
        REQUIRE(over_base.query(translate_query(q, lift)) == direct.query(q));
    }
}
