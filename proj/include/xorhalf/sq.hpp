#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xorhalf/monomial_index.hpp"
#include "xorhalf/numeric.hpp"
#include "xorhalf/rng.hpp"

namespace xorhalf {

struct LabeledPoint {
    std::vector<std::int8_t> x;
    int y = +1;
};

/// Q: example space -> {-1, +1}, with a name for transcripts.
struct Query {
    std::string name;
    std::function<int(std::span<const std::int8_t>, int)> fn;

    int operator()(std::span<const std::int8_t> x, int y) const { return fn(x, y); }
};

/// Map from base instances to lifted instances.
using InstanceLift = std::function<std::vector<std::int8_t>(std::span<const std::int8_t>)>;

/// Uniform distribution over a finite multiset of labeled points.
class ExplicitDistribution {
public:
    explicit ExplicitDistribution(std::vector<LabeledPoint> points);

    std::size_t size() const noexcept { return points_.size(); }
    std::size_t dim() const noexcept { return points_.front().x.size(); }
    const std::vector<LabeledPoint>& points() const noexcept { return points_; }

    /// E[Q] as (sum of Q) / (number of points).
    Fraction expectation(const Query& q) const;

private:
    std::vector<LabeledPoint> points_;
};

/// Pushforward of D under the lift.
ExplicitDistribution pushforward(const ExplicitDistribution& d, const InstanceLift& lift);

/// Q~(x, y) = Q(lift(x), y).
Query translate_query(const Query& q, const InstanceLift& lift);

/// x -> Psi(rho(x)) under `idx`.
InstanceLift psi_rho_lift(const MonomialIndex& idx);

struct SparseParityTarget {
    int n = 0;
    std::vector<int> support;  // 1-based, ascending

    SparseParityTarget(int n, std::vector<int> support);
    int label(std::span<const std::int8_t> x) const;
};

/// Uniform x over {-1,1}^n labeled by the target (exhaustive, n <= 20).
ExplicitDistribution parity_distribution(const SparseParityTarget& target);

// ---- query families ------------------------------------------------------

/// prod_{i in coords} x_i, times y when `with_label`.
Query parity_query(std::vector<std::uint64_t> coords, bool with_label);
/// sign(<w, x> + b) with sign(0) = +1, times y when `with_label`.
Query halfspace_query(std::vector<std::int64_t> w, std::int64_t bias, bool with_label);
/// Truth table over (x_{c_1}, ..., x_{c_k}, y); bit i of the index set means the i-th input is -1.
Query junta_query(std::vector<std::uint64_t> coords, std::vector<std::int8_t> table);

enum class QueryFamily { Parity, Halfspace, Junta };
/// A random member of the family over `dim` coordinates.
Query random_query(QueryFamily family, std::uint64_t dim, Engine& eng);

// ---- oracle --------------------------------------------------------------

enum class SqPolicy { Rounding, Adversarial };
std::string policy_name(SqPolicy p);
SqPolicy parse_policy(const std::string& name);

struct TranscriptEntry {
    std::uint64_t id = 0;
    std::string query;
    Rational answer;
    std::optional<Fraction> exact;
};

/// Answers statistical queries within tolerance lambda.
///
/// Rounding: lambda * round(E / lambda), clamped to [-1, 1] (ties away from 0).
/// Adversarial: E +- lambda, clamped, with the sign drawn from (seed, query id).
/// An explicit distribution gives exact E; a generator gives an empirical mean
/// of `samples` draws per query, so the tolerance then holds only w.h.p.
class SqOracle {
public:
    using Generator = std::function<LabeledPoint(Engine&)>;

    SqOracle(std::shared_ptr<const ExplicitDistribution> dist, Rational lambda, SqPolicy policy, std::uint64_t seed = 0);
    SqOracle(Generator gen, std::size_t samples, Rational lambda, SqPolicy policy, std::uint64_t seed = 0);

    Rational query(const Query& q);

    const Rational& lambda() const noexcept { return lambda_; }
    SqPolicy policy() const noexcept { return policy_; }
    bool explicit_distribution() const noexcept { return static_cast<bool>(dist_); }
    const std::vector<TranscriptEntry>& transcript() const noexcept { return transcript_; }

private:
    Rational perturb(const Rational& e, std::uint64_t id) const;

    std::shared_ptr<const ExplicitDistribution> dist_;
    Generator gen_;
    std::size_t samples_ = 0;
    Rational lambda_;
    SqPolicy policy_;
    std::uint64_t seed_;
    std::vector<TranscriptEntry> transcript_;
};

}  // namespace xorhalf
