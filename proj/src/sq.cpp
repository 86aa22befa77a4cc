#include "xorhalf/sq.hpp"

#include <algorithm>
#include <sstream>

#include "xorhalf/errors.hpp"
#include "xorhalf/sample.hpp"

namespace xorhalf {

ExplicitDistribution::ExplicitDistribution(std::vector<LabeledPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw InvalidInput("explicit distribution needs at least one point");
    const std::size_t dim = points_.front().x.size();
    for (const auto& p : points_) {
        if (p.x.size() != dim) throw InvalidInput("distribution points must share one dimension");
        if (p.y != 1 && p.y != -1) throw InvalidInput("distribution labels must be +1 or -1");
    }
}

Fraction ExplicitDistribution::expectation(const Query& q) const {
    std::int64_t total = 0;
    for (const auto& p : points_) {
        const int v = q(p.x, p.y);
        if (v != 1 && v != -1) throw InvalidInput("query '" + q.name + "' returned a value outside {-1, +1}");
        total += v;
    }
    return Fraction(total, static_cast<std::int64_t>(points_.size()));
}

ExplicitDistribution pushforward(const ExplicitDistribution& d, const InstanceLift& lift) {
    std::vector<LabeledPoint> out;
    out.reserve(d.size());
    for (const auto& p : d.points()) out.push_back({lift(p.x), p.y});
    return ExplicitDistribution(std::move(out));
}

Query translate_query(const Query& q, const InstanceLift& lift) {
    return {"translated(" + q.name + ")", [q, lift](std::span<const std::int8_t> x, int y) { return q(lift(x), y); }};
}

InstanceLift psi_rho_lift(const MonomialIndex& idx) {
    return [idx](std::span<const std::int8_t> x) { return psi_map(rho_map(x, idx)); };
}

SparseParityTarget::SparseParityTarget(int n_, std::vector<int> support_) : n(n_), support(std::move(support_)) {
    if (support.empty()) throw InvalidInput("sparse parity needs a nonempty support");
    std::sort(support.begin(), support.end());
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i] < 1 || support[i] > n) throw InvalidInput("sparse parity support outside [1, n]");
        if (i > 0 && support[i] == support[i - 1]) throw InvalidInput("sparse parity support has a repeated variable");
    }
}

int SparseParityTarget::label(std::span<const std::int8_t> x) const {
    if (x.size() != static_cast<std::size_t>(n)) throw InvalidInput("parity input has the wrong dimension");
    int v = 1;
    for (int s : support) v *= x[static_cast<std::size_t>(s - 1)];
    return v;
}

ExplicitDistribution parity_distribution(const SparseParityTarget& target) {
    if (target.n > 20) throw ResourceLimit("exhaustive parity distribution limited to n <= 20");
    std::vector<LabeledPoint> pts;
    const std::uint64_t count = std::uint64_t{1} << target.n;
    pts.reserve(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        LabeledPoint p;
        p.x.resize(static_cast<std::size_t>(target.n));
        for (int v = 0; v < target.n; ++v) p.x[static_cast<std::size_t>(v)] = ((mask >> v) & 1u) ? -1 : 1;
        p.y = target.label(p.x);
        pts.push_back(std::move(p));
    }
    return ExplicitDistribution(std::move(pts));
}

// ---- query families ------------------------------------------------------

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << static_cast<long long>(v[i]);
    return os.str();
}

void check_coords(std::span<const std::int8_t> x, const std::vector<std::uint64_t>& coords) {
    for (auto c : coords) {
        if (c >= x.size()) throw InvalidInput("query coordinate outside the instance dimension");
    }
}

}  // namespace

Query parity_query(std::vector<std::uint64_t> coords, bool with_label) {
    std::string name = "parity[" + join(coords) + "]" + (with_label ? "*y" : "");
    return {std::move(name), [coords = std::move(coords), with_label](std::span<const std::int8_t> x, int y) {
                check_coords(x, coords);
                int v = with_label ? y : 1;
                for (auto c : coords) v *= x[c];
                return v;
            }};
}

Query halfspace_query(std::vector<std::int64_t> w, std::int64_t bias, bool with_label) {
    std::string name = "halfspace[" + join(w) + ";" + std::to_string(bias) + "]" + (with_label ? "*y" : "");
    return {std::move(name), [w = std::move(w), bias, with_label](std::span<const std::int8_t> x, int y) {
                if (x.size() != w.size()) throw InvalidInput("halfspace query dimension mismatch");
                std::int64_t acc = bias;
                for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
                const int v = acc < 0 ? -1 : 1;
                return with_label ? v * y : v;
            }};
}

Query junta_query(std::vector<std::uint64_t> coords, std::vector<std::int8_t> table) {
    if (table.size() != (std::size_t{1} << (coords.size() + 1))) throw InvalidInput("junta table size must be 2^(k+1)");
    for (auto t : table) {
        if (t != 1 && t != -1) throw InvalidInput("junta table entries must be +1 or -1");
    }
    std::string name = "junta[" + join(coords) + ";" + join(table) + "]";
    return {std::move(name), [coords = std::move(coords), table = std::move(table)](std::span<const std::int8_t> x, int y) {
                check_coords(x, coords);
                std::size_t key = 0;
                for (std::size_t i = 0; i < coords.size(); ++i) {
                    if (x[coords[i]] < 0) key |= std::size_t{1} << i;
                }
                if (y < 0) key |= std::size_t{1} << coords.size();
                return static_cast<int>(table[key]);
            }};
}

Query random_query(QueryFamily family, std::uint64_t dim, Engine& eng) {
    if (dim == 0) throw InvalidInput("random query needs a positive dimension");
    auto pick_coords = [&](std::size_t count) {
        std::vector<std::uint64_t> c;
        for (std::size_t i = 0; i < count; ++i) c.push_back(uniform_below(eng, dim));
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        return c;
    };
    switch (family) {
        case QueryFamily::Parity: {
            const auto count = static_cast<std::size_t>(1 + uniform_below(eng, 4));
            return parity_query(pick_coords(count), fair_coin(eng));
        }
        case QueryFamily::Halfspace: {
            std::vector<std::int64_t> w(dim);
            for (auto& wi : w) wi = static_cast<std::int64_t>(uniform_below(eng, 7)) - 3;
            const auto bias = static_cast<std::int64_t>(uniform_below(eng, 5)) - 2;
            return halfspace_query(std::move(w), bias, fair_coin(eng));
        }
        case QueryFamily::Junta: {
            auto coords = pick_coords(static_cast<std::size_t>(1 + uniform_below(eng, 3)));
            std::vector<std::int8_t> table(std::size_t{1} << (coords.size() + 1));
            for (auto& t : table) t = fair_coin(eng) ? -1 : 1;
            return junta_query(std::move(coords), std::move(table));
        }
    }
    throw InvalidInput("unknown query family");
}

// ---- oracle --------------------------------------------------------------

std::string policy_name(SqPolicy p) { return p == SqPolicy::Rounding ? "rounding" : "adversarial"; }

SqPolicy parse_policy(const std::string& name) {
    if (name == "rounding") return SqPolicy::Rounding;
    if (name == "adversarial") return SqPolicy::Adversarial;
    throw InvalidParameter("unknown SQ policy '" + name + "' (expected rounding or adversarial)");
}

SqOracle::SqOracle(std::shared_ptr<const ExplicitDistribution> dist, Rational lambda, SqPolicy policy, std::uint64_t seed)
    : dist_(std::move(dist)), lambda_(std::move(lambda)), policy_(policy), seed_(seed) {
    if (lambda_ <= 0) throw InvalidParameter("SQ tolerance lambda must be positive");
    if (!dist_) throw InvalidInput("SQ oracle needs a distribution");
}

SqOracle::SqOracle(Generator gen, std::size_t samples, Rational lambda, SqPolicy policy, std::uint64_t seed)
    : gen_(std::move(gen)), samples_(samples), lambda_(std::move(lambda)), policy_(policy), seed_(seed) {
    if (lambda_ <= 0) throw InvalidParameter("SQ tolerance lambda must be positive");
    if (!gen_ || samples_ == 0) throw InvalidInput("sampled SQ oracle needs a generator and a positive sample count");
}

Rational SqOracle::perturb(const Rational& e, std::uint64_t id) const {
    Rational out;
    if (policy_ == SqPolicy::Rounding) {
        const Rational steps = e / lambda_;
        // round half away from zero
        const Rational shifted = steps < 0 ? Rational(-steps + Rational(1, 2)) : Rational(steps + Rational(1, 2));
        BigInt whole = numerator(shifted) / denominator(shifted);
        if (steps < 0) whole = -whole;
        out = lambda_ * Rational(whole);
    } else {
        Engine eng = make_engine(seed_, StreamTag::SqAdversary, id);
        out = fair_coin(eng) ? Rational(e + lambda_) : Rational(e - lambda_);
    }
    if (out > 1) out = 1;
    if (out < -1) out = -1;
    return out;
}

Rational SqOracle::query(const Query& q) {
    const std::uint64_t id = transcript_.size();
    TranscriptEntry entry;
    entry.id = id;
    entry.query = q.name;
    Rational e;
    if (dist_) {
        entry.exact = dist_->expectation(q);
        e = entry.exact->to_rational();
    } else {
        Engine eng = make_engine(seed_, StreamTag::SqGenerator, id);
        std::int64_t total = 0;
        for (std::size_t i = 0; i < samples_; ++i) {
            const LabeledPoint p = gen_(eng);
            const int v = q(p.x, p.y);
            if (v != 1 && v != -1) throw InvalidInput("query '" + q.name + "' returned a value outside {-1, +1}");
            total += v;
        }
        e = Rational(total, static_cast<std::int64_t>(samples_));
    }
    entry.answer = perturb(e, id);
    transcript_.push_back(entry);
    return entry.answer;
}

}  // namespace xorhalf
