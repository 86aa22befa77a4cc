#include "xorhalf/learners.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "xorhalf/rng.hpp"

namespace xorhalf {

Gf2System Gf2System::from_formula(const XorFormula& j) {
    Gf2System sys;
    sys.n = j.n();
    sys.words = static_cast<std::size_t>((j.n() + 63) / 64);
    sys.coeffs.assign(sys.words * j.m(), 0);
    sys.target.assign(j.m(), 0);
    sys.provenance.resize(j.m());
    for (std::size_t r = 0; r < j.m(); ++r) {
        std::uint8_t parity = 0;
        for (const auto& lit : j[r].literals()) {
            const auto bit = static_cast<std::size_t>(lit.var - 1);
            sys.coeffs[r * sys.words + bit / 64] ^= std::uint64_t{1} << (bit % 64);
            if (lit.sign < 0) parity ^= 1;
        }
        sys.target[r] = parity;
        sys.provenance[r] = r;
    }
    return sys;
}

bool Gf2System::coeff(std::size_t row, int var) const {
    const auto bit = static_cast<std::size_t>(var - 1);
    return (coeffs[row * words + bit / 64] >> (bit % 64)) & 1u;
}

Gf2Result gf2_refute(const XorFormula& j) {
    Gf2System sys = Gf2System::from_formula(j);
    const std::size_t m = sys.rows();
    const std::size_t w = sys.words;
    const std::size_t cw = (m + 63) / 64;
    // combination[r] records which original rows were summed into row r
    std::vector<std::uint64_t> comb(cw * m, 0);
    for (std::size_t r = 0; r < m; ++r) comb[r * cw + r / 64] |= std::uint64_t{1} << (r % 64);

    auto row_xor = [&](std::size_t dst, std::size_t src) {
        for (std::size_t i = 0; i < w; ++i) sys.coeffs[dst * w + i] ^= sys.coeffs[src * w + i];
        for (std::size_t i = 0; i < cw; ++i) comb[dst * cw + i] ^= comb[src * cw + i];
        sys.target[dst] ^= sys.target[src];
    };
    auto row_swap = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < w; ++i) std::swap(sys.coeffs[a * w + i], sys.coeffs[b * w + i]);
        for (std::size_t i = 0; i < cw; ++i) std::swap(comb[a * cw + i], comb[b * cw + i]);
        std::swap(sys.target[a], sys.target[b]);
    };

    std::vector<int> pivot_col;
    std::size_t rank = 0;
    for (int v = 1; v <= sys.n && rank < m; ++v) {
        std::size_t pivot = rank;
        while (pivot < m && !sys.coeff(pivot, v)) ++pivot;
        if (pivot == m) continue;
        if (pivot != rank) row_swap(pivot, rank);
        for (std::size_t r = 0; r < m; ++r) {
            if (r != rank && sys.coeff(r, v)) row_xor(r, rank);
        }
        pivot_col.push_back(v);
        ++rank;
    }

    Gf2Result res;
    res.rank = rank;
    for (std::size_t r = rank; r < m; ++r) {
        if (!sys.target[r]) continue;
        res.sat = false;
        for (std::size_t i = 0; i < m; ++i) {
            if ((comb[r * cw + i / 64] >> (i % 64)) & 1u) res.certificate.push_back(i);
        }
        return res;
    }
    // free variables take b = 0 (value +1); pivots read their row's target
    std::vector<std::int8_t> values(static_cast<std::size_t>(sys.n), 1);
    for (std::size_t r = 0; r < rank; ++r) {
        if (sys.target[r]) values[static_cast<std::size_t>(pivot_col[r] - 1)] = -1;
    }
    res.sat = true;
    res.assignment = Assignment(std::move(values));
    return res;
}

bool verify_certificate(const XorFormula& j, std::span<const std::size_t> rows) {
    if (rows.empty()) return false;
    const Gf2System sys = Gf2System::from_formula(j);
    std::vector<std::uint64_t> acc(sys.words, 0);
    std::uint8_t rhs = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        if (r >= sys.rows()) return false;
        if (i > 0 && rows[i - 1] >= r) return false;
        for (std::size_t k = 0; k < sys.words; ++k) acc[k] ^= sys.coeffs[r * sys.words + k];
        rhs ^= sys.target[r];
    }
    return rhs == 1 && std::all_of(acc.begin(), acc.end(), [](std::uint64_t x) { return x == 0; });
}

// ---- perceptron ----------------------------------------------------------

std::vector<std::vector<std::int8_t>> dense_rows(const BinarySample& s) {
    std::vector<std::vector<std::int8_t>> rows;
    rows.reserve(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) rows.push_back(s.row(j));
    return rows;
}

namespace {

std::int64_t dot(const std::vector<std::int64_t>& w, const std::vector<std::int8_t>& x) {
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
    return acc;
}

std::int64_t count_errors(const std::vector<std::int64_t>& w, const std::vector<std::vector<std::int8_t>>& rows,
                          const std::vector<int>& labels) {
    std::int64_t wrong = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) wrong += (dot(w, rows[j]) < 0 ? -1 : 1) != labels[j];
    return wrong;
}

}  // namespace

PerceptronResult perceptron_fit(const std::vector<std::vector<std::int8_t>>& rows, const std::vector<int>& labels,
                                int max_epochs, std::uint64_t seed) {
    if (max_epochs < 1) throw InvalidParameter("perceptron needs max_epochs >= 1");
    if (rows.empty() || rows.size() != labels.size()) throw InvalidInput("perceptron needs a nonempty labeled sample");
    const std::size_t dim = rows[0].size();
    for (const auto& r : rows) {
        if (r.size() != dim) throw InvalidInput("perceptron rows must share one dimension");
    }
    const auto m = static_cast<std::int64_t>(rows.size());
    PerceptronResult res;
    std::vector<std::int64_t> w(dim, 0);
    res.weights = w;
    std::int64_t best = count_errors(w, rows, labels);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int epoch = 0; epoch < max_epochs && best > 0; ++epoch) {
        Engine eng = make_engine(seed, StreamTag::Perceptron, static_cast<std::uint64_t>(epoch));
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_below(eng, i)]);
        for (std::size_t j : order) {
            const int y = labels[j];
            if ((dot(w, rows[j]) < 0 ? -1 : 1) == y) continue;
            for (std::size_t i = 0; i < dim; ++i) w[i] += y * rows[j][i];
            ++res.mistakes;
        }
        res.epochs_run = epoch + 1;
        const std::int64_t err = count_errors(w, rows, labels);
        if (err < best) {
            best = err;
            res.weights = w;
        }
    }
    res.training_error = Fraction(best, m);
    return res;
}

PerceptronResult perceptron_fit(const BinarySample& s, int max_epochs, std::uint64_t seed) {
    return perceptron_fit(dense_rows(s), s.labels(), max_epochs, seed);
}

Hypothesis PerceptronLearner::learn(ExampleOracle& oracle, std::size_t budget) {
    std::vector<std::vector<std::int8_t>> rows;
    std::vector<int> labels;
    rows.reserve(budget);
    labels.reserve(budget);
    for (std::size_t i = 0; i < budget; ++i) {
        Example e = oracle.draw();
        rows.push_back(std::move(e.x));
        labels.push_back(e.y);
    }
    auto fit = perceptron_fit(rows, labels, max_epochs_, seed_);
    return [w = std::move(fit.weights)](std::span<const std::int8_t> x) {
        if (x.size() != w.size()) throw InvalidInput("hypothesis input has the wrong dimension");
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
        return acc < 0 ? -1 : 1;
    };
}

BootstrapOracle::BootstrapOracle(const std::vector<std::vector<std::int8_t>>& rows, const std::vector<int>& labels,
                                 std::uint64_t seed)
    : rows_(rows), labels_(labels), seed_(seed) {
    if (rows_.empty()) throw InvalidInput("bootstrap oracle needs a nonempty sample");
}

Example BootstrapOracle::draw() {
    Engine eng = make_engine(seed_, StreamTag::Bootstrap, draws_++);
    const auto j = static_cast<std::size_t>(uniform_below(eng, rows_.size()));
    return {rows_[j], labels_[j]};
}

std::uint64_t BootstrapOracle::dim() const { return rows_[0].size(); }

std::string verdict_name(VerdictLabel v) {
    return v == VerdictLabel::AlmostRealizable ? "almost-realizable" : "scattered";
}

LearnerVerdict distinguisher_wrapper(const BinarySample& s, Learner& learner, double c, std::uint64_t seed) {
    if (s.size() == 0) throw InvalidInput("distinguisher needs a nonempty sample");
    LearnerVerdict v;
    v.threshold = exact_rational(0.5 - std::pow(static_cast<double>(s.dim()), -c));
    const auto rows = dense_rows(s);
    try {
        BootstrapOracle oracle(rows, s.labels(), seed);
        Hypothesis h = learner.learn(oracle, s.size());
        if (!h) throw InvalidInput("learner returned no hypothesis");
        std::int64_t wrong = 0;
        for (std::size_t j = 0; j < rows.size(); ++j) wrong += h(rows[j]) != s.label(j);
        v.error = Fraction(wrong, static_cast<std::int64_t>(s.size()));
    } catch (const std::exception& e) {
        v.label = VerdictLabel::Scattered;
        v.error = Fraction(static_cast<std::int64_t>(s.size()), static_cast<std::int64_t>(s.size()));
        v.diagnostic = std::string("learner failure: ") + e.what();
        return v;
    }
    v.label = v.error.to_rational() <= v.threshold ? VerdictLabel::AlmostRealizable : VerdictLabel::Scattered;
    return v;
}

}  // namespace xorhalf
