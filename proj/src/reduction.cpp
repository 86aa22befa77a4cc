#include "xorhalf/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "xorhalf/errors.hpp"
#include "xorhalf/parallel.hpp"
#include "xorhalf/rng.hpp"

namespace xorhalf {

AmplifyResult step1_amplify(const XorFormula& j, int q, std::uint64_t seed) {
    if (q < 1 || q % 2 == 0) throw InvalidParameter("bundle size q must be odd and positive (got " + std::to_string(q) + ")");
    if (static_cast<std::size_t>(q) > j.m()) throw InvalidParameter("bundle size q exceeds the number of tuples");
    std::vector<std::size_t> order(j.m());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Engine eng = make_engine(seed, StreamTag::Step1Partition);
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto pick = static_cast<std::size_t>(uniform_below(eng, i));
        std::swap(order[i - 1], order[pick]);
    }
    const std::size_t drop = j.m() % static_cast<std::size_t>(q);
    std::vector<std::size_t> discarded(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(drop));
    std::sort(discarded.begin(), discarded.end());
    std::vector<QKTuple> bundles;
    bundles.reserve(j.m() / static_cast<std::size_t>(q));
    for (std::size_t at = drop; at < order.size(); at += static_cast<std::size_t>(q)) {
        QKTuple b;
        b.blocks.reserve(static_cast<std::size_t>(q));
        for (int i = 0; i < q; ++i) b.blocks.push_back(j[order[at + static_cast<std::size_t>(i)]]);
        bundles.push_back(std::move(b));
    }
    return {QKFormula(j.n(), q, j.k(), std::move(bundles)), std::move(discarded)};
}

LabeledQKFormula step2_scatter(const QKFormula& bundles, std::uint64_t seed) {
    std::vector<LabeledEntry> entries(bundles.m());
    for (std::size_t b = 0; b < bundles.m(); ++b) {
        Engine eng = make_engine(seed, StreamTag::Step2Coin, b);
        LabeledEntry& e = entries[b];
        e.tuple = bundles.bundles()[b];
        if (fair_coin(eng)) {
            for (auto& block : e.tuple.blocks) block = block.with_flipped(0);
            e.label = -1;
        }
    }
    return LabeledQKFormula(bundles.n(), bundles.q(), bundles.k(), std::move(entries));
}

FilterVerdict step3_filter(const LabeledQKFormula& f, int t, const Rational& tau, const FrequencyOptions& opts) {
    FilterVerdict v;
    v.report = pseudorandom_test(f.flatten(), t, tau, opts);
    v.pass = v.report.pass;
    return v;
}

TernarySample step4_embed(const LabeledQKFormula& f) {
    const std::uint64_t n = static_cast<std::uint64_t>(f.n());
    const std::uint64_t k = static_cast<std::uint64_t>(f.k());
    const std::uint64_t dim = n * static_cast<std::uint64_t>(f.q()) * k;
    std::vector<TernaryEntry> entries;
    entries.reserve(f.m());
    for (const auto& e : f.entries()) {
        TernaryEntry x;
        x.label = e.label;
        for (std::size_t b = 0; b < e.tuple.blocks.size(); ++b) {
            const auto& block = e.tuple.blocks[b];
            for (std::size_t s = 0; s < block.arity(); ++s) {
                const auto pos = b * (n * k) + s * n + static_cast<std::uint64_t>(block[s].var - 1);
                x.nonzeros.emplace_back(static_cast<std::uint32_t>(pos), static_cast<std::int8_t>(block[s].sign));
            }
        }
        // positions already ascend: block, then slot, each slot spans n indices
        entries.push_back(std::move(x));
    }
    return TernarySample(dim, std::move(entries));
}

std::uint64_t packed_bytes(std::uint64_t entries, std::uint64_t dim) {
    const unsigned __int128 words = (static_cast<unsigned __int128>(dim) + 63) / 64;
    const unsigned __int128 bytes = words * 8 * entries;
    return bytes > std::numeric_limits<std::uint64_t>::max() ? std::numeric_limits<std::uint64_t>::max()
                                                             : static_cast<std::uint64_t>(bytes);
}

LiftResult step5_lift(std::shared_ptr<const TernarySample> s, int d, const LiftOptions& opts) {
    if (!s) throw InvalidInput("lift needs a sample");
    MonomialIndex idx(s->dim(), d, opts.indexing);
    const std::uint64_t dim = 2 * idx.ambient_dim();
    if (dim / 2 != idx.ambient_dim()) throw ResourceLimit("lifted dimension 2*(u+1)^d exceeds 64-bit indexing");
    const std::uint64_t need = packed_bytes(s->size(), dim);
    if (need <= opts.memory_budget) return {BinarySample::lift_packed(*s, idx), idx};
    if (opts.truncated) return {BinarySample::lifted_view(std::move(s), idx), idx};
    throw ResourceLimit("lift requires dimension " + std::to_string(dim) + " (" + std::to_string(need) +
                        " bytes for " + std::to_string(s->size()) + " entries; budget " +
                        std::to_string(opts.memory_budget) + ")");
}

// ---- witness -------------------------------------------------------------

WitnessHalfspace::WitnessHalfspace(Assignment psi, XorRealization real, MonomialIndex idx, int n, int q, int k)
    : psi_(std::move(psi)), real_(std::move(real)), idx_(idx), n_(n), q_(q), k_(k) {
    if (psi_.size() != n) throw InvalidInput("witness assignment length does not match n");
    if (real_.k != k) throw InvalidInput("realization arity does not match K");
    if (real_.qpoly.degree() > idx_.d()) throw InvalidInput("realization degree exceeds the lift depth");
    if (idx_.u() != static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(q) * static_cast<std::uint64_t>(k)) {
        throw InvalidInput("lift width does not match n*q*K");
    }
    table_.reserve(static_cast<std::size_t>(2 * k + 1));
    for (int s = -k; s <= k; ++s) table_.push_back(real_.qpoly(s));
}

Rational WitnessHalfspace::lift_weight(std::uint64_t pos) const {
    const auto mono = idx_.monomial_at(pos);
    if (!mono) return 0;
    if (idx_.mode() == RhoIndexing::StrictPaper && !idx_.is_representative(pos)) return 0;
    const int deg = static_cast<int>(mono->size());
    if (deg == 0) return real_.qpoly.coefficient(0) * q_;
    const Rational a = real_.qpoly.coefficient(deg);
    if (a == 0) return 0;
    const std::uint64_t width = static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(k_);
    const std::uint64_t block = (*mono)[0] / width;
    BigInt coeff = 1;  // deg! / prod(multiplicity!)
    for (int i = 2; i <= deg; ++i) coeff *= i;
    int sign = 1;
    std::size_t run = 0;
    for (std::size_t i = 0; i < mono->size(); ++i) {
        const auto c = (*mono)[i];
        if (c / width != block) return 0;
        sign *= psi_(static_cast<int>(c % static_cast<std::uint64_t>(n_)) + 1);
        run = (i > 0 && (*mono)[i - 1] == c) ? run + 1 : 1;
        coeff /= run;
    }
    return a * Rational(coeff) * sign;
}

Rational WitnessHalfspace::weight(std::uint64_t pos) const {
    if (pos >= 2 * idx_.ambient_dim()) throw InvalidInput("binary coordinate out of range");
    return lift_weight(pos / 2) / 2;
}

std::vector<Rational> WitnessHalfspace::dense_weights() const {
    const std::uint64_t dim = 2 * idx_.ambient_dim();
    if (dim > BinarySample::kMaxDenseRow) throw ResourceLimit("dense witness of dimension " + std::to_string(dim) + " is too large");
    std::vector<Rational> w(dim);
    for (std::uint64_t pos = 0; pos < idx_.ambient_dim(); ++pos) {
        const Rational half = lift_weight(pos) / 2;
        w[2 * pos] = half;
        w[2 * pos + 1] = half;
    }
    return w;
}

Rational WitnessHalfspace::score(const TernaryEntry& x) const {
    const std::uint64_t width = static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(k_);
    std::vector<long long> sums(static_cast<std::size_t>(q_), 0);
    for (const auto& [c, v] : x.nonzeros) {
        if (c >= idx_.u()) throw InvalidInput("entry index outside the witness width");
        sums[c / width] += static_cast<long long>(psi_(static_cast<int>(c % static_cast<std::uint64_t>(n_)) + 1)) * v;
    }
    Rational total = 0;
    for (long long s : sums) {
        total += (s >= -k_ && s <= k_) ? table_[static_cast<std::size_t>(s + k_)] : real_.qpoly(s);
    }
    return total;
}

std::vector<Rational> WitnessHalfspace::scores(const BinarySample& s) const {
    std::vector<Rational> out(s.size());
    if (!s.materialized()) {
        if (!s.index() || !(*s.index() == idx_)) throw InvalidInput("sample lift does not match the witness index");
        parallel_for(s.size(), [&](std::size_t j) { out[j] = score((*s.pre_lift())[j]); });
        return out;
    }
    if (s.dim() != 2 * idx_.ambient_dim()) throw InvalidInput("sample dimension does not match the witness");
    // scale the nonzero lift weights to integers over a common denominator
    std::vector<std::pair<std::uint64_t, Rational>> support;
    BigInt denom = 1;
    for (std::uint64_t pos = 0; pos < idx_.ambient_dim(); ++pos) {
        Rational w = lift_weight(pos);
        if (w == 0) continue;
        denom = boost::multiprecision::lcm(denom, BigInt(denominator(w)));
        support.emplace_back(pos, std::move(w));
    }
    // each binary pair contributes (w/2)(b0 + b1) = w * (b0 + b1) / 2
    denom *= 2;
    std::vector<std::pair<std::uint64_t, BigInt>> scaled;
    scaled.reserve(support.size());
    BigInt bound = 0;
    for (auto& [pos, w] : support) {
        BigInt v = BigInt(numerator(w)) * (denom / BigInt(denominator(w))) / 2;
        bound += abs(v) * 2;
        scaled.emplace_back(pos, std::move(v));
    }
    if (bound < BigInt(std::numeric_limits<std::int64_t>::max())) {
        std::vector<std::pair<std::uint64_t, std::int64_t>> small;
        small.reserve(scaled.size());
        for (const auto& [pos, v] : scaled) small.emplace_back(pos, v.convert_to<std::int64_t>());
        parallel_for(s.size(), [&](std::size_t j) {
            std::int64_t acc = 0;
            for (const auto& [pos, v] : small) acc += v * (s.value(j, 2 * pos) + s.value(j, 2 * pos + 1));
            out[j] = Rational(BigInt(acc), denom);
        });
        return out;
    }
    parallel_for(s.size(), [&](std::size_t j) {
        BigInt acc = 0;
        for (const auto& [pos, v] : scaled) acc += v * (s.value(j, 2 * pos) + s.value(j, 2 * pos + 1));
        out[j] = Rational(acc, denom);
    });
    return out;
}

Rational WitnessHalfspace::l1_norm() const {
    Rational total = abs(real_.qpoly.coefficient(0) * q_);
    const BigInt width = BigInt(n_) * k_;
    BigInt power = 1;
    for (int deg = 1; deg <= real_.qpoly.degree(); ++deg) {
        power *= width;
        total += abs(real_.qpoly.coefficient(deg)) * Rational(power) * q_;
    }
    return total;
}

std::vector<Rational> WitnessHalfspace::record_margins(const BinarySample& s) {
    min_margin_.reset();
    auto sc = scores(s);
    for (std::size_t j = 0; j < sc.size(); ++j) {
        if (sign_of(sc[j]) != s.label(j)) continue;
        const Rational m = abs(sc[j]);
        if (!min_margin_ || m < *min_margin_) min_margin_ = m;
    }
    return sc;
}

WitnessHalfspace build_witness(const Assignment& psi, const XorRealization& real, const MonomialIndex& idx,
                               const PipelineParams& params) {
    if (real.d != idx.d()) throw InvalidInput("realization depth does not match the lift depth");
    return WitnessHalfspace(psi, real, idx, params.n, params.q, params.k);
}

Fraction witness_error(const WitnessHalfspace& w, const BinarySample& s) {
    if (s.size() == 0) throw InvalidInput("witness error needs a nonempty sample");
    return witness_error(w.scores(s), s);
}

Fraction witness_error(const std::vector<Rational>& sc, const BinarySample& s) {
    if (sc.size() != s.size() || s.size() == 0) throw InvalidInput("score count does not match the sample");
    std::int64_t wrong = 0;
    for (std::size_t j = 0; j < sc.size(); ++j) wrong += sign_of(sc[j]) != s.label(j);
    return Fraction(wrong, static_cast<std::int64_t>(s.size()));
}

// ---- bounds and schedule -------------------------------------------------

Bound eta_prime(double eta, int q, int k, int d, int n, double tau, std::optional<int> t) {
    if (d < 1) throw PreconditionError("eta_prime: d must be >= 1");
    if (d > k) throw PreconditionError("eta_prime: d <= K fails (d = " + std::to_string(d) + ", K = " + std::to_string(k) + ")");
    if (t && d > *t) throw PreconditionError("eta_prime: d <= t fails (d = " + std::to_string(d) + ", t = " + std::to_string(*t) + ")");
    if (tau < 0) throw PreconditionError("eta_prime: tau must be >= 0");
    const double mu = std::pow(static_cast<double>(n), d) * tau;
    const double lhs = k * std::ldexp(1.0, d) * mu / d;
    if (!(lhs < d)) {
        std::ostringstream os;
        os << "eta_prime: K 2^d n^d tau / d < d fails (" << lhs << " >= " << d << ")";
        throw PreconditionError(os.str());
    }
    const double a = 0.5 + static_cast<double>(d) / (2.0 * k);
    const double b = 0.5 + std::ldexp(1.0, d - 1) * mu / d;
    Bound out;
    out.value = eta + 2.0 * q * std::exp(-kl_bernoulli(a, b) * k);
    out.log_value = std::log(out.value);
    out.vacuous = out.value >= 0.5;
    return out;
}

Preset parse_preset(const std::string& name) {
    if (name.empty() || name == "none") return Preset::None;
    if (name == "case1") return Preset::Case1;
    if (name == "case2") return Preset::Case2;
    throw InvalidParameter("unknown preset '" + name + "' (expected none, case1 or case2)");
}

std::string preset_name(Preset p) {
    switch (p) {
        case Preset::Case1: return "case1";
        case Preset::Case2: return "case2";
        default: return "none";
    }
}

int round_up_odd(double x) {
    int v = static_cast<int>(std::ceil(x));
    if (v < 1) v = 1;
    return v % 2 == 0 ? v + 1 : v;
}

void PipelineParams::validate() const {
    if (n < 1) throw InvalidParameter("n must be >= 1");
    if (k < 1) throw InvalidParameter("K must be >= 1");
    if (q < 1 || q % 2 == 0) throw InvalidParameter("q must be odd and positive (got " + std::to_string(q) + ")");
    if (d < 1 || d > k) throw InvalidParameter("d must lie in [1, K] (got " + std::to_string(d) + ")");
    if (t < 1 || t > k) throw InvalidParameter("t must lie in [1, K] (got " + std::to_string(t) + ")");
    if (tau <= 0) throw InvalidParameter("tau must be positive");
    if (eta < 0 || eta >= Rational(1, 2)) throw InvalidParameter("eta must lie in [0, 1/2)");
    if (!(schedule_c > 0)) throw InvalidParameter("schedule constant C must be positive");
}

std::vector<std::string> apply_preset(Preset preset, PipelineParams& params) {
    std::vector<std::string> warnings;
    if (preset == Preset::None) return warnings;
    if (params.k < 2) throw InvalidParameter("presets need K >= 2");
    const double k = params.k;
    double raw = 0;
    if (preset == Preset::Case1) {
        raw = std::pow(std::log2(k), 2.0 / 3.0) * std::sqrt(k);
    } else {
        const double ll = std::log2(std::log2(k));
        raw = ll > 1.0 ? k / ll : k;
    }
    params.d = std::clamp(static_cast<int>(std::floor(raw)), 1, params.k);
    params.q = round_up_odd(params.schedule_c * k);
    params.r = params.d;
    params.t = params.r;
    params.tau = exact_rational(std::pow(static_cast<double>(params.n), -params.r / 4.0));
    try {
        const Bound b = eta_prime(to_double(params.eta), params.q, params.k, params.d, params.n, to_double(params.tau), params.t);
        if (b.vacuous) {
            std::ostringstream os;
            os << preset_name(preset) << ": eta' bound " << b.value << " is vacuous at this scale";
            warnings.push_back(os.str());
        }
    } catch (const PreconditionError& e) {
        warnings.push_back(preset_name(preset) + ": " + e.what());
    }
    return warnings;
}

// ---- pipeline ------------------------------------------------------------

Fraction mismatch_fraction(const LabeledQKFormula& f, const Assignment& psi) {
    std::int64_t bad = 0;
    for (const auto& e : f.entries()) bad += mxor_of(e.tuple, psi) != e.label;
    return Fraction(bad, static_cast<std::int64_t>(f.m()));
}

Fraction unbalanced_fraction(const LabeledQKFormula& f, const Assignment& psi, int d) {
    std::int64_t bad = 0;
    for (const auto& e : f.entries()) {
        bool any = false;
        for (const auto& block : e.tuple.blocks) any = any || std::abs(lambda_sum(eval_tuple(block, psi))) > d;
        bad += any;
    }
    return Fraction(bad, static_cast<std::int64_t>(f.m()));
}

PipelineResult run_pipeline(const XorFormula& j, const PipelineParams& in, const std::optional<Assignment>& planted) {
    PipelineParams params = in;
    if (params.n == 0) params.n = j.n();
    if (params.k == 0) params.k = j.k();
    if (params.n != j.n() || params.k != j.k()) throw InvalidInput("pipeline parameters do not match the formula's (n, K)");
    params.validate();
    std::vector<std::string> warnings;
    if (params.d > params.t) {
        warnings.push_back("d = " + std::to_string(params.d) + " exceeds filter order t = " + std::to_string(params.t));
    }

    auto amp = step1_amplify(j, params.q, stream_seed(params.seed, StreamTag::Pipeline, 1));
    auto labeled = step2_scatter(amp.bundles, stream_seed(params.seed, StreamTag::Pipeline, 2));
    FrequencyOptions fopts;
    fopts.streaming = params.streaming_freq;
    auto filter = step3_filter(labeled, params.t, params.tau, fopts);
    if (!filter.pass) warnings.push_back("filter verdict: not-random (max deviation " + rational_str(filter.report.max_deviation) + ")");
    auto ternary = std::make_shared<const TernarySample>(step4_embed(labeled));
    auto lift = step5_lift(ternary, params.d, params.lift);

    std::optional<Bound> bound;
    std::string note;
    try {
        bound = eta_prime(to_double(params.eta), params.q, params.k, params.d, params.n, to_double(params.tau), params.t);
        if (bound->vacuous) note = "vacuous";
    } catch (const PreconditionError& e) {
        note = e.what();
    }

    PipelineResult res{params,         std::move(amp.bundles), std::move(amp.discarded), std::move(labeled),
                       std::move(filter), ternary,             std::move(lift.sample),    lift.index,
                       std::nullopt,   std::nullopt,           std::nullopt,              std::nullopt,
                       bound,          note,                   std::move(warnings)};

    if (planted) {
        auto real = interpolate_xor_poly(params.k, params.d);
        WitnessHalfspace w = build_witness(*planted, real, res.index, params);
        const auto sc = w.record_margins(res.binary);
        res.witness_error = witness_error(sc, res.binary);
        res.mismatch_fraction = mismatch_fraction(res.labeled, *planted);
        res.unbalanced_fraction = unbalanced_fraction(res.labeled, *planted, params.d);
        res.witness = std::move(w);
    }
    return res;
}

PipelineResult run_pipeline(const PlantedInstance& inst, const PipelineParams& params) {
    PipelineParams p = params;
    p.eta = inst.noise_rate;
    return run_pipeline(inst.formula, p, inst.planted);
}

}  // namespace xorhalf
