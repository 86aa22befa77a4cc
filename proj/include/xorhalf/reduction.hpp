#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xorhalf/formula.hpp"
#include "xorhalf/monomial_index.hpp"
#include "xorhalf/numeric.hpp"
#include "xorhalf/polyrealize.hpp"
#include "xorhalf/pseudorandom.hpp"
#include "xorhalf/sample.hpp"

namespace xorhalf {

// ---- the five stages -----------------------------------------------------

struct AmplifyResult {
    QKFormula bundles;
    std::vector<std::size_t> discarded;  // original tuple indices, ascending
};

/// Shuffle by seed, drop m mod q tuples, group the rest into floor(m/q) bundles.
AmplifyResult step1_amplify(const XorFormula& j, int q, std::uint64_t seed);

/// Each bundle independently keeps label +1, or has the first literal of every
/// block flipped and label -1, by a fair coin per bundle index.
LabeledQKFormula step2_scatter(const QKFormula& bundles, std::uint64_t seed);

struct FilterVerdict {
    bool pass = false;
    FrequencyReport report;
};

/// Pseudo-randomness test on all blocks of all entries. Never throws on failure.
FilterVerdict step3_filter(const LabeledQKFormula& f, int t, const Rational& tau, const FrequencyOptions& opts = {});

/// Literal indicators: position block*(n*K) + slot*n + (var-1) holds the sign.
TernarySample step4_embed(const LabeledQKFormula& f);

struct LiftOptions {
    RhoIndexing indexing = RhoIndexing::Canonical;
    /// Byte cap for the bit-packed materialization.
    std::uint64_t memory_budget = std::uint64_t{256} << 20;
    /// Past the budget, keep a lazy Psi(rho(x)) view with the same declared dim.
    bool truncated = false;
};

struct LiftResult {
    BinarySample sample;
    MonomialIndex index;
};

/// Bytes a bit-packed lift of `entries` rows of declared dimension `dim` needs.
std::uint64_t packed_bytes(std::uint64_t entries, std::uint64_t dim);

LiftResult step5_lift(std::shared_ptr<const TernarySample> s, int d, const LiftOptions& opts = {});

// ---- witness -------------------------------------------------------------

/// The halfspace p'(x) = sum_b qpoly(sum over block b of psi_var * x_c),
/// expanded on the monomial lift and folded through Psi.
class WitnessHalfspace {
public:
    WitnessHalfspace(Assignment psi, XorRealization real, MonomialIndex idx, int n, int q, int k);

    const Assignment& assignment() const noexcept { return psi_; }
    const XorRealization& realization() const noexcept { return real_; }
    const MonomialIndex& index() const noexcept { return idx_; }
    int n() const noexcept { return n_; }
    int q() const noexcept { return q_; }
    int k() const noexcept { return k_; }

    /// Weight on lifted (pre-Psi) position `pos`.
    Rational lift_weight(std::uint64_t pos) const;
    /// Weight on binary coordinate `pos` (half the lift weight).
    Rational weight(std::uint64_t pos) const;
    /// All binary weights (small dimensions only).
    std::vector<Rational> dense_weights() const;

    /// <w, rho(x)> evaluated in factored form on a ternary entry.
    Rational score(const TernaryEntry& x) const;
    /// <w', b_j>, factored for lazy views, through explicit weights otherwise.
    std::vector<Rational> scores(const BinarySample& s) const;

    /// sum_i |w'_i|, closed form.
    Rational l1_norm() const;

    /// min |score| over entries with sign(score) == label; recorded by `record_margins`.
    const std::optional<Rational>& min_margin() const noexcept { return min_margin_; }
    /// Returns the scores it computed.
    std::vector<Rational> record_margins(const BinarySample& s);

private:
    Assignment psi_;
    XorRealization real_;
    MonomialIndex idx_;
    int n_;
    int q_;
    int k_;
    std::vector<Rational> table_;  // qpoly on [-K, K]
    std::optional<Rational> min_margin_;
};

/// sign with sign(0) = +1.
inline int sign_of(const Rational& r) { return r < 0 ? -1 : 1; }

struct PipelineParams;

WitnessHalfspace build_witness(const Assignment& psi, const XorRealization& real, const MonomialIndex& idx,
                               const PipelineParams& params);

/// Fraction of entries with sign(<w', b>) != label.
Fraction witness_error(const WitnessHalfspace& w, const BinarySample& s);
Fraction witness_error(const std::vector<Rational>& scores, const BinarySample& s);

// ---- bounds and schedule -------------------------------------------------

/// eta + 2q exp(-D(1/2 + d/2K, 1/2 + 2^{d-1} n^d tau / d) K); vacuous at >= 1/2.
/// Requires K 2^d n^d tau / d < d, d <= K, and d <= t when t is given.
Bound eta_prime(double eta, int q, int k, int d, int n, double tau, std::optional<int> t = std::nullopt);

enum class Preset { None, Case1, Case2 };

Preset parse_preset(const std::string& name);
std::string preset_name(Preset p);

struct PipelineParams {
    int n = 0;
    int k = 0;
    int q = 1;
    int d = 1;
    /// Step III schedule exponent; presets set t = r and tau = n^{-r/4}.
    int r = 0;
    Rational eta = 0;
    Rational tau = 2;
    int t = 1;
    std::uint64_t seed = 0;
    double schedule_c = 4.0;
    bool streaming_freq = true;
    LiftOptions lift;

    /// Throws InvalidParameter on an invalid combination.
    void validate() const;
};

/// Fill q, d, r, t, tau from a named schedule. Returns warnings.
std::vector<std::string> apply_preset(Preset preset, PipelineParams& params);

/// Smallest odd integer >= x.
int round_up_odd(double x);

// ---- pipeline ------------------------------------------------------------

struct PipelineResult {
    PipelineParams params;
    QKFormula bundles;
    std::vector<std::size_t> discarded;
    LabeledQKFormula labeled;
    FilterVerdict filter;
    std::shared_ptr<const TernarySample> ternary;
    BinarySample binary;
    MonomialIndex index;

    std::optional<WitnessHalfspace> witness;
    std::optional<Fraction> witness_error;
    std::optional<Fraction> mismatch_fraction;
    std::optional<Fraction> unbalanced_fraction;

    std::optional<Bound> eta_prime_bound;
    std::string eta_prime_note;
    std::vector<std::string> warnings;
};

PipelineResult run_pipeline(const XorFormula& j, const PipelineParams& params,
                            const std::optional<Assignment>& planted = std::nullopt);
PipelineResult run_pipeline(const PlantedInstance& inst, const PipelineParams& params);

/// Entries whose label differs from MXOR at psi.
Fraction mismatch_fraction(const LabeledQKFormula& f, const Assignment& psi);
/// Entries with some block whose coordinate sum at psi exceeds d in magnitude.
Fraction unbalanced_fraction(const LabeledQKFormula& f, const Assignment& psi, int d);

}  // namespace xorhalf
